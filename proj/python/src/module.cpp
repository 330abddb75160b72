#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hardylab/error.hpp"
#include "hardylab/experiment.hpp"
#include "hardylab/fixtures.hpp"
#include "hardylab/report.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side wraps it with the json module.
std::string run_json(const std::string& config, const std::string& out, const std::vector<std::string>& formats) {
    hardylab::ExperimentConfig c = hardylab::parse_config(json::parse(config));
    hardylab::ReportBundle b;
    {
        py::gil_scoped_release release;
        b = hardylab::run(c);
    }
    if (!out.empty()) {
        hardylab::OutputFormats fmt;
        if (!formats.empty()) {
            fmt = {false, false, false};
            for (const auto& f : formats) {
                if (f == "csv") fmt.csv = true;
                else if (f == "json") fmt.json = true;
                else if (f == "svg") fmt.svg = true;
                else throw hardylab::ConfigError("unknown format '" + f + "'");
            }
        }
        hardylab::write_bundle(b, out, fmt);
    }
    json tables = json::object();
    for (const auto& t : b.tables) tables[t.name] = {{"header", t.header}, {"rows", t.rows}};
    return json{{"summary", b.summary}, {"provenance", b.provenance}, {"tables", tables}}.dump();
}

std::string fixtures_json() {
    json out = json::array();
    for (const auto& f : hardylab::list_fixtures()) {
        json params = json::object();
        for (const auto& p : f.params) params[p.name] = {{"default", p.default_value}, {"doc", p.doc}};
        out.push_back({{"name", f.name}, {"kinds", f.kinds}, {"doc", f.doc}, {"params", params}});
    }
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dimension, Frostman and Hardy-constant experiments.";

    static py::exception<hardylab::ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<hardylab::Error> lib_error(m, "HardylabError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const hardylab::ConfigError& e) {
            config_error(e.what());
        } catch (const json::exception& e) {
            config_error(e.what());
        } catch (const hardylab::Error& e) {
            lib_error(e.what());
        }
    });

    m.def("version", &hardylab::version);
    m.def("run_json", &run_json, py::arg("config"), py::arg("out") = "", py::arg("formats") = std::vector<std::string>{});
    m.def("fixtures_json", &fixtures_json);
}
