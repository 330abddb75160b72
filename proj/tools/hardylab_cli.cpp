#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hardylab/error.hpp"
#include "hardylab/experiment.hpp"
#include "hardylab/fixtures.hpp"

using nlohmann::json;

namespace {

json fixtures_json() {
    json out = json::array();
    for (const auto& f : hardylab::list_fixtures()) {
        json params = json::array();
        for (const auto& p : f.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"doc", p.doc}});
        out.push_back({{"name", f.name}, {"kinds", f.kinds}, {"doc", f.doc}, {"params", params}});
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimension, Frostman and Hardy-constant experiments on Euclidean grids and point sets."};
    std::string config_path, out_dir;
    int threads = 0;
    std::vector<std::string> formats;
    bool list = false, quiet = false;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config's \"out\")");
    app.add_option("--threads", threads, "worker threads for scans")->check(CLI::PositiveNumber);
    app.add_option("--format", formats, "output formats, repeatable (default: all)")
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->delimiter(',');
    app.add_flag("--list-fixtures", list, "print the named builders with their parameters as JSON");
    app.add_flag("--quiet", quiet, "do not print the summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (list) {
        std::cout << fixtures_json().dump(2) << "\n";
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "error: --config is required\n";
        return 1;
    }

    hardylab::ExperimentConfig config;
    hardylab::OutputFormats fmt;
    try {
        std::ifstream in(config_path);
        json doc = json::parse(in);
        config = hardylab::parse_config(doc);
        if (threads > 0) config.threads = threads;
        if (out_dir.empty()) out_dir = doc.value("out", std::string("hardylab_out"));
        if (!formats.empty()) {
            fmt = {false, false, false};
            for (const auto& f : formats) (f == "csv" ? fmt.csv : f == "json" ? fmt.json : fmt.svg) = true;
        }
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hardylab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        hardylab::ReportBundle bundle = hardylab::run(config);
        hardylab::write_bundle(bundle, out_dir, fmt);
        if (!quiet) {
            json s = bundle.summary;
            std::cout << s.dump(2) << "\n";
        }
    } catch (const hardylab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hardylab::Error& e) {
        // Library preconditions reached through config values.
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
