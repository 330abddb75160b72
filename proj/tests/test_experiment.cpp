#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hardylab/experiment.hpp"
#include "hardylab/fixtures.hpp"
#include "hardylab/report.hpp"

using namespace hardylab;
using nlohmann::json;

namespace {

ReportBundle run_json(const char* text) { return run(parse_config(json::parse(text))); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {
    TEST_CASE("config errors are reported as config errors") {
        const char* bad[] = {
            R"([1, 2])",
            R"({"builder": "cantor"})",
            R"({"command": "nope", "builder": "cantor"})",
            R"({"command": "dim"})",
            R"({"command": "dim", "builder": "no_such_builder"})",
            R"({"command": "dim", "builder": "punctured_square"})",
            R"({"command": "scan", "builder": "cantor"})",
            R"({"command": "dim", "builder": "cantor", "bogus": 1})",
            R"({"command": "dim", "builder": "cantor", "params": {"bogus": 1}})",
            R"({"command": "dim", "builder": "cantor", "random_free": false})",
            R"({"command": "hardy", "builder": "interval", "p": "two"})",
            R"({"command": "dim", "builder": "cantor", "threads": 0})",
            R"({"command": "example"})",
            R"({"command": "example", "name": "9.9"})",
        };
        for (const char* text : bad) {
            CAPTURE(text);
            CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
        }
    }

    TEST_CASE("defaults are filled in and fixture keys may sit at the top level") {
        ExperimentConfig c = parse_config(json::parse(R"({"command": "hardy", "builder": "radial", "n": 2, "β": 0.5})"));
        CHECK(c.params.at("n") == 2);
        CHECK(c.params.at("L") == 1.0);
        CHECK(c.options.at("beta") == 0.5);
        CHECK(c.options.at("p") == 2.0);
        CHECK(c.threads == 1);
    }

    TEST_CASE("every summary number appears in a CSV") {
        const char* configs[] = {
            R"({"command": "dim", "builder": "cantor"})",
            R"({"command": "frostman", "builder": "cantor"})",
            R"({"command": "hardy", "builder": "interval", "form": "line"})",
            R"({"command": "hardy", "builder": "punctured_square", "hs": [0.125, 0.0625, 0.03125]})",
        };
        for (const char* text : configs) {
            CAPTURE(text);
            ReportBundle b = run_json(text);
            CHECK(untraceable_fields(b).empty());
            CHECK(b.provenance.at("random_free") == true);
            CHECK(b.provenance.at("version") == version());
            CHECK(b.provenance.at("config") == json::parse(text));
        }
    }

    TEST_CASE("two runs write byte-identical tables and plots") {
        namespace fs = std::filesystem;
        const char* text = R"({"command": "dim", "builder": "cantor"})";
        fs::path root = fs::temp_directory_path() / "hardylab_determinism";
        fs::remove_all(root);
        write_bundle(run_json(text), (root / "a").string());
        write_bundle(run_json(text), (root / "b").string());
        std::set<std::string> names;
        for (const auto& e : fs::directory_iterator(root / "a")) names.insert(e.path().filename().string());
        CHECK(names.count("summary.json") == 1);
        CHECK(names.count("estimates.csv") == 1);
        for (const auto& n : names) {
            if (n == "summary.json") continue;  // carries the wall time
            CAPTURE(n);
            CHECK(slurp(root / "a" / n) == slurp(root / "b" / n));
        }
        fs::remove_all(root);
    }

    TEST_CASE("output formats can be selected") {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "hardylab_formats";
        fs::remove_all(dir);
        write_bundle(run_json(R"({"command": "frostman", "builder": "cantor"})"), dir.string(), {true, false, false});
        for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() == ".csv");
        fs::remove_all(dir);
    }

    TEST_CASE("fixture listing") {
        std::set<std::string> names;
        for (const auto& f : list_fixtures()) {
            names.insert(f.name);
            CHECK(!f.doc.empty());
            CHECK(!f.kinds.empty());
        }
        for (const char* n : {"punctured_square", "perforated_disk", "punctured_disk", "exterior_ball", "interval",
                              "radial", "cantor_complement", "ifs", "cantor", "interval_points", "geometric_sequence"})
            CHECK(names.count(n) == 1);
        CHECK(has_kind("interval", "line"));
        CHECK_FALSE(has_kind("cantor", "domain"));
    }

    TEST_CASE("csv rendering quotes and formats numbers") {
        CsvTable t{"t", {"a", "b"}, {}};
        t.add({"x,y", "say \"hi\""});
        CHECK(t.render() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
        CHECK(format_number(0.1) == "0.1");
        CHECK(format_number(1.0) == "1");
    }
}
