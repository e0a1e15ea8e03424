#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rislab/errors.hpp"
#include "rislab/link_analysis.hpp"
#include "rislab/result_table.hpp"
#include "rislab/scenario.hpp"

using namespace rislab;
namespace fs = std::filesystem;

namespace {

const fs::path kExamples = RISLAB_EXAMPLES_DIR;

ResultTable sample_table() {
    ResultTable t({"name", "count", "value", "empty"});
    t.add_row({std::string("plain"), std::int64_t{3}, 0.1, std::monostate{}});
    t.add_row({std::string("with, comma \"quoted\""), std::int64_t{-7}, 1.0 / 3.0, 2.5e-300});
    t.add_row({std::string("specials"), std::int64_t{0}, std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()});
    t.add_row({std::string("tiny"), std::int64_t{1}, 4.9406564584124654e-324, 1.7976931348623157e308});
    t.metadata.workflow = "test";
    t.metadata.seed = 17;
    t.metadata.config_hash = "0123456789abcdef";
    return t;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ConfigurationError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("rislab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("result_table") {
    TEST_CASE("empty table is a header-only CSV") {
        CHECK(to_csv(ResultTable({"a", "b"})) == "a,b\n");
    }

    TEST_CASE("rows must match the header") {
        ResultTable t({"a", "b"});
        CHECK_THROWS(t.add_row({1.0}));
    }

    TEST_CASE("CSV round trip is bit-exact") {
        const auto t = sample_table();
        std::istringstream in(to_csv(t));
        const auto back = parse_csv(in);
        CHECK(back.columns() == t.columns());
        REQUIRE(back.row_count() == t.row_count());
        for (std::size_t r = 0; r < t.row_count(); ++r) {
            for (std::size_t c = 0; c < t.columns().size(); ++c) {
                INFO("row " << r << ", column " << c);
                CHECK(back.rows()[r][c] == t.rows()[r][c]);
            }
        }
    }

    TEST_CASE("JSON round trip is bit-exact and carries metadata") {
        const auto t = sample_table();
        const auto doc = to_json(t);
        REQUIRE(doc.contains("metadata"));
        CHECK(doc["metadata"]["version"] == kToolkitVersion);
        CHECK(doc["metadata"]["seed"] == 17);
        CHECK(doc["metadata"]["config_hash"] == "0123456789abcdef");
        const auto back = table_from_json(nlohmann::json::parse(doc.dump()));
        CHECK(back.columns() == t.columns());
        CHECK(back.rows() == t.rows());
        CHECK(back.metadata.seed == 17u);
    }

    TEST_CASE("doubles print with 17 significant digits") {
        CHECK(format_cell(0.1) == "0.10000000000000001");
        CHECK(format_cell(std::int64_t{42}) == "42");
        CHECK(format_cell(std::monostate{}).empty());
        CHECK(format_cell(std::nan("")) == "nan");
    }

    TEST_CASE("emit writes the table and its run record") {
        const auto dir = scratch("emit");
        const auto t = sample_table();
        const auto csv = emit(t, OutputFormat::Csv, dir / "nested", "run");
        REQUIRE(csv.size() == 2u);
        std::ifstream in(csv[0]);
        std::stringstream text;
        text << in.rdbuf();
        CHECK(text.str() == to_csv(t));
        std::ifstream meta(csv[1]);
        CHECK(nlohmann::json::parse(meta)["config_hash"] == "0123456789abcdef");

        const auto json = emit(t, OutputFormat::Json, dir, "run");
        REQUIRE(json.size() == 1u);
        std::ifstream jin(json[0]);
        CHECK(table_from_json(nlohmann::json::parse(jin)).rows() == t.rows());
        fs::remove_all(dir);
    }

    TEST_CASE("unwritable output path raises an I/O error") {
        const auto dir = scratch("blocked");
        fs::create_directories(dir);
        std::ofstream(dir / "file") << "x";
        CHECK_THROWS_AS(emit(sample_table(), OutputFormat::Csv, dir / "file" / "sub", "run"), IoError);
        fs::create_directories(dir / "taken.csv");
        CHECK_THROWS_AS(emit(sample_table(), OutputFormat::Csv, dir, "taken"), IoError);
        fs::remove_all(dir);
    }

    TEST_CASE("FNV-1a reference values") {
        CHECK(fnv1a_hex("") == "cbf29ce484222325");
        CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
        CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
    }
}

TEST_SUITE("scenario") {
    TEST_CASE("unknown keys are rejected with their line") {
        const std::string text = "{\n  \"workflow\": \"coupling\",\n  \"n_side\": 4,\n  \"spacing\": 0.5,\n  \"colour\": 1\n}\n";
        const auto msg = error_of(text);
        CHECK(msg.find("cfg.json:5:") != std::string::npos);
        CHECK(msg.find("colour") != std::string::npos);
        CHECK(msg.find("allowed") != std::string::npos);
    }

    TEST_CASE("malformed JSON reports a line") {
        const auto msg = error_of("{\n  \"workflow\": \"coupling\",\n  \"n_side\": 4,,\n}\n");
        CHECK(msg.find("cfg.json:3:") != std::string::npos);
        CHECK(msg.find("malformed") != std::string::npos);
    }

    TEST_CASE("values are validated") {
        CHECK(error_of(R"({"workflow": "coupling", "n_side": 0, "spacing": 0.5})").find("n_side") != std::string::npos);
        CHECK(error_of(R"({"workflow": "warp", "n_side": 2})").find("unknown workflow") != std::string::npos);
        CHECK(error_of(R"({"n_side": 2})").find("workflow") != std::string::npos);
        CHECK(error_of(R"({"workflow": "estimate", "ports": [12], "sparsity": 1, "snr_db": [0], "trials": 5})")
                  .find("powers of two") != std::string::npos);
        CHECK_FALSE(error_of(R"({"workflow": "routing", "n_side": 4, "spacing": 0.5, "kind": "redirective",
                                "routes": [{"incident_beam": 1, "outgoing_beam": 4},
                                           {"incident_beam": 4, "outgoing_beam": 5}]})")
                        .empty());
        CHECK_FALSE(error_of(R"({"workflow": "scatter", "n_side": 2, "spacing": 0.5,
                                "load": {"kind": "phased", "phases": [0, 1]},
                                "incident": {"theta": 0.1}, "observe": [{"theta": 0.2}]})")
                        .empty());
        CHECK_THROWS_AS(parse_config(R"({"workflow": "coupling", "n_side": 4, "spacing": 0.5})", "x",
                                     Workflow::Overhead),
                        ConfigurationError);
    }

    TEST_CASE("bundled configs parse and run") {
        int count = 0;
        for (const auto& entry : fs::directory_iterator(kExamples)) {
            if (entry.path().extension() != ".json") continue;
            ++count;
            INFO(entry.path().string());
            ScenarioConfig cfg;
            REQUIRE_NOTHROW(cfg = load_config(entry.path()));
            if (cfg.workflow == Workflow::Estimate || cfg.workflow == Workflow::Routing) continue;
            CHECK(run_scenario(cfg).row_count() > 0u);
        }
        CHECK(count >= 6);
    }

    TEST_CASE("coupling sample lists n_side^2 eigenvalues") {
        const auto cfg = load_config(kExamples / "coupling_16.json", Workflow::Coupling);
        const auto t = run_scenario(cfg);
        CHECK(t.row_count() == 16u);
        CHECK(t.metadata.workflow == "coupling");
        CHECK(t.metadata.config_hash == config_hash(cfg));
    }

    TEST_CASE("overhead sweep matches direct library calls") {
        const auto cfg = load_config(kExamples / "overhead_sweep.json");
        const auto t = run_scenario(cfg);
        const auto& spec = std::get<OverheadScenario>(cfg.spec);
        REQUIRE(t.row_count() == spec.access_gain.size());
        for (std::size_t i = 0; i < t.row_count(); ++i) {
            auto p = spec.params;
            p.access_gain = spec.access_gain[i];
            const auto& row = t.rows()[i];
            CHECK(std::get<double>(row[1]) == rate_redirective(p).rate);
            CHECK(std::get<double>(row[3]) == rate_reflective(p).rate);
            CHECK(std::get<std::int64_t>(row[4]) == (rate_reflective(p).overhead_saturated ? 1 : 0));
        }
    }

    TEST_CASE("seed override changes the hash but not the timestamp-free output") {
        auto cfg = load_config(kExamples / "estimate.json");
        const auto before = config_hash(cfg);
        override_seed(cfg, 5);
        CHECK(cfg.seed == 5u);
        CHECK(config_hash(cfg) != before);
        CHECK(cfg.document["seed"] == 5);
    }

    TEST_CASE("runs are deterministic across thread counts") {
        auto cfg = parse_config(R"({"workflow": "estimate", "ports": [8, 16], "sparsity": 2,
                                    "snr_db": [0, 10], "trials": 40, "seed": 3})");
        CHECK(to_csv(run_scenario(cfg, 1)) == to_csv(run_scenario(cfg, 4)));
        auto scatter = load_config(kExamples / "scatter_phased.json");
        CHECK(to_csv(run_scenario(scatter, 1)) == to_csv(run_scenario(scatter, 3)));
    }

    TEST_CASE("unstable loads surface as numerical errors") {
        const auto cfg = parse_config(R"({"workflow": "scatter", "n_side": 4, "spacing": 0.5,
            "load": {"kind": "active", "gain": 10, "inner": {"kind": "phased", "phases": [0]}},
            "incident": {"theta": 0.0}, "observe": [{"theta": 0.0}], "models": ["exact"]})");
        CHECK_THROWS_AS(run_scenario(cfg), InstabilityError);
    }
}
