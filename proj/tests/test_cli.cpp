#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "aqbound/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(AQB_FIXTURE_DIR) + "/" + name;
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string("'") + AQB_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "aqb_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const std::string& name, const json& cfg) {
    fs::path path = scratch_dir() / name;
    aqb::write_file_atomic(path.string(), cfg.dump(2));
    return path.string();
}

json golden_config() {
    json cfg;
    cfg["base"] = {{"csv", fixture("stargazer_base.csv")},
                   {"schema", fixture("stargazer_base.schema.json")}};
    cfg["augmenting"] = {{"csv", fixture("stargazer_aug.csv")},
                         {"schema", fixture("stargazer_aug.schema.json")}};
    cfg["similarity"] = {{"metric", "jaccard"},
                         {"threshold", 0.3},
                         {"base_attr", "Product_Name"},
                         {"aug_attr", "Product_Tag"}};
    cfg["cap"] = {{"mode", "explicit"}, {"value", 2}};
    cfg["query"] =
        "SELECT SUM(N_Complaints) WHERE Product_Name CONTAINS 'Premier Pro' AND Price >= 100";
    cfg["method"] = "ga";
    return cfg;
}

}  // namespace

TEST_CASE("bound: the catalog example prints [33, 84] and exits 0") {
    std::string cfg = write_config("golden.json", golden_config());
    RunResult r = run_cli("bound --config '" + cfg + "'");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.output);
    CHECK(report["l"] == 33.0);
    CHECK(report["u"] == 84.0);
    CHECK(report["cap"] == 2);
    CHECK(report["method"] == "ga");
    CHECK(report["nominal"] == 33.0);
    CHECK(report["relative_error"] == doctest::Approx((84.0 - 33.0) / 33.0));
    CHECK(report["diagnostics"]["feasible_min"] == true);
}

TEST_CASE("bound: flags override the config") {
    std::string cfg = write_config("golden.json", golden_config());
    RunResult capped = run_cli("bound --config '" + cfg +
                               "' --method max_sum_c --cap 1 --query "
                               "\"SELECT SUM(N_Complaints) WHERE TRUE\"");
    REQUIRE(capped.exit_code == 0);
    json capped_report = json::parse(capped.output);
    CHECK(capped_report["l"] == 55.0);
    CHECK(capped_report["u"] == 119.0);

    RunResult open = run_cli("bound --config '" + cfg +
                             "' --method max_sum --cap 1 --query "
                             "\"SELECT SUM(N_Complaints) WHERE TRUE\"");
    REQUIRE(open.exit_code == 0);
    json open_report = json::parse(open.output);
    CHECK(open_report["l"] == 55.0);
    CHECK(open_report["u"] == 221.0);
}

TEST_CASE("bound: an infeasible minimum reports a null lower bound and exits 2") {
    std::string cfg = write_config("golden.json", golden_config());
    RunResult r = run_cli("bound --config '" + cfg + "' --cap 1");
    CHECK(r.exit_code == 2);
    json report = json::parse(r.output);
    CHECK(report["l"].is_null());
    CHECK(report["u"] == 51.0);
    CHECK(report["diagnostics"]["feasible_min"] == false);
}

TEST_CASE("oracle: exhaustive reference agrees with the bound on the catalog") {
    std::string cfg = write_config("golden.json", golden_config());
    RunResult r = run_cli("oracle --config '" + cfg + "'");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.output);
    CHECK(report["l"] == 33.0);
    CHECK(report["u"] == 84.0);
    CHECK(report["method"] == "oracle");
}

TEST_CASE("errors: bad query exits 1 and names the failure") {
    std::string cfg = write_config("golden.json", golden_config());
    RunResult r = run_cli("bound --config '" + cfg + "' --query 'SELECT NOPE('");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("query_syntax") != std::string::npos);

    RunResult unknown = run_cli("bound --config '" + cfg +
                                "' --query 'SELECT SUM(No_Such) WHERE TRUE'");
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.output.find("unknown_column") != std::string::npos);
}

TEST_CASE("errors: missing config file and conflicting flags are rejected") {
    RunResult missing = run_cli("bound --config /nonexistent/never.json");
    CHECK(missing.exit_code != 0);

    std::string cfg = write_config("golden.json", golden_config());
    RunResult conflict = run_cli("bound --config '" + cfg + "' --cap 2 --uncapped");
    CHECK(conflict.exit_code != 0);

    RunResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("bound") != std::string::npos);
}

TEST_CASE("synth: writes table, schema and truth; identical bytes per seed") {
    fs::path out1 = scratch_dir() / "synth_run1";
    fs::path out2 = scratch_dir() / "synth_run2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    json cfg = golden_config();
    cfg.erase("augmenting");
    cfg.erase("similarity");
    cfg.erase("query");
    cfg["synth"] = {{"n_max", 2}, {"mode", "balanced"}, {"seed", 5}};
    cfg["out_dir"] = out1.string();
    std::string path1 = write_config("synth1.json", cfg);
    RunResult r1 = run_cli("synth --config '" + path1 + "'");
    REQUIRE(r1.exit_code == 0);
    CHECK(fs::exists(out1 / "synthetic.csv"));
    CHECK(fs::exists(out1 / "synthetic.schema.json"));
    CHECK(fs::exists(out1 / "truth.csv"));

    cfg["out_dir"] = out2.string();
    std::string path2 = write_config("synth2.json", cfg);
    RunResult r2 = run_cli("synth --config '" + path2 + "'");
    REQUIRE(r2.exit_code == 0);
    CHECK(aqb::read_file((out1 / "synthetic.csv").string()) ==
          aqb::read_file((out2 / "synthetic.csv").string()));
    CHECK(aqb::read_file((out1 / "truth.csv").string()) ==
          aqb::read_file((out2 / "truth.csv").string()));

    // Six generated rows: two per catalog product.
    aqb::CsvTable table = aqb::read_csv_file((out1 / "synthetic.csv").string());
    CHECK(table.rows.size() == 6);
}

TEST_CASE("eval: full loop over a synthetic dataset bounds every ga record") {
    fs::path synth_dir = scratch_dir() / "eval_synth";
    fs::path eval_dir = scratch_dir() / "eval_out";
    fs::remove_all(synth_dir);
    fs::remove_all(eval_dir);

    json synth_cfg = golden_config();
    synth_cfg.erase("augmenting");
    synth_cfg.erase("similarity");
    synth_cfg.erase("query");
    synth_cfg["synth"] = {{"n_max", 2}, {"mode", "balanced"}, {"seed", 12}};
    synth_cfg["out_dir"] = synth_dir.string();
    REQUIRE(run_cli("synth --config '" + write_config("eval_synth.json", synth_cfg) + "'")
                .exit_code == 0);

    json eval_cfg;
    eval_cfg["base"] = {{"csv", fixture("stargazer_base.csv")},
                        {"schema", fixture("stargazer_base.schema.json")}};
    eval_cfg["augmenting"] = {{"csv", (synth_dir / "synthetic.csv").string()},
                              {"schema", (synth_dir / "synthetic.schema.json").string()}};
    eval_cfg["similarity"] = {{"metric", "edit_distance"},
                              {"threshold", 3},
                              {"base_attr", "Product_Name"},
                              {"aug_attr", "Product_Name"}};
    eval_cfg["truth_csv"] = (synth_dir / "truth.csv").string();
    eval_cfg["out_dir"] = eval_dir.string();
    eval_cfg["eval"] = {{"queries", {"SELECT SUM(value) WHERE TRUE", "SELECT COUNT(1) WHERE TRUE"}},
                        {"methods", {"ga", "max_sum"}}};
    RunResult r = run_cli("eval --config '" + write_config("eval.json", eval_cfg) + "'");
    REQUIRE(r.exit_code == 0);

    aqb::CsvTable records = aqb::read_csv_file((eval_dir / "records.csv").string());
    CHECK(records.rows.size() == 4);  // 2 queries x 2 methods

    json summary = json::parse(aqb::read_file((eval_dir / "summary.json").string()));
    REQUIRE(summary.contains("ga"));
    CHECK(summary["ga"]["failure_to_bound_rate"] == 0.0);
    CHECK(summary["ga"]["records"] == 2);
}
