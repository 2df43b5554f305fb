#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// exit contract of the binary: 0 all verdicts hold, 1 a verdict failed,
// 2 config/usage error, 3 hypothesis or solver failure

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_root() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "rslab_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path scratch(const std::string& tag) {
    fs::path p = scratch_root() / tag;
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

long line_count(const std::string& s) {
    long n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RSLAB_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

json read_report(const fs::path& dir) { return json::parse(read_file(dir / "report.json")); }

const char* kSolveZeroForcing = R"({
  "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
  "h": 0.25, "p": 2.0, "c0": 0.5, "b": 0.1, "g": 0.0,
  "profile": {"family": "constant", "amplitude": 1.0},
  "measure": [{"location": [0.125, 0.125, 0.125], "weight": 0.1}],
  "require_admissible": true
})";

std::string ensemble_config(const std::string& extra = "") {
    return std::string(R"({
  "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
  "h": 0.25, "p": 2.0, "c0": 0.5, "b": 0.1, "g": 0.02,
  "profile": {"family": "constant", "amplitude": 0.02},
  "model": {"kind": "alloy", "lattice_spacing": 0.5,
            "charge": {"kind": "uniform", "lo": 0.0, "hi": 0.4}},
  "n_samples": 12, "seed": 4242, "require_all_admissible": true)") +
           extra + "\n}";
}

}  // namespace

TEST_CASE("solve: zero forcing fixes the zero field and all verdicts hold") {
    const fs::path dir = scratch("solve_zero");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, kSolveZeroForcing);
    const int rc = run_cli("solve --config " + cfg.string() + " --out " + dir.string());
    CHECK(rc == 0);

    const json report = read_report(dir);
    CHECK(report.at("pass").get<bool>());
    CHECK(report.at("command").get<std::string>() == "solve");
    CHECK(report.at("results").at("admissible").get<bool>());
    CHECK(report.at("results").at("sup_norm").get<double>() == 0.0);
    CHECK(report.at("results").at("residual").get<double>() == 0.0);
    for (const auto& [name, ok] : report.at("verdicts").items()) {
        (void)name;
        CHECK(ok.get<bool>());
    }

    const std::string field = read_file(dir / "field.csv");
    CHECK(field.rfind("x0,x1,x2,value\n", 0) == 0);
}

TEST_CASE("config mistakes exit with the usage code") {
    const fs::path dir = scratch("bad_cfg");

    // exponent at the forbidden boundary
    std::string bad_p = kSolveZeroForcing;
    const size_t at = bad_p.find("\"p\": 2.0");
    REQUIRE(at != std::string::npos);
    bad_p.replace(at, 8, "\"p\": 0.5");
    write_file(dir / "bad_p.json", bad_p);
    CHECK(run_cli("solve --config " + (dir / "bad_p.json").string() + " --out " + dir.string()) == 2);

    // unknown key
    std::string extra_key = kSolveZeroForcing;
    extra_key.insert(extra_key.rfind('}'), ", \"bogus\": 1\n");
    write_file(dir / "extra.json", extra_key);
    CHECK(run_cli("solve --config " + (dir / "extra.json").string() + " --out " + dir.string()) == 2);

    // measure and model at once
    std::string both = kSolveZeroForcing;
    both.insert(both.rfind('}'),
                ", \"seed\": 1, \"model\": {\"kind\": \"points\", "
                "\"count\": {\"kind\": \"deterministic\", \"value\": 0}}\n");
    write_file(dir / "both.json", both);
    CHECK(run_cli("solve --config " + (dir / "both.json").string() + " --out " + dir.string()) == 2);

    // missing config file, unknown command, bare invocation
    CHECK(run_cli("solve --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("frobnicate --config " + (dir / "bad_p.json").string()) == 2);
    CHECK(run_cli("") == 2);

    // config pinned to a different command than the invocation
    std::string pinned = kSolveZeroForcing;
    pinned.insert(pinned.rfind('}'), ", \"command\": \"ensemble\"\n");
    write_file(dir / "pinned.json", pinned);
    CHECK(run_cli("solve --config " + (dir / "pinned.json").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("kernel self-check passes on a refining grid pair") {
    const fs::path dir = scratch("green");
    write_file(dir / "config.json", R"({
      "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
      "h": 0.125, "h_refined": 0.1
    })");
    const int rc = run_cli("green-check --config " + (dir / "config.json").string() + " --out " +
                           dir.string());
    CHECK(rc == 0);
    const json report = read_report(dir);
    CHECK(report.at("pass").get<bool>());
    const json& verdicts = report.at("verdicts");
    CHECK(verdicts.at("sup_rel_error_within_3pc").get<bool>());
    CHECK(verdicts.at("error_decreases_under_refinement").get<bool>());
    CHECK(verdicts.at("row_sums_within_l0_slack").get<bool>());
}

TEST_CASE("ensemble runs are reproducible and indifferent to the worker count") {
    const fs::path dir = scratch("ens");
    write_file(dir / "config.json", ensemble_config());
    const std::string base = "ensemble --config " + (dir / "config.json").string();

    const fs::path out1 = scratch("ens/run1");
    const fs::path out2 = scratch("ens/run2");
    const fs::path out4 = scratch("ens/threads4");
    CHECK(run_cli(base + " --out " + out1.string()) == 0);
    CHECK(run_cli(base + " --out " + out2.string()) == 0);
    CHECK(run_cli(base + " --threads 4 --out " + out4.string()) == 0);

    const std::string csv1 = read_file(out1 / "samples.csv");
    CHECK(csv1 == read_file(out2 / "samples.csv"));
    CHECK(csv1 == read_file(out4 / "samples.csv"));
    CHECK(csv1.rfind("index,tv,tau,admissible,sup_norm,iterations,residual\n", 0) == 0);
    CHECK(line_count(csv1) == 13);  // header + 12 samples

    const json report = read_report(out1);
    CHECK(report.at("pass").get<bool>());
    CHECK(report.at("results").at("admissible_fraction").get<double>() == 1.0);
    CHECK(report.at("results").at("bounds_ok").get<bool>());

    // a different seed draws different samples yet keeps every certificate
    const fs::path out_seed = scratch("ens/seed777");
    CHECK(run_cli(base + " --seed 777 --out " + out_seed.string()) == 0);
    CHECK(read_file(out_seed / "samples.csv") != csv1);
}

TEST_CASE("ensemble moment verdicts") {
    const fs::path dir = scratch("moments");
    write_file(dir / "config.json", ensemble_config(", \"moments\": [1, 2]"));
    CHECK(run_cli("ensemble --config " + (dir / "config.json").string() + " --out " +
                  dir.string()) == 0);
    const json verdicts = read_report(dir).at("verdicts");
    CHECK(verdicts.at("moment1_empirical_within").get<bool>());
    CHECK(verdicts.at("moment1_series_matches_closed").get<bool>());
    CHECK(verdicts.at("moment2_empirical_within").get<bool>());
    CHECK(verdicts.at("moment2_series_matches_closed").get<bool>());
}

TEST_CASE("command-line overrides rewrite the effective config") {
    const fs::path dir = scratch("overrides");
    write_file(dir / "config.json", ensemble_config());
    const std::string base = "ensemble --config " + (dir / "config.json").string();

    const fs::path out_n = scratch("overrides/n5");
    CHECK(run_cli(base + " --n-samples 5 --out " + out_n.string()) == 0);
    CHECK(line_count(read_file(out_n / "samples.csv")) == 6);

    const fs::path out_h = scratch("overrides/h05");
    CHECK(run_cli(base + " --h 0.5 --out " + out_h.string()) == 0);
    const json report = read_report(out_h);
    CHECK(report.at("config").at("h").get<double>() == 0.5);

    // commands with no grid or sample knob refuse the override
    const fs::path gdir = scratch("overrides/green");
    write_file(gdir / "config.json", R"({
      "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
      "h": 0.5, "h_refined": 0.25
    })");
    const std::string green = "green-check --config " + (gdir / "config.json").string();
    CHECK(run_cli(green + " --n-samples 3 --out " + gdir.string()) == 2);
}

TEST_CASE("violated hypotheses use the dedicated exit code") {
    const fs::path dir = scratch("lln_unbounded");
    write_file(dir / "config.json", R"({
      "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
      "h": 0.25, "p": 2.0, "c0": 0.5, "b": 0.1, "g": 0.02,
      "profile": {"family": "constant", "amplitude": 0.02},
      "model": {"kind": "points", "count": {"kind": "poisson", "mean": 2.0}},
      "k": 4, "delta": 0.5, "trials": 4, "seed": 1
    })");
    CHECK(run_cli("lln --config " + (dir / "config.json").string() + " --out " + dir.string()) ==
          3);
}

TEST_CASE("series exceedance command verifies the designed decay") {
    const fs::path dir = scratch("series");
    write_file(dir / "config.json", R"({
      "domain": {"dim": 3, "center": [0.0, 0.0, 0.0], "radius": 1.0},
      "profile": {"family": "constant", "amplitude": 1.0},
      "model": {"kind": "bernoulli-exceedance", "charge": 0.375, "prob_base": 0.5,
                "length": 30, "location": [0.1, 0.0, 0.0]},
      "c_tilde": 0.3, "k_max": 5, "n_samples": 400, "seed": 97,
      "expected_partial_sum": 0.96875, "require_tail_one": true
    })");
    const int rc = run_cli("borel-cantelli --config " + (dir / "config.json").string() +
                           " --out " + dir.string());
    CHECK(rc == 0);
    const json report = read_report(dir);
    CHECK(report.at("verdicts").at("partial_sum_within_3se").get<bool>());
    CHECK(report.at("verdicts").at("tail_fraction_one").get<bool>());
    const std::string csv = read_file(dir / "sums.csv");
    CHECK(csv.rfind("k,exceed_prob,partial_sum\n", 0) == 0);
    CHECK(line_count(csv) == 6);  // header + one row per level
}
