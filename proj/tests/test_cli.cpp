#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chainreb/circle.hpp"
#include "chainreb/cli_lib.hpp"

#include <filesystem>
#include <fstream>

using namespace chainreb;
using cli::Config;
using cli::RunResult;
using cli::run_command;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream os(path);
    os << content;
    return path.string();
}

} // namespace

TEST_CASE("config parsing") {
    Config cfg = Config::parse_text("# comment\nfamily = circle\n n_max =  64\n");
    CHECK(cfg.require("family") == "circle");
    CHECK(cfg.get_int("n_max", 0) == 64);
    CHECK(cfg.get("missing", "fallback") == "fallback");
    CHECK_THROWS_WITH_AS(Config::parse_text("family = circle\nbroken line\n"),
                         "config line 2: expected key = value", parse_error);
}

TEST_CASE("homology verb reads the chain format") {
    ChainComplex c = circle_complex(6);
    std::string file = write_temp("chainreb_cli_circle.chain", [&] {
        std::stringstream ss;
        c.write(ss);
        return ss.str();
    }());
    RunResult r = run_command({"homology", file});
    CHECK(r.exit_code == 0);
    CHECK(r.report.find("schema: chainreb-report-v1") != std::string::npos);
    CHECK(r.report.find("file," + file + ",1,") != std::string::npos); // degree-0 and 1 rows
}

TEST_CASE("rebuild verbs verify and report") {
    SUBCASE("circle") {
        RunResult r = run_command({"rebuild", "circle", "64", "4"});
        CHECK(r.exit_code == 0);
        CHECK(r.report.find("circle,64Z,64,0,64,16") != std::string::npos);
    }
    SUBCASE("torus") {
        RunResult r = run_command({"rebuild", "torus", "2", "5"});
        CHECK(r.exit_code == 0);
        CHECK(r.report.find("torus,diag(5)^2,25,1,") != std::string::npos);
    }
    SUBCASE("heisenberg with serialization") {
        auto out = std::filesystem::temp_directory_path() / "chainreb_heis.reb";
        RunResult r = run_command({"rebuild", "heisenberg", "2", "--out", out.string()});
        CHECK(r.exit_code == 0);
        std::ifstream is(out);
        Rebuilding back = read_rebuilding(is);
        CHECK(verify(back).empty());
        CHECK(back.source.dim(0) == 8);
    }
    SUBCASE("usage errors exit 2") {
        CHECK(run_command({"rebuild", "circle"}).exit_code == 2);
        CHECK(run_command({"rebuild", "nonsense", "3"}).exit_code == 2);
        CHECK(run_command({"unknown-verb"}).exit_code == 2);
    }
}

TEST_CASE("sweep reports are deterministic and sane") {
    std::string cfg_file = write_temp("chainreb_sweep.cfg",
                                      "family = circle\nn_min = 8\nn_max = 64\nT = 4\n");
    RunResult a = run_command({"sweep", cfg_file});
    RunResult b = run_command({"sweep", cfg_file});
    CHECK(a.exit_code == 0);
    CHECK(a.report == b.report); // byte-identical reruns
    // circle rows: betti_f2 = 1 in both degrees, zero torsion
    CHECK(a.report.find("circle,8Z,8,0,8,") != std::string::npos);
    CHECK(a.report.find(",cap") == std::string::npos);

    std::string heis_file = write_temp("chainreb_heis.cfg", "family = heisenberg\nn_max = 3\n");
    RunResult h1 = run_command({"sweep", heis_file});
    RunResult h2 = run_command({"sweep", heis_file});
    CHECK(h1.exit_code == 0);
    CHECK(h1.report == h2.report);
    CHECK(h1.report.find("heis(2),8,1,") != std::string::npos);
    CHECK(h1.report.find("t=2") != std::string::npos); // the N=2 torsion factor
}

TEST_CASE("json format round trips through the same data") {
    std::string cfg_file =
        write_temp("chainreb_sweep_json.cfg", "family = circle\nn_min = 8\nn_max = 16\nT = 2\n");
    RunResult csv = run_command({"sweep", cfg_file});
    RunResult json = run_command({"sweep", cfg_file, "--format", "json"});
    CHECK(json.exit_code == 0);
    CHECK(json.report.find("\"family\": \"circle\"") != std::string::npos);
    CHECK(json.report != csv.report);
    RunResult json2 = run_command({"sweep", cfg_file, "--format", "json"});
    CHECK(json.report == json2.report);
}

TEST_CASE("gabber fuzz passes with zero failures") {
    std::string cfg_file = write_temp("chainreb_fuzz.cfg",
                                      "seed = 1\ncount = 60\nmatrix_count = 20\nsize_max = 18\n");
    RunResult r = run_command({"gabber-fuzz", cfg_file});
    CHECK(r.exit_code == 0);
    CHECK(r.report.find("FAIL") == std::string::npos);
    RunResult again = run_command({"gabber-fuzz", cfg_file});
    CHECK(r.report == again.report);
    // seed is mandatory for the randomized family
    std::string no_seed = write_temp("chainreb_fuzz2.cfg", "count = 5\n");
    CHECK(run_command({"gabber-fuzz", no_seed}).exit_code == 2);
}

TEST_CASE("farber verb validates the transfer inequality") {
    std::string cfg_file = write_temp("chainreb_farber.cfg", "n_max = 4\nseed = 7\n");
    RunResult r = run_command({"farber", cfg_file});
    CHECK(r.exit_code == 0);
    CHECK(r.report.find("FAIL") == std::string::npos);
    RunResult again = run_command({"farber", cfg_file});
    CHECK(r.report == again.report);
}

TEST_CASE("quality regression against the frozen limits") {
    std::string cfg_file = write_temp("chainreb_quality.cfg", "torus.n = 10\nheisenberg.n_max = 4\n");
    RunResult r = run_command({"quality-regression", cfg_file});
    CHECK(r.exit_code == 0);
    CHECK(r.report.find("FAIL") == std::string::npos);
}

TEST_CASE("caps flag forces cap-exceeded handling") {
    std::string cfg_file = write_temp("chainreb_capped.cfg",
                                      "family = heisenberg\nn_min = 2\nn_max = 2\n");
    RunResult r = run_command({"sweep", cfg_file, "--caps", "bits=4"});
    // with a 4-bit entry cap the N=2 row must be flagged, not crash
    CHECK(r.report.find("cap") != std::string::npos);
}
