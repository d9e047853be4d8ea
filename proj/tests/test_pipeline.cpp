#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "doctest.h"

#include "bn6/config.hpp"
#include "bn6/pipeline.hpp"
#include "support.hpp"

using namespace bn6;
using bn6::test::TempDir;
namespace fs = std::filesystem;

namespace {

RunConfig in(const fs::path& dir, const std::string& extra = "") {
    RunConfig c = parse_config(extra);
    c.output_dir = dir;
    return c;
}

RunOptions quiet() {
    RunOptions o;
    o.quiet = true;
    o.jobs = 4;
    return o;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("stage names in order") {
    CHECK(stage_names() ==
          std::vector<std::string>{"constants", "lambda0", "ground-state", "expansion", "branch", "report"});
}

TEST_CASE("report on an empty directory is a missing dependency") {
    TempDir td("empty");
    CHECK(run_command("report", in(td.path()), quiet()) == 2);
    CHECK(run_command("expansion", in(td.path()), quiet()) == 2);
}

TEST_CASE("unknown commands are rejected") {
    TempDir td("unknown");
    CHECK(run_command("frobnicate", in(td.path()), quiet()) != 0);
}

TEST_CASE("constants stage: closed forms and the projection slope") {
    TempDir td("constants");
    REQUIRE(run_command("constants", in(td.path()), quiet()) == 0);
    const auto j = read_json(td.path() / "constants.json");
    CHECK(j.at("alpha6").get<double>() == 24.0);
    CHECK(std::abs(j.at("projection").at("loglog_slope").get<double>() - 4.0) <= 0.3);
    for (const auto& c : j.at("checks")) CHECK(c.at("pass").get<bool>());
    CHECK(fs::exists(td.path() / "projection.csv"));
    CHECK(fs::exists(td.path() / "manifest.json"));
}

TEST_CASE("a quadrature tolerance of 1 fails the constants checks") {
    TempDir td("loose");
    CHECK(run_command("constants", in(td.path(), "quad_tol = 1\n"), quiet()) == 1);
}

TEST_CASE("stages chain through the manifest and notice deleted or foreign inputs") {
    TempDir td("chain");
    const RunConfig cfg = in(td.path());
    REQUIRE(run_command("lambda0", cfg, quiet()) == 0);
    const auto l = read_json(td.path() / "lambda0.json");
    CHECK(l.at("fixed_point_residual").get<double>() < 1e-8);
    CHECK(std::abs(l.at("lambda1_solver_gap").get<double>()) < 1e-6);

    REQUIRE(run_command("ground-state", cfg, quiet()) == 0);
    for (const char* f : {"ground_state.json", "u0.profile", "v0.profile", "spectra.csv", "assumptions.txt"})
        CHECK(fs::exists(td.path() / f));

    SUBCASE("deleted prerequisite") {
        fs::remove(td.path() / "ground_state.json");
        CHECK(run_command("expansion", cfg, quiet()) == 2);
    }
    SUBCASE("outputs of a different configuration are not reused") {
        CHECK(run_command("expansion", in(td.path(), "quad_tol = 1e-9\n"), quiet()) == 2);
    }
    SUBCASE("cached rerun reproduces the bytes") {
        const std::string before = file_sha256(td.path() / "ground_state.json");
        REQUIRE(run_command("ground-state", cfg, quiet()) == 0);
        CHECK(file_sha256(td.path() / "ground_state.json") == before);
    }
}

TEST_CASE("an eigenvalue tolerance above the spectrum is an assumption violation") {
    TempDir td("degenerate");
    const RunConfig cfg = in(td.path(), "tol_eig = 100\n");
    REQUIRE(run_command("lambda0", cfg, quiet()) == 0);
    CHECK(run_command("ground-state", cfg, quiet()) == 3);
}

}  // TEST_SUITE
