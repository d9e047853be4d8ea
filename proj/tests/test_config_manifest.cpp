#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"

#include "bn6/config.hpp"
#include "bn6/errors.hpp"
#include "bn6/manifest.hpp"
#include "bn6/svg.hpp"
#include "support.hpp"

using namespace bn6;
using bn6::test::TempDir;

TEST_SUITE("config") {

TEST_CASE("empty text gives the defaults") {
    const RunConfig c = parse_config("");
    const RunConfig d;
    CHECK(c.grid_n == 4096);
    CHECK(c.domain_radius == 1.0);
    CHECK(c.eps_sweep == d.eps_sweep);
    CHECK(canonical_text(c) == canonical_text(d));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("values, comments and lists parse") {
    const RunConfig c = parse_config("# comment\ngrid_n = 8192\nquad_tol = 1e-9  # trailing\neps_sweep = 0.01, 0.001\n");
    CHECK(c.grid_n == 8192);
    CHECK(c.quad_tol == 1e-9);
    CHECK(c.eps_sweep == std::vector<double>{0.01, 0.001});
}

TEST_CASE("unknown keys and malformed values name the key") {
    try {
        (void)parse_config("grid_m = 10\n");
        FAIL("accepted an unknown key");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid_m") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_config("grid_n = lots\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("branch_dichotomy = maybe\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("sigma = 2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("eps_sweep = 0.01, 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("degree = 2\n"), ConfigError);
}

TEST_CASE("config errors map to exit code 1") {
    const ConfigError e("x");
    CHECK(static_cast<int>(e.exit_code()) == 1);
}

TEST_CASE("digest covers numbers but not the output directory") {
    RunConfig a, b;
    b.output_dir = "/somewhere/else";
    CHECK(config_digest(a) == config_digest(b));
    b.quad_tol = 1e-9;
    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a).size() == 64);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("BN6_OUTPUT_DIR overrides the file and an empty value is ignored") {
    RunConfig c = parse_config("output_dir = from-file\n");
    ::setenv("BN6_OUTPUT_DIR", "from-env", 1);
    apply_environment(c);
    CHECK(c.output_dir == "from-env");
    ::setenv("BN6_OUTPUT_DIR", "", 1);
    RunConfig d = parse_config("output_dir = from-file\n");
    apply_environment(d);
    CHECK(d.output_dir == "from-file");
    ::unsetenv("BN6_OUTPUT_DIR");
}

TEST_CASE("derived grids") {
    const RunConfig c;
    const auto m = c.d_multiples();
    CHECK(m.front() == doctest::Approx(0.25));
    CHECK(m.back() == doctest::Approx(3.0));
    const auto t = c.branch_targets();
    REQUIRE(!t.empty());
    CHECK(t.front() < c.branch_eps0);
    CHECK(t.back() == doctest::Approx(c.branch_eps_min));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] < t[i - 1]);
}

TEST_CASE("load_config reads a file") {
    TempDir td("cfg");
    std::ofstream(td.path() / "run.cfg") << "grid_n = 1024\n";
    CHECK(load_config(td.path() / "run.cfg").grid_n == 1024);
}

}  // TEST_SUITE

TEST_SUITE("manifest") {

TEST_CASE("manifest round trip keeps stages and verdicts") {
    TempDir td("manifest");
    RunManifest m = RunManifest::for_config(RunConfig{});
    std::ofstream(td.path() / "a.csv") << "x\n1\n";
    m.record_stage("constants", td.path(), {"a.csv"}, 0.5, false);
    m.verdicts.push_back({1, "t", true, "ok"});
    m.save(td.path());
    const auto back = RunManifest::load(td.path());
    REQUIRE(back.has_value());
    CHECK(back->config_digest == m.config_digest);
    CHECK(back->version == artifact_version());
    REQUIRE(back->stages.count("constants") == 1);
    CHECK(back->stages.at("constants").files.at(0).sha256 == file_sha256(td.path() / "a.csv"));
    CHECK(back->verdicts.at(0).measured == "ok");
    CHECK(!RunManifest::load(td.path() / "nowhere").has_value());
}

TEST_CASE("reproduced flag follows the latest rewrite") {
    TempDir td("repro");
    RunManifest m = RunManifest::for_config(RunConfig{});
    std::ofstream(td.path() / "a.csv") << "1\n";
    m.record_stage("s", td.path(), {"a.csv"}, 0.0, false);
    CHECK(!m.stages.at("s").files[0].reproduced.has_value());
    m.record_stage("s", td.path(), {"a.csv"}, 0.0, false);
    CHECK(m.stages.at("s").files[0].reproduced == true);
    std::ofstream(td.path() / "a.csv") << "2\n";
    m.record_stage("s", td.path(), {"a.csv"}, 0.0, false);
    CHECK(m.stages.at("s").files[0].reproduced == false);
    m.record_stage("s", td.path(), {"a.csv"}, 0.0, false);
    CHECK(m.stages.at("s").files[0].reproduced == true);
}

TEST_CASE("svg output is deterministic and well formed") {
    PlotSpec p;
    p.title = "a < b";
    p.logx = true;
    p.series.push_back({"s", {{1e-3, 1.0}, {1e-2, 2.0}, {0.0, 3.0}}, true, "#000", false});
    const std::string a = render_svg(p), b = render_svg(p);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("a &lt; b") != std::string::npos);
}

}  // TEST_SUITE
