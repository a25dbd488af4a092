#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support/fixtures.hpp"

#include <json.hpp>

#include "anosov/errors.hpp"
#include "anosov/map.hpp"
#include "runner.hpp"

using namespace anosov;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(bool(f));
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "anosov_test_cli" / leaf;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config text parses keys, comments, matrices and modes") {
    lab::ScenarioConfig c = lab::parse_config_text(
        "# scenario\n"
        "matrix = 2 1 0 ; 1 2 1 ; 0 1 1   # reference\n"
        "epsilon = 0.05\n"
        "mode = k 0 1 1 sin 1 0 0\n"
        "mode = k 1 0 0 cos 0.25 -0.5 0 sin 0 0 0.125\n"
        "tag = uu\n"
        "base = 0.1 0.2 0.3\n"
        "stages = 9\n"
        "eps_schedule = 0.1 0.05\n"
        "seed = 42\n");
    CHECK(c.matrix.m[0][0] == 2);
    CHECK(c.matrix.m[2][1] == 1);
    CHECK(c.epsilon == 0.05);
    REQUIRE(c.modes.size() == 2);
    CHECK(c.modes[0].k[1] == 1);
    CHECK(c.modes[0].sin_amp.x == 1.0);
    CHECK(c.modes[1].cos_amp.y == -0.5);
    CHECK(c.modes[1].sin_amp.z == 0.125);
    CHECK(c.tag == "uu");
    CHECK(c.base.y == 0.2);
    CHECK(c.stages == 9);
    REQUIRE(c.eps_schedule.size() == 2);
    CHECK(c.eps_schedule[1] == 0.05);
    CHECK(c.seed_set);
    CHECK(c.seed == 42);

    // Unset keys keep their defaults.
    CHECK(c.grid == 16);
    CHECK(c.samples == 8192);
    CHECK(c.family == "none");
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS(lab::parse_config_text("stages 9\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("stages = nine\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("stages = 9.5\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("stages = 9x\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("matrix = 2 1 0 ; 1 2 1\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("matrix = 2 1 ; 1 2 ; 0 1\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("base = 0.1 0.2\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("mode = cos 1 0 0\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("mode = k 1 0\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("mode = k 1 0 0 tan 1 0 0\n"), ConfigError);
    CHECK_THROWS_AS(lab::parse_config_text("eps_schedule =\n"), ConfigError);
    CHECK_THROWS_AS(lab::load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("canonical serialization round-trips") {
    lab::ScenarioConfig c = lab::parse_config_text(
        "epsilon = 0.03\n"
        "mode = k 0 1 0 sin 1 0 0\n"
        "seed = 7\n");
    std::string canon = lab::canonical_config(c);
    lab::ScenarioConfig back = lab::parse_config_text(canon);
    back.seed_set = true;
    CHECK(lab::canonical_config(back) == canon);
    CHECK(canon.find("matrix = 2 1 0 ; 1 2 1 ; 0 1 1") != std::string::npos);
    CHECK(canon.find("seed = 7") != std::string::npos);
}

TEST_CASE("run_verb demands a seed and a known verb") {
    lab::ScenarioConfig c;
    c.matrix = fixtures::reference_matrix();
    CHECK_THROWS_AS(lab::run_verb("spectrum", c, scratch("noseed").string()), ConfigError);
    c.seed = 1;
    c.seed_set = true;
    CHECK_THROWS_AS(lab::run_verb("dance", c, scratch("verb").string()), ConfigError);
}

TEST_CASE("spectrum verb writes consistent artifacts") {
    lab::ScenarioConfig c;
    c.matrix = fixtures::reference_matrix();
    c.seed = 1;
    c.seed_set = true;
    fs::path out = scratch("spectrum");
    lab::RunResult res = lab::run_verb("spectrum", c, out.string());

    for (const char* name : {"spectrum.csv", "certificate.csv", "summary.json", "config.txt"})
        CHECK(std::find(res.outputs.begin(), res.outputs.end(), name) != res.outputs.end());
    CHECK(fs::exists(out / "manifest.json"));

    nlohmann::json summary = nlohmann::json::parse(res.summary);
    AnosovMap lin(fixtures::reference_matrix(), PerturbationField{});
    CHECK(summary["alpha"][0].get<double>() ==
          doctest::Approx(lin.spectrum().alpha[0]).epsilon(1e-15));
    CHECK(summary["certified"].get<bool>());
    CHECK(summary["verb"] == "spectrum");

    // CSV carries a header row plus one line per tag.
    std::istringstream csv(slurp(out / "spectrum.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    nlohmann::json manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["config_hash"] == summary["config_hash"]);
    CHECK(manifest["outputs"].size() == res.outputs.size());
}

TEST_CASE("non-hyperbolic linear parts map to their own exit code") {
    lab::ScenarioConfig c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c.matrix.m[i][j] = i == j;
    c.seed = 1;
    c.seed_set = true;
    fs::path out = scratch("identity");
    try {
        lab::run_verb("spectrum", c, out.string());
        FAIL("identity matrix must not certify");
    } catch (const std::exception& e) {
        CHECK(lab::exit_code_for(e) == 3);
    }

    CHECK(lab::exit_code_for(ConfigError("x")) == 2);
    CHECK(lab::exit_code_for(NotPartiallyHyperbolic("x")) == 3);
    CHECK(lab::exit_code_for(ConeViolation("x")) == 4);
    CHECK(lab::exit_code_for(NonConvergence("x")) == 5);
    CHECK(lab::exit_code_for(SeriesStall("x")) == 6);
    CHECK(lab::exit_code_for(ScaleBelowResolution("x")) == 7);
    CHECK(lab::exit_code_for(ResolutionTooCoarse("x")) == 8);
    CHECK(lab::exit_code_for(Error("x")) == 1);
    CHECK(lab::exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("family selection expands inside run_verb") {
    lab::ScenarioConfig c;
    c.matrix = fixtures::reference_matrix();
    c.family = "generic";
    c.family_index = 0;
    c.seed = 2026;
    c.seed_set = true;
    c.stages = 6;
    c.window = 3;
    c.bases = 1;
    fs::path out = scratch("generic_growth");
    lab::RunResult res = lab::run_verb("growth", c, out.string());
    nlohmann::json summary = nlohmann::json::parse(res.summary);
    CHECK(summary["tag"] == "wu");
    double chi = summary["chi_sup"].get<double>();
    CHECK(chi > 0.42);
    CHECK(chi < 0.47);

    // Families own the perturbation: explicit modes conflict.
    lab::ScenarioConfig bad = c;
    bad.epsilon = 0.05;
    CHECK_THROWS_AS(lab::run_verb("growth", bad, scratch("conflict").string()), ConfigError);
    bad = c;
    bad.family = "unheard-of";
    CHECK_THROWS_AS(lab::run_verb("growth", bad, scratch("nofam").string()), ConfigError);
}

TEST_CASE("seeded verbs rerun byte-identical") {
    lab::ScenarioConfig c;
    c.matrix = fixtures::reference_matrix();
    c.epsilon = 0.05;
    FourierMode mo;
    mo.k[0] = 0;
    mo.k[1] = 1;
    mo.k[2] = 1;
    mo.sin_amp = {1, 0, 0};
    c.modes.push_back(mo);
    c.seed = 7;
    c.seed_set = true;
    c.samples = 256;
    c.depth = 24;
    c.radius = 0.05;

    fs::path a = scratch("measure_a"), b = scratch("measure_b");
    lab::RunResult ra = lab::run_verb("measure", c, a.string());
    lab::RunResult rb = lab::run_verb("measure", c, b.string());
    REQUIRE(ra.outputs == rb.outputs);
    for (const std::string& name : ra.outputs) CHECK(slurp(a / name) == slurp(b / name));
}
