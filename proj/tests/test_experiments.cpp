#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "loopspec/experiments.hpp"

using namespace loopspec;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("loopspec_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream f(p);
    std::vector<std::string> lines;
    std::string l;
    while (std::getline(f, l)) lines.push_back(l);
    return lines;
}

}  // namespace

TEST_CASE("experiment catalog") {
    const auto cat = list_experiments();
    bool has_fit = false, has_sandwich = false;
    for (const auto& e : cat) {
        CHECK_FALSE(e.description.empty());
        if (e.name == "theorem1-fit") has_fit = true;
        if (e.name == "sandwich") has_sandwich = true;
    }
    CHECK(has_fit);
    CHECK(has_sandwich);
}

TEST_CASE("config validation rejects unknown keys and bad schemas") {
    Json c;
    c["experiment"] = "effective-spectrum";
    c["curve"] = Json{{"preset", "circle"}, {"radius", 1.0}};
    c["n"] = 5;
    CHECK_NOTHROW(validate_config(c));

    Json bad = c;
    bad["typo_key"] = 1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    Json missing;
    missing["experiment"] = "sandwich";
    CHECK_THROWS_AS(validate_config(missing), ConfigError);

    Json unknown;
    unknown["experiment"] = "quantum-leap";
    CHECK_THROWS_AS(validate_config(unknown), ConfigError);

    // unknown keys nested in curve/params are also errors at run time
    Json nested = c;
    nested["curve"]["paint"] = "blue";
    CHECK_THROWS_AS(run_experiment(nested, temp_dir("nested"), 1, false), ConfigError);
}

TEST_CASE("effective-spectrum experiment produces the documented artifact") {
    Json c;
    c["experiment"] = "effective-spectrum";
    c["curve"] = Json{{"preset", "circle"}, {"radius", 1.0}, {"grid", 256}};
    c["n"] = 5;
    const std::string out = temp_dir("effspec");
    const RunReport rep = run_experiment(c, out, 1, false);
    CHECK(rep.exit_code(false) == 0);
    REQUIRE_FALSE(rep.artifacts.empty());

    std::ifstream f(rep.artifacts.front());
    Json j;
    f >> j;
    const auto vals = j.at("eigenvalues").get<std::vector<double>>();
    REQUIRE(vals.size() == 5);
    const double expect[5] = {-0.25, 0.75, 0.75, 3.75, 3.75};
    for (int i = 0; i < 5; ++i) CHECK(vals[static_cast<std::size_t>(i)] == Catch::Approx(expect[i]).margin(1e-9));
}

TEST_CASE("est2 experiment exit contract") {
    Json c;
    c["experiment"] = "est2";
    c["gamma_plus"] = 1.0;
    c["pairs"] = Json::array({Json{{"a", 1.0}, {"beta", 20.0}}});
    const RunReport rep = run_experiment(c, temp_dir("est2"), 1, false);
    CHECK(rep.exit_code(false) == 0);
    bool found = false;
    for (const auto& cl : rep.claims)
        if (cl.name == "est2_strict_bounds_0") {
            found = true;
            CHECK(cl.status == "pass");
        }
    CHECK(found);
}

TEST_CASE("persistent-current experiment writes the documented CSV") {
    Json c;
    c["experiment"] = "persistent-current";
    c["R"] = 1.0;
    c["B"] = 1.0;
    c["beta"] = 20.0;
    c["c0_grid"] = Json::array({0.1, 0.3, 0.5, 0.7, 0.9});
    c["n"] = 1;
    const std::string out = temp_dir("pc");
    const RunReport rep = run_experiment(c, out, 1, false);
    CHECK(rep.exit_code(false) == 0);
    const auto lines = read_lines(rep.artifacts.front());
    REQUIRE(lines.size() >= 7);
    CHECK(lines[1] == "c0,lambda_1,dlambda1_dc0");

    // malformed grid is a config error
    Json bad = c;
    bad["c0_grid"] = Json::array({0.1, 0.5, 1.5, 0.7, 0.9});
    CHECK_THROWS_AS(run_experiment(bad, out, 1, false), ConfigError);
}

TEST_CASE("identical configs give byte-identical artifacts") {
    Json c;
    c["experiment"] = "enclosure-sweep";
    c["curve"] = Json{{"preset", "circle"}, {"radius", 1.0}, {"grid", 256}};
    c["params"] = Json{{"c0", 0.3}, {"B", 1.0}};
    c["beta"] = Json::array({40.0, 60.0});
    c["n"] = 1;
    const std::string out1 = temp_dir("det1");
    const std::string out2 = temp_dir("det2");
    const RunReport r1 = run_experiment(c, out1, 1, false);
    const RunReport r2 = run_experiment(c, out2, 2, false);  // worker count must not matter
    REQUIRE(r1.artifacts.size() == r2.artifacts.size());
    for (std::size_t i = 0; i < r1.artifacts.size(); ++i) {
        const auto a = read_lines(r1.artifacts[i]);
        const auto b = read_lines(r2.artifacts[i]);
        CHECK(a == b);
    }
    CHECK(r1.input_digest == r2.input_digest);
}

TEST_CASE("claim selection maps each configured claim to one entry") {
    Json c;
    c["experiment"] = "effective-spectrum";
    c["curve"] = Json{{"preset", "circle"}, {"radius", 1.0}, {"grid", 256}};
    c["n"] = 3;
    c["claims"] = Json::array({"grid_doubling_within_error"});
    const RunReport rep = run_experiment(c, temp_dir("claims"), 1, false);
    REQUIRE(rep.claims.size() == 1);
    CHECK(rep.claims[0].name == "grid_doubling_within_error");

    c["claims"] = Json::array({"no_such_claim"});
    CHECK_THROWS_AS(run_experiment(c, temp_dir("claims2"), 1, false), ConfigError);
}

TEST_CASE("sandwich experiment on a small case") {
    Json c;
    c["experiment"] = "sandwich";
    c["curve"] = Json{{"preset", "circle"}, {"radius", 1.0}, {"grid", 256}};
    c["params"] = Json{{"c0", 0.3}, {"B", 1.0}};
    c["beta"] = Json::array({40.0});
    c["n"] = 1;
    const RunReport rep = run_experiment(c, temp_dir("sandwich"), 1, false);
    bool contained = false;
    for (const auto& cl : rep.claims)
        if (cl.name.rfind("sandwich_", 0) == 0) contained = (cl.status == "pass");
    CHECK(contained);

    // a non-circular loop cannot use the radial oracle
    Json bad = c;
    bad["curve"] = Json{{"preset", "ellipse"}, {"a", 2.0}, {"b", 1.0}};
    CHECK_THROWS_AS(run_experiment(bad, temp_dir("sandwich2"), 1, false), ConfigError);
}
