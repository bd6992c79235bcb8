#include "doctest.h"
#include "helpers.hpp"

#include "finhom/experiments.hpp"
#include "finhom/json_io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace finhom;

namespace {

// Points of an eps-packing of C_n sit at least floor(n eps) + 1 steps apart,
// where a distance of exactly eps does not count as apart.
std::uint64_t cycle_packing(std::size_t n, const Rational& eps)
{
    Rational steps = eps * Rational(static_cast<std::int64_t>(n));
    std::int64_t gap = steps.floor() + 1;
    return n / static_cast<std::uint64_t>(gap);
}

std::size_t csv_lines(const std::string& csv, bool comments)
{
    std::istringstream in(csv);
    std::size_t count = 0;
    for (std::string line; std::getline(in, line);)
        if ((line.rfind("#", 0) == 0) == comments) ++count;
    return count;
}

} // namespace

TEST_CASE("portable uniform draws")
{
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        // For a power of two the rejection zone is a single block at the top.
        std::uint64_t raw = b();
        std::uint64_t v = portable_uniform(a, 1024);
        if (raw < UINT64_MAX - 1023) CHECK(v == raw % 1024);
        else break;
    }
    std::mt19937_64 r(7);
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 6000; ++i) ++hits[portable_uniform(r, 6)];
    for (int h : hits) CHECK(h > 800);
    for (int i = 0; i < 200; ++i) {
        auto v = portable_range(r, -3, 4);
        CHECK(v >= -3);
        CHECK(v <= 4);
    }
    CHECK(portable_uniform(r, 1) == 0);
    CHECK_THROWS_AS(portable_uniform(r, 0), std::invalid_argument);
    CHECK_THROWS_AS(portable_range(r, 2, 1), std::invalid_argument);
}

TEST_CASE("random integer metrics are metrics and depend only on the seed")
{
    std::mt19937_64 a(3), b(3);
    auto s = random_integer_metric(7, a, 1, 9, 2);
    CHECK(s == random_integer_metric(7, b, 1, 9, 2));
    CHECK(s.size() == 7);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j)
            for (std::size_t k = 0; k < 7; ++k)
                CHECK(s.exact_distance(i, k) <= s.exact_distance(i, j) + s.exact_distance(j, k));
    CHECK_THROWS_AS(random_integer_metric(3, a, 0, 2), std::invalid_argument);
}

TEST_CASE("cycle convergence report")
{
    ConvergeCyclesParams p;
    p.n_list = {6, 12, 24, 48, 60, 96};
    p.eps_list = {q(1, 10), q(1, 5)};
    p.mesh = q(1, 192);
    auto r = exp_converge_cycles(p);
    REQUIRE(r.rows.size() == 6);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const std::size_t n = p.n_list[i];
        CAPTURE(n);
        CHECK(r.at(i, "n").count == n);
        CHECK(r.at(i, "girth").length == q(1));
        for (const auto& e : p.eps_list) {
            const Cell& c = r.at(i, "E(" + e.str() + ")");
            CHECK(c.exact);
            CHECK(c.count == cycle_packing(n, e.exact()));
        }
        CHECK(r.at(i, "gh_lower").length <= r.at(i, "gh_upper").length);
    }
    // Half the spacing, plus the net's Hausdorff bound once on each side of
    // the triangle inequality through the net.
    CHECK(r.at(4, "gh_upper").length <= q(1, 120) + q(2) * r.at(4, "net_slack").length);
    CHECK(r.at(3, "E(1/10)").count == 9);
    CHECK(r.at(5, "E(1/10)").count == 9);
    // A distance of exactly eps does not separate: 6 steps of 1/60.
    CHECK(r.at(4, "E(1/10)").count == 8);
    CHECK(r.passed());
}

TEST_CASE("verdicts are recomputable from the columns")
{
    ConvergeCyclesParams p;
    p.n_list = {24, 60, 120};
    p.eps_list = {q(1, 10), q(1, 5)};
    p.mesh = q(1, 240);
    auto r = exp_converge_cycles(p);
    bool near = true;
    for (std::size_t i = 0; i < r.rows.size(); ++i)
        for (const auto& e : p.eps_list) {
            const std::int64_t n = static_cast<std::int64_t>(r.at(i, "n").count);
            if (Rational(n) * e.exact() < Rational(10)) continue;
            const Cell& c = r.at(i, "E(" + e.str() + ")");
            Rational gap = Rational(static_cast<std::int64_t>(c.count)) - Rational(1) / e.exact();
            if (gap < Rational(0)) gap = -gap;
            near = near && c.exact && gap <= Rational(1);
        }
    bool monotone = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        monotone = monotone && r.at(i, "gh_upper").length <= r.at(i - 1, "gh_upper").length;
    for (const auto& v : r.verdicts) {
        if (v.name == "packing_near_inverse") CHECK(v.passed == near);
        if (v.name == "gh_upper_nonincreasing") CHECK(v.passed == monotone);
    }
}

TEST_CASE("torus report")
{
    TorusParams p;
    p.d = 2;
    p.m_list = {4, 6};
    p.mesh = q(1, 48);
    auto r = exp_torus(p);
    REQUIRE(r.rows.size() == 2);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const std::int64_t m = static_cast<std::int64_t>(p.m_list[i]);
        CHECK(r.at(i, "points").count == static_cast<std::uint64_t>(m * m));
        CHECK(r.at(i, "half_spacing").length == q(1, 2 * m));
        CHECK(r.at(i, "gh_upper").length <= q(1, 2 * m) + r.at(i, "net_slack").length);
        const Cell& dt = r.at(i, "distance_transitive");
        CHECK(dt.type == Cell::Type::flag);
        CHECK_FALSE(dt.flag);
    }
    CHECK(r.passed());

    p.d = 4;
    CHECK_THROWS_AS(exp_torus(p), std::invalid_argument);
}

TEST_CASE("one-dimensional torus rows match the cycle rows")
{
    TorusParams t;
    t.d = 1;
    t.m_list = {12, 24};
    t.mesh = q(1, 96);
    ConvergeCyclesParams c;
    c.n_list = {12, 24};
    c.eps_list = {q(1, 10)};
    c.mesh = q(1, 96);
    auto rt = exp_torus(t);
    auto rc = exp_converge_cycles(c);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(rt.at(i, "gh_upper").length == rc.at(i, "gh_upper").length);
        CHECK(rt.at(i, "gh_lower").length == rc.at(i, "gh_lower").length);
    }
}

TEST_CASE("solenoid report")
{
    SolenoidParams p;
    p.depths = {1, 2, 3, 4};
    auto r = exp_solenoid(p);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.at(0, "gh_upper").length <= q(1, 8));
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const std::int64_t k = static_cast<std::int64_t>(r.at(i, "depth").count);
        CHECK(r.at(i, "cauchy_bound").length == q(1, std::int64_t{1} << (k + 1)));
        CHECK(r.at(i, "gh_upper").length <= r.at(i, "cauchy_bound").length);
        if (i) CHECK(r.at(i, "ratio").length <= q(1, 2));
        CHECK(r.at(i, "homogeneous").flag);
    }
    CHECK(r.passed());

    p.depths = {1, 3};
    CHECK_THROWS_AS(exp_solenoid(p), std::invalid_argument);
    p.depths = {2};
    CHECK_THROWS_AS(exp_solenoid(p), std::invalid_argument);
    p.depths = {1, 2};
    p.multiplier = 0;
    CHECK_THROWS_AS(exp_solenoid(p), std::invalid_argument);
}

TEST_CASE("sphere gap report")
{
    SphereGapParams p;
    p.candidates = {"tetrahedron", "point", "path_3", "octahedron"};
    p.mesh = Length(0.3);
    auto r = exp_sphere_gap(p);
    REQUIRE(r.rows.size() == 3);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(r.at(i, "gh_lower").length.value() <= r.at(i, "gh_upper").length.value() + 1e-9);
        if (i) CHECK(r.at(i - 1, "gh_lower").length.value() <= r.at(i, "gh_lower").length.value());
    }
    const std::size_t last = r.rows.size() - 1;
    CHECK(r.at(last, "candidate").text == "point");
    CHECK(r.at(last, "gh_lower").length.value() ==
          doctest::Approx(std::numbers::pi / 2 - r.at(last, "net_slack").length.value()).epsilon(1e-9));
    bool excluded = false;
    for (const auto& n : r.notes) excluded = excluded || n.find("path_3") != std::string::npos;
    CHECK(excluded);
    CHECK(r.passed());

    p.candidates = {"no_such_solid"};
    CHECK_THROWS_AS(exp_sphere_gap(p), std::invalid_argument);
}

TEST_CASE("lemma suite on a small campaign")
{
    LemmaSuiteParams p;
    p.trials = 10;
    p.tower = {12, 24};
    p.snap_instances = 10;
    RunOptions o;
    o.seed = 5;
    auto r = exp_lemma_suite(p, o);
    CHECK(r.passed());
    std::size_t snaps = 0, limits = 0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& c = r.at(i, "campaign").text;
        if (c == "snap_defect") ++snaps;
        if (c.rfind("limit_", 0) == 0) {
            ++limits;
            CHECK(r.at(i, "measured").length <= r.at(i, "bound").length);
        }
        CHECK(r.at(i, "holds").flag);
    }
    CHECK(snaps == 10);
    CHECK(limits == 4);

    p.trials = 0;
    CHECK_THROWS_AS(exp_lemma_suite(p, o), std::invalid_argument);
}

TEST_CASE("reports are byte-identical for equal seeds")
{
    LemmaSuiteParams p;
    p.trials = 8;
    p.tower = {12};
    p.snap_instances = 6;
    RunOptions serial, parallel;
    serial.seed = parallel.seed = 9;
    parallel.threads = 4;
    auto a = exp_lemma_suite(p, serial);
    auto b = exp_lemma_suite(p, parallel);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(report_to_csv(a) == report_to_csv(b));

    RunOptions other = serial;
    other.seed = 10;
    CHECK(report_to_json(exp_lemma_suite(p, other)).dump() != report_to_json(a).dump());
}

TEST_CASE("json and csv layout")
{
    SolenoidParams p;
    p.depths = {1, 2, 3};
    RunOptions o;
    o.seed = 77;
    auto r = exp_solenoid(p, o);
    auto j = report_to_json(r);
    CHECK(j["experiment"] == "solenoid");
    CHECK(j["seed"] == 77);
    CHECK(j["version"] == r.version);
    CHECK(j["passed"] == true);
    CHECK(j["parameters"]["depths"] == json::array({1, 2, 3}));
    REQUIRE(j["rows"].size() == 2);
    for (const auto& row : j["rows"]) {
        REQUIRE(row.size() == r.columns.size());
        for (const auto& cell : row) {
            CHECK(cell.contains("value"));
            CHECK(cell["exact"].is_boolean());
        }
    }
    // Exact lengths are written as rationals.
    CHECK(j["rows"][0][r.column("cauchy_bound")]["value"] == "1/4");
    CHECK(length_from_json(j["rows"][0][r.column("gh_upper")]["value"]) == r.at(0, "gh_upper").length);

    auto csv = report_to_csv(r);
    CHECK(csv.rfind("# experiment,solenoid\n", 0) == 0);
    CHECK(csv_lines(csv, false) == 1 + r.rows.size());
    CHECK(csv_lines(csv, true) == 4 + r.verdicts.size() + r.notes.size());
    CHECK(csv.find("depth,depth_exact,points,points_exact") != std::string::npos);
}

TEST_CASE("csv quoting")
{
    ExperimentReport r;
    r.experiment = "x";
    r.columns = {"a"};
    r.rows = {{Cell::of_text("p,q \"r\"")}};
    auto csv = report_to_csv(r);
    CHECK(csv.find("\"p,q \"\"r\"\"\",true") != std::string::npos);
}

TEST_CASE("run_experiment parameter handling")
{
    CHECK(experiment_names().size() == 5);
    auto r = run_experiment("solenoid", json{{"depths", {1, 2}}});
    CHECK(r.rows.size() == 1);
    CHECK(r.parameters["depths"] == json::array({1, 2}));
    auto c = run_experiment("converge_cycles", json{{"n", {12}}, {"eps", {"1/4"}}, {"mesh", "1/48"}});
    CHECK(c.at(0, "E(1/4)").count == cycle_packing(12, Rational(1, 4)));
    CHECK_THROWS_AS(run_experiment("solenoid", json{{"depth", {1, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment("solenoid", json{{"depths", "many"}}), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment("solenoid", json::array()), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment("nonsense", json::object()), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment("converge_cycles", json{{"n", json::array()}}), std::invalid_argument);
}
