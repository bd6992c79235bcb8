#pragma once

#include "finhom/json_io.hpp"
#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"
#include "finhom/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace finhom {

/// One table entry. Lengths and counts carry an exactness flag: false marks
/// a floating point length or a count that is only a certified bound.
struct Cell {
    enum class Type { length, count, flag, text };
    Type type = Type::text;
    Length length;
    std::uint64_t count = 0;
    bool flag = false;
    std::string text;
    bool exact = true;

    static Cell of(const Length& l) { return {Type::length, l, 0, false, {}, l.is_exact()}; }
    static Cell of_count(std::uint64_t c, bool exact = true) { return {Type::count, {}, c, false, {}, exact}; }
    static Cell of_flag(bool b) { return {Type::flag, {}, 0, b, {}, true}; }
    static Cell of_text(std::string s) { return {Type::text, {}, 0, false, std::move(s), true}; }
    static Cell empty() { return of_text(""); }
};

struct Verdict {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::string version;
    std::uint64_t seed = 0;
    json parameters = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;

    bool passed() const;
    std::size_t column(const std::string& name) const;
    const Cell& at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

/// Canonical format: cells are {"value", "exact"}; exact lengths are "p/q".
json report_to_json(const ExperimentReport& report);
/// Flat table: every column is followed by "<name>_exact"; metadata and
/// verdicts come first as lines starting with '#'.
std::string report_to_csv(const ExperimentReport& report);

struct RunOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Branch nodes for the GH searches.
    std::uint64_t budget = 10'000'000;
};

/// Uniform integer in [0, bound) from raw mt19937_64 output by rejection, so
/// the stream is the same for every standard library.
std::uint64_t portable_uniform(std::mt19937_64& rng, std::uint64_t bound);
/// Uniform in [lo, hi].
std::int64_t portable_range(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);

/// Shortest paths over independent integer edge weights in [lo, hi], divided
/// by `den`. Exact mode.
FiniteMetricSpace random_integer_metric(std::size_t n, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi,
                                        std::int64_t den = 1);

struct ConvergeCyclesParams {
    std::vector<std::size_t> n_list = {6, 12, 24, 48, 60, 96, 192};
    std::vector<Length> eps_list = {Length(0.05), Length(0.1), Length(0.2)};
    Length mesh = Length(Rational(1, 384));
};

/// C_n = cycle_space(n, 1/n) against the unit circle: GH bounds through the
/// model net, E(eps, C_n) per eps, girth.
ExperimentReport exp_converge_cycles(const ConvergeCyclesParams& params, const RunOptions& options = {});

struct TorusParams {
    std::size_t d = 2;
    std::vector<std::size_t> m_list = {4, 6, 8, 12, 16};
    Length mesh = Length(Rational(1, 96));
};

/// torus_grid(d, m) against the d-torus with the sup metric.
ExperimentReport exp_torus(const TorusParams& params, const RunOptions& options = {});

struct SolenoidParams {
    std::vector<int> depths = {1, 2, 3, 4, 5, 6};
    /// Approximant K lives on Z_n with n = multiplier * K!.
    std::size_t multiplier = 1;
};

/// Consecutive approximants compared through k -> k mod n_K.
ExperimentReport exp_solenoid(const SolenoidParams& params, const RunOptions& options = {});

struct SphereCandidate {
    std::string name;
    FiniteMetricSpace space;
    std::optional<std::vector<ModelPoint>> embedding;
};

/// Point, Platonic and Archimedean vertex sets, a great circle, a torus
/// grid and a Cayley graph of S4 (both scaled to diameter pi), and a path
/// that is not homogeneous.
std::vector<std::string> sphere_candidate_names();
SphereCandidate sphere_candidate(const std::string& name);

struct SphereGapParams {
    std::vector<std::string> candidates = sphere_candidate_names();
    Length mesh = Length(0.12);
};

/// GH bounds from each homogeneous candidate to the unit sphere, sorted by
/// lower bound. Non-homogeneous candidates are dropped with a note.
ExperimentReport exp_sphere_gap(const SphereGapParams& params, const RunOptions& options = {});

struct LemmaSuiteParams {
    std::size_t trials = 100;
    std::vector<std::size_t> tower = {12, 24, 48, 96};
    std::size_t snap_instances = 50;
};

/// Entropy bound on random and catalogued spaces, the 11 eps bound on cycle
/// towers, and the 4 eps / 2 eps snapping budget on random circle maps.
ExperimentReport exp_lemma_suite(const LemmaSuiteParams& params, const RunOptions& options = {});

/// Names accepted by run_experiment: converge_cycles, torus, solenoid,
/// sphere_gap, lemma_suite.
const std::vector<std::string>& experiment_names();
/// Runs with default parameters overridden by the keys present in `params`.
ExperimentReport run_experiment(const std::string& name, const json& params, const RunOptions& options = {});

} // namespace finhom
