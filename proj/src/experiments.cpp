#include "finhom/experiments.hpp"

#include "finhom/entropy.hpp"
#include "finhom/gh.hpp"
#include "finhom/isometry.hpp"
#include "finhom/quasimorph.hpp"
#include "finhom/spaces.hpp"
#include "finhom/version.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace finhom {

namespace {

// Runs body(i) for i < count on up to `threads` workers; results go to
// caller-owned slots, so the output order never depends on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body body)
{
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

ExperimentReport start(const std::string& name, const RunOptions& options, std::vector<std::string> columns)
{
    ExperimentReport r;
    r.experiment = name;
    r.version = kVersion;
    r.seed = options.seed;
    r.columns = std::move(columns);
    return r;
}

json lengths_json(const std::vector<Length>& v)
{
    json out = json::array();
    for (const auto& l : v) out.push_back(length_to_json(l));
    return out;
}

std::string eps_column(const Length& eps) { return "E(" + eps.str() + ")"; }

Length inverse_of(const Length& eps) { return Length(1) / eps; }

bool nonincreasing(const std::vector<Length>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!leq_tol(v[i], v[i - 1])) return false;
    return true;
}

} // namespace

bool ExperimentReport::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

std::size_t ExperimentReport::column(const std::string& name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

json report_to_json(const ExperimentReport& report)
{
    json j;
    j["experiment"] = report.experiment;
    j["version"] = report.version;
    j["seed"] = report.seed;
    j["parameters"] = report.parameters;
    j["columns"] = report.columns;
    json rows = json::array();
    for (const auto& row : report.rows) {
        json cells = json::array();
        for (const auto& c : row) {
            json cell;
            switch (c.type) {
            case Cell::Type::length: cell["value"] = length_to_json(c.length); break;
            case Cell::Type::count: cell["value"] = c.count; break;
            case Cell::Type::flag: cell["value"] = c.flag; break;
            case Cell::Type::text: cell["value"] = c.text; break;
            }
            cell["exact"] = c.exact;
            cells.push_back(std::move(cell));
        }
        rows.push_back(std::move(cells));
    }
    j["rows"] = std::move(rows);
    json verdicts = json::array();
    for (const auto& v : report.verdicts) verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
    j["verdicts"] = std::move(verdicts);
    j["notes"] = report.notes;
    j["passed"] = report.passed();
    return j;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

} // namespace

std::string report_to_csv(const ExperimentReport& report)
{
    std::ostringstream out;
    out << "# experiment," << csv_field(report.experiment) << "\n";
    out << "# version," << csv_field(report.version) << "\n";
    out << "# seed," << report.seed << "\n";
    out << "# parameters," << csv_field(report.parameters.dump()) << "\n";
    for (const auto& v : report.verdicts)
        out << "# verdict," << csv_field(v.name) << "," << (v.passed ? "pass" : "fail") << "," << csv_field(v.detail)
            << "\n";
    for (const auto& n : report.notes) out << "# note," << csv_field(n) << "\n";
    for (std::size_t i = 0; i < report.columns.size(); ++i)
        out << (i ? "," : "") << csv_field(report.columns[i]) << "," << csv_field(report.columns[i] + "_exact");
    out << "\n";
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            std::string v;
            switch (c.type) {
            case Cell::Type::length: v = c.length.str(); break;
            case Cell::Type::count: v = std::to_string(c.count); break;
            case Cell::Type::flag: v = c.flag ? "true" : "false"; break;
            case Cell::Type::text: v = c.text; break;
            }
            out << (i ? "," : "") << csv_field(v) << "," << (c.exact ? "true" : "false");
        }
        out << "\n";
    }
    return out.str();
}

std::uint64_t portable_uniform(std::mt19937_64& rng, std::uint64_t bound)
{
    if (bound == 0) throw std::invalid_argument("bound must be positive");
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::int64_t portable_range(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) throw std::invalid_argument("empty range");
    return lo + static_cast<std::int64_t>(portable_uniform(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

FiniteMetricSpace random_integer_metric(std::size_t n, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi,
                                        std::int64_t den)
{
    if (lo < 1) throw std::invalid_argument("edge weights must be positive");
    std::vector<std::int64_t> d(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = portable_range(rng, lo, hi);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    std::vector<Rational> q(n * n);
    for (std::size_t e = 0; e < n * n; ++e) q[e] = Rational(d[e], den);
    return FiniteMetricSpace::exact(n, std::move(q), "random(" + std::to_string(n) + ")");
}

ExperimentReport exp_converge_cycles(const ConvergeCyclesParams& params, const RunOptions& options)
{
    if (params.n_list.empty() || params.eps_list.empty()) throw std::invalid_argument("n and eps lists must be nonempty");
    auto ns = params.n_list;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    std::vector<std::string> columns = {"n", "gh_lower", "gh_upper", "net_slack", "girth"};
    for (const auto& e : params.eps_list) columns.push_back(eps_column(e));
    auto report = start("converge_cycles", options, columns);
    report.parameters = {{"n", ns}, {"eps", lengths_json(params.eps_list)}, {"mesh", length_to_json(params.mesh)}};

    GhOptions gh;
    gh.budget = options.budget;
    report.rows.resize(ns.size());
    parallel_for(ns.size(), options.threads, [&](std::size_t i) {
        const std::size_t n = ns[i];
        auto cyc = cycle_space(n, Length(Rational(1, static_cast<std::int64_t>(n))));
        auto b = gh_to_model(cyc.space, Circle{}, params.mesh, cycle_embedding(n), gh);
        auto g = girth(cyc);
        std::vector<Cell> row = {Cell::of_count(n), Cell::of(b.lower), Cell::of(b.upper), Cell::of(b.net_slack),
                                 g ? Cell::of(*g) : Cell::empty()};
        for (const auto& e : params.eps_list) {
            auto p = packing_number(cyc.space, e);
            row.push_back(Cell::of_count(p.count, p.exact));
        }
        report.rows[i] = std::move(row);
    });

    std::vector<Length> uppers;
    for (std::size_t i = 0; i < ns.size(); ++i) uppers.push_back(report.at(i, "gh_upper").length);
    report.verdicts.push_back({"gh_upper_nonincreasing", nonincreasing(uppers), "upper bounds in increasing n order"});

    bool near = true;
    std::size_t checked = 0;
    std::string misses;
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (const auto& e : params.eps_list) {
            if (Length(static_cast<std::int64_t>(ns[i])) * e < Length(10)) continue;
            const Cell& c = report.at(i, eps_column(e));
            ++checked;
            const Length gap = abs(Length(static_cast<std::int64_t>(c.count)) - inverse_of(e));
            if (!c.exact || !leq_tol(gap, Length(1))) {
                near = false;
                misses += (misses.empty() ? "" : "; ") + std::string("n=") + std::to_string(ns[i]) + " eps=" + e.str() +
                          " E=" + std::to_string(c.count);
            }
        }
    report.verdicts.push_back({"packing_near_inverse", near && checked > 0,
                               std::to_string(checked) + " (n, eps) cells with n*eps >= 10" +
                                   (misses.empty() ? "" : ", misses: " + misses)});

    bool girth_one = true;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const Cell& c = report.at(i, "girth");
        girth_one = girth_one && c.type == Cell::Type::length && c.length == Length(1);
    }
    report.verdicts.push_back({"girth_one", girth_one, "cycle length n times 1/n"});
    return report;
}

ExperimentReport exp_torus(const TorusParams& params, const RunOptions& options)
{
    if (params.d < 1 || params.d > 3) throw std::invalid_argument("torus dimension must be 1, 2 or 3");
    if (params.m_list.empty()) throw std::invalid_argument("m list must be nonempty");
    auto ms = params.m_list;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

    auto report = start("torus", options,
                        {"m", "points", "gh_lower", "gh_upper", "net_slack", "half_spacing", "distance_transitive"});
    report.parameters = {{"d", params.d}, {"m", ms}, {"mesh", length_to_json(params.mesh)}};
    GhOptions gh;
    gh.budget = options.budget;
    Torus model{std::vector<Length>(params.d, Length(1))};

    report.rows.resize(ms.size());
    parallel_for(ms.size(), options.threads, [&](std::size_t i) {
        const std::size_t m = ms[i];
        auto grid = torus_grid(params.d, m);
        auto b = gh_to_model(grid, model, params.mesh, torus_grid_embedding(params.d, m), gh);
        auto dt = is_distance_transitive(grid);
        report.rows[i] = {Cell::of_count(m),
                          Cell::of_count(grid.size()),
                          Cell::of(b.lower),
                          Cell::of(b.upper),
                          Cell::of(b.net_slack),
                          Cell::of(Length(Rational(1, 2 * static_cast<std::int64_t>(m)))),
                          dt ? Cell::of_flag(*dt) : Cell::of_text("unknown")};
    });

    std::vector<Length> uppers;
    bool within = true;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        uppers.push_back(report.at(i, "gh_upper").length);
        within = within && leq_tol(report.at(i, "gh_upper").length,
                                   report.at(i, "half_spacing").length + report.at(i, "net_slack").length);
    }
    report.verdicts.push_back({"gh_upper_nonincreasing", nonincreasing(uppers), "upper bounds in increasing m order"});
    report.verdicts.push_back({"gh_upper_within_half_spacing", within, "gh_upper <= half_spacing + net_slack"});
    return report;
}

ExperimentReport exp_solenoid(const SolenoidParams& params, const RunOptions& options)
{
    if (params.depths.size() < 2) throw std::invalid_argument("need at least two depths");
    if (params.multiplier < 1) throw std::invalid_argument("multiplier must be positive");
    for (std::size_t i = 0; i < params.depths.size(); ++i) {
        if (params.depths[i] < 1) throw std::invalid_argument("depths must be positive");
        if (i && params.depths[i] != params.depths[i - 1] + 1)
            throw std::invalid_argument("depths must increase by one");
    }
    auto size_for = [&](int depth) {
        std::size_t n = params.multiplier;
        for (int j = 2; j <= depth; ++j) n *= static_cast<std::size_t>(j);
        return n;
    };

    auto report = start("solenoid", options,
                        {"depth", "points", "next_points", "gh_upper", "cauchy_bound", "ratio", "homogeneous",
                         "next_homogeneous"});
    report.parameters = {{"depths", params.depths}, {"multiplier", params.multiplier}};

    const std::size_t pairs = params.depths.size() - 1;
    std::vector<std::optional<bool>> homogeneous(params.depths.size());
    parallel_for(params.depths.size(), options.threads, [&](std::size_t i) {
        homogeneous[i] = is_homogeneous(solenoid_approximant(params.depths[i], size_for(params.depths[i])));
    });
    std::vector<Length> uppers(pairs);
    parallel_for(pairs, options.threads, [&](std::size_t i) {
        const int k = params.depths[i];
        const std::size_t n = size_for(k), next = size_for(k + 1);
        auto a = solenoid_approximant(k, n);
        auto b = solenoid_approximant(k + 1, next);
        // Dropping the deepest level of A_{K+1} lands on A_K.
        std::vector<std::size_t> f(next);
        for (std::size_t p = 0; p < next; ++p) f[p] = p % n;
        uppers[i] = gh_upper_from_map(b, a, f).value;
    });

    auto flag_cell = [](const std::optional<bool>& v) { return v ? Cell::of_flag(*v) : Cell::of_text("unknown"); };
    for (std::size_t i = 0; i < pairs; ++i) {
        const int k = params.depths[i];
        const Length cauchy(Rational(1, std::int64_t{1} << (k + 1)));
        Cell ratio = i ? Cell::of(uppers[i] / uppers[i - 1]) : Cell::empty();
        report.rows.push_back({Cell::of_count(static_cast<std::uint64_t>(k)), Cell::of_count(size_for(k)),
                               Cell::of_count(size_for(k + 1)), Cell::of(uppers[i]), Cell::of(cauchy), ratio,
                               flag_cell(homogeneous[i]), flag_cell(homogeneous[i + 1])});
    }

    bool cauchy = true, halving = true, homog = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        cauchy = cauchy && leq_tol(report.at(i, "gh_upper").length, report.at(i, "cauchy_bound").length);
        const Cell& r = report.at(i, "ratio");
        if (r.type == Cell::Type::length) halving = halving && leq_tol(r.length, Length(Rational(1, 2)));
        for (const char* col : {"homogeneous", "next_homogeneous"}) {
            const Cell& h = report.at(i, col);
            homog = homog && h.type == Cell::Type::flag && h.flag;
        }
    }
    report.verdicts.push_back({"cauchy_certificate", cauchy, "gh_upper <= sum_{j>K} 2^-(j+1) = 2^-(K+1)"});
    report.verdicts.push_back({"bounds_halve", halving, "ratio <= 1/2"});
    report.verdicts.push_back({"approximants_homogeneous", homog, "is_homogeneous on every approximant"});
    return report;
}

std::vector<std::string> sphere_candidate_names()
{
    std::vector<std::string> out = {"point"};
    for (const auto& n : archimedean_catalogue()) out.push_back(n);
    out.insert(out.end(), {"great_circle_6", "torus_grid_2x4", "cayley_s4", "path_3"});
    return out;
}

SphereCandidate sphere_candidate(const std::string& name)
{
    const double pi = std::numbers::pi;
    if (name == "point") return {name, FiniteMetricSpace::point(), std::vector<ModelPoint>{{0.0, 0.0, 1.0}}};
    if (name == "great_circle_6") {
        std::vector<ModelPoint> emb;
        for (int k = 0; k < 6; ++k) emb.push_back({std::cos(k * pi / 3), std::sin(k * pi / 3), 0.0});
        return {name, cycle_space(6, Length(pi / 3)).space, emb};
    }
    if (name == "torus_grid_2x4")
        return {name, torus_grid(2, 4, {Length(2 * pi), Length(2 * pi)}), std::nullopt};
    if (name == "cayley_s4") {
        auto s4 = FiniteGroup::symmetric(4);
        std::vector<std::uint32_t> gens;
        for (std::size_t i = 0; i + 1 < 4; ++i) {
            Permutation t = identity_permutation(4);
            std::swap(t[i], t[i + 1]);
            // Elements are the permutations of {0,1,2,3} in lexicographic order.
            Permutation p = identity_permutation(4);
            std::uint32_t index = 0;
            do {
                if (p == t) gens.push_back(index);
                ++index;
            } while (std::next_permutation(p.begin(), p.end()));
        }
        // Word diameter is 6 (the longest permutation).
        return {name, cayley_space(s4, gens, Length(pi / 6)).space, std::nullopt};
    }
    if (name == "path_3") {
        std::vector<double> d = {0, pi / 2, pi, pi / 2, 0, pi / 2, pi, pi / 2, 0};
        std::vector<ModelPoint> emb = {{1, 0, 0}, {0, 0, 1}, {-1, 0, 0}};
        return {name, FiniteMetricSpace::approximate(3, d), emb};
    }
    const auto& cat = archimedean_catalogue();
    if (std::find(cat.begin(), cat.end(), name) == cat.end())
        throw std::invalid_argument("unknown sphere candidate " + name);
    return {name, archimedean_vertices(name), archimedean_embedding(name)};
}

ExperimentReport exp_sphere_gap(const SphereGapParams& params, const RunOptions& options)
{
    auto report = start("sphere_gap", options,
                        {"candidate", "points", "gh_lower", "gh_upper", "net_slack", "lower_certificate"});
    report.parameters = {{"candidates", params.candidates}, {"mesh", length_to_json(params.mesh)}};
    GhOptions gh;
    gh.budget = options.budget;

    struct Outcome {
        bool kept = false;
        std::string note;
        std::vector<Cell> row;
        Length lower;
    };
    std::vector<Outcome> outcomes(params.candidates.size());
    parallel_for(params.candidates.size(), options.threads, [&](std::size_t i) {
        auto c = sphere_candidate(params.candidates[i]);
        auto homog = is_homogeneous(c.space);
        if (!homog || !*homog) {
            outcomes[i].note = c.name + " excluded: " + (homog ? "not homogeneous" : "homogeneity undecided");
            return;
        }
        auto b = gh_to_model(c.space, Sphere2{}, params.mesh, c.embedding, gh);
        outcomes[i] = {true,
                       {},
                       {Cell::of_text(c.name), Cell::of_count(c.space.size()), Cell::of(b.lower), Cell::of(b.upper),
                        Cell::of(b.net_slack), Cell::of_text(b.lower_certificate.describe())},
                       b.lower};
    });
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].kept)
            order.push_back(i);
        else
            report.notes.push_back(outcomes[i].note);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return outcomes[a].lower.value() < outcomes[b].lower.value(); });
    for (auto i : order) report.rows.push_back(outcomes[i].row);

    bool ordered = true;
    std::string point_detail = "no point row";
    bool point_ok = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        ordered = ordered && leq_tol(report.at(i, "gh_lower").length, report.at(i, "gh_upper").length);
        if (report.at(i, "candidate").text == "point") {
            const double expected = std::numbers::pi / 2 - report.at(i, "net_slack").length.value();
            const double got = report.at(i, "gh_lower").length.value();
            point_ok = std::abs(got - expected) <= 1e-6;
            point_detail = "point lower " + std::to_string(got) + " vs pi/2 - net_slack " + std::to_string(expected);
        }
    }
    report.verdicts.push_back({"lower_le_upper", ordered, "every row"});
    report.verdicts.push_back({"point_lower_is_half_pi", point_ok, point_detail});
    report.notes.push_back("measured gaps only; no convergence is claimed");
    return report;
}

ExperimentReport exp_lemma_suite(const LemmaSuiteParams& params, const RunOptions& options)
{
    if (params.trials < 1) throw std::invalid_argument("trials must be at least 1");
    auto report = start("lemma_suite", options, {"campaign", "instance", "measured", "bound", "holds", "detail"});
    report.parameters = {{"trials", params.trials}, {"tower", params.tower}, {"snap_instances", params.snap_instances}};
    std::mt19937_64 rng(options.seed);

    // Isometry entropy: random spaces first, then a fixed catalogue.
    struct EntropyCase {
        std::string name;
        FiniteMetricSpace space;
        Length eps;
    };
    std::vector<EntropyCase> cases;
    const std::vector<Length> random_eps = {Length(Rational(1, 2)), Length(1), Length(Rational(3, 2)), Length(2),
                                            Length(Rational(5, 2))};
    for (std::size_t t = 0; t < params.trials; ++t) {
        auto s = random_integer_metric(6, rng, 1, 3);
        auto e = random_eps[portable_uniform(rng, random_eps.size())];
        cases.push_back({"random6#" + std::to_string(t), std::move(s), e});
    }
    std::vector<std::pair<std::string, FiniteMetricSpace>> catalogue;
    for (std::int64_t n = 3; n <= 12; ++n)
        catalogue.emplace_back("cycle" + std::to_string(n),
                               cycle_space(static_cast<std::size_t>(n), Length(Rational(1, n))).space);
    for (const char* name : {"tetrahedron", "octahedron", "cube", "icosahedron"})
        catalogue.emplace_back(name, archimedean_vertices(name));
    catalogue.emplace_back("torus_grid_2x5", torus_grid(2, 5));
    catalogue.emplace_back("torus_grid_2x4", torus_grid(2, 4));
    catalogue.emplace_back("solenoid_3x6", solenoid_approximant(3, 6));
    for (const auto& [name, space] : catalogue)
        for (const auto& e : {Length(Rational(1, 10)), Length(Rational(1, 4)), Length(Rational(1, 2))})
            cases.push_back({name, space, space.is_exact() ? e : Length(e.value())});

    std::vector<IsometryEntropyCheck> checks(cases.size());
    parallel_for(cases.size(), options.threads,
                 [&](std::size_t i) { checks[i] = verify_isometry_entropy_bound(cases[i].space, cases[i].eps); });
    bool entropy_ok = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = checks[i];
        entropy_ok = entropy_ok && c.holds;
        report.rows.push_back({Cell::of_text("entropy"), Cell::of_text(cases[i].name),
                               Cell::of_count(c.lhs_upper, c.exact), Cell::of_count(c.rhs, c.rhs != UINT64_MAX),
                               Cell::of_flag(c.holds), Cell::of_text("eps=" + cases[i].eps.str())});
    }
    report.verdicts.push_back({"entropy_bound", entropy_ok, "packing of Isom(X) at eps <= E(eps/4)^E(eps/4)"});

    // Cycle towers: C_n against the 2n-point net (psi doubles indices) and
    // against 2n+1 points (psi rounds).
    bool limit_ok = true, towers_monotone = true;
    for (const char* family : {"doubling", "rounding"}) {
        std::vector<std::optional<LimitQuasiMorphism>> results(params.tower.size());
        parallel_for(params.tower.size(), options.threads, [&](std::size_t i) {
            const std::size_t n = params.tower[i];
            const std::size_t m = std::string(family) == "doubling" ? 2 * n : 2 * n + 1;
            auto gn = rotation_action(n), g = rotation_action(m);
            auto pairs = rounding_pairs(n, m);
            results[i] = limit_quasi_morphism(gn, g, limit_equivalences(gn, g, pairs, pairs));
        });
        std::vector<Length> defects;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = *results[i];
            limit_ok = limit_ok && r.within_bound;
            defects.push_back(r.defect.value);
            report.rows.push_back({Cell::of_text(std::string("limit_") + family),
                                   Cell::of_text("n=" + std::to_string(params.tower[i])), Cell::of(r.defect.value),
                                   Cell::of(r.certified_bound), Cell::of_flag(r.within_bound),
                                   Cell::of_text("eps=" + r.epsilon.str() + " triple_gap=" + r.triple_gap.str())});
        }
        towers_monotone = towers_monotone && nonincreasing(defects);
    }
    report.verdicts.push_back({"limit_11eps", limit_ok, "psi defect <= 11 eps on every tower row"});
    report.verdicts.push_back({"tower_defect_nonincreasing", towers_monotone, "within each family as n grows"});

    // Snapping: k/m plus offsets of at most eps/3 (so defect <= eps) snapped
    // to Z_k with eps = 1/(2k).
    struct SnapCase {
        std::int64_t m, k;
        std::vector<std::int64_t> offsets;
    };
    std::vector<SnapCase> snaps;
    for (std::size_t t = 0; t < params.snap_instances; ++t) {
        SnapCase c{portable_range(rng, 2, 30), portable_range(rng, 2, 40), {}};
        for (std::int64_t a = 0; a < c.m; ++a) c.offsets.push_back(portable_range(rng, -5, 5));
        snaps.push_back(std::move(c));
    }
    std::vector<std::optional<SnapResult>> snapped(snaps.size());
    parallel_for(snaps.size(), options.threads, [&](std::size_t i) {
        const auto& c = snaps[i];
        auto circle = std::make_shared<const MetricGroup>(MetricGroup::circle());
        std::vector<GroupElement> table, sub;
        for (std::int64_t a = 0; a < c.m; ++a)
            table.push_back(circle->element({Rational(a, c.m) + Rational(c.offsets[static_cast<std::size_t>(a)], 30 * c.k)}));
        for (std::int64_t j = 0; j < c.k; ++j) sub.push_back(circle->element({Rational(j, c.k)}));
        QuasiMap qm(FiniteGroup::cyclic(static_cast<std::size_t>(c.m)), circle, std::move(table));
        snapped[i] = snap_to_subgroup(qm, sub, Length(Rational(1, 2 * c.k)), Length(Rational(1, 1000)));
    });
    bool snap_ok = true;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto& r = *snapped[i];
        const std::string inst = "m=" + std::to_string(snaps[i].m) + " k=" + std::to_string(snaps[i].k);
        const Length budget = Length(4) * r.epsilon;
        const bool defect_ok = leq_tol(r.defect_before.value, r.epsilon) && leq_tol(r.defect_after.value, budget);
        const Length density_budget = r.density_before.upper + r.epsilon;
        const bool density_ok = leq_tol(r.density_after.upper, density_budget);
        snap_ok = snap_ok && defect_ok && density_ok;
        report.rows.push_back({Cell::of_text("snap_defect"), Cell::of_text(inst), Cell::of(r.defect_after.value),
                               Cell::of(budget), Cell::of_flag(defect_ok),
                               Cell::of_text("eps=" + r.epsilon.str() + " defect_before=" + r.defect_before.value.str())});
        report.rows.push_back({Cell::of_text("snap_density"), Cell::of_text(inst), Cell::of(r.density_after.upper),
                               Cell::of(density_budget), Cell::of_flag(density_ok),
                               Cell::of_text("density_before=" + r.density_before.upper.str())});
    }
    report.verdicts.push_back({"snap_budget", snap_ok, "defect <= 4 eps and density <= prior density + eps"});
    return report;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"converge_cycles", "torus", "solenoid", "sphere_gap",
                                                   "lemma_suite"};
    return names;
}

namespace {

std::vector<Length> lengths_from(const json& j)
{
    std::vector<Length> out;
    for (const auto& v : j) out.push_back(length_from_json(v));
    return out;
}

void reject_unknown(const json& params, std::initializer_list<const char*> keys)
{
    if (!params.is_object()) throw std::invalid_argument("experiment parameters must be a JSON object");
    for (const auto& [k, v] : params.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; }))
            throw std::invalid_argument("unknown parameter " + k);
}

} // namespace

ExperimentReport run_experiment(const std::string& name, const json& params, const RunOptions& options)
{
    try {
        if (name == "converge_cycles") {
            reject_unknown(params, {"n", "eps", "mesh"});
            ConvergeCyclesParams p;
            if (params.contains("n")) p.n_list = params["n"].get<std::vector<std::size_t>>();
            if (params.contains("eps")) p.eps_list = lengths_from(params["eps"]);
            if (params.contains("mesh")) p.mesh = length_from_json(params["mesh"]);
            return exp_converge_cycles(p, options);
        }
        if (name == "torus") {
            reject_unknown(params, {"d", "m", "mesh"});
            TorusParams p;
            if (params.contains("d")) p.d = params["d"].get<std::size_t>();
            if (params.contains("m")) p.m_list = params["m"].get<std::vector<std::size_t>>();
            if (params.contains("mesh")) p.mesh = length_from_json(params["mesh"]);
            return exp_torus(p, options);
        }
        if (name == "solenoid") {
            reject_unknown(params, {"depths", "multiplier"});
            SolenoidParams p;
            if (params.contains("depths")) p.depths = params["depths"].get<std::vector<int>>();
            if (params.contains("multiplier")) p.multiplier = params["multiplier"].get<std::size_t>();
            return exp_solenoid(p, options);
        }
        if (name == "sphere_gap") {
            reject_unknown(params, {"candidates", "mesh"});
            SphereGapParams p;
            if (params.contains("candidates")) p.candidates = params["candidates"].get<std::vector<std::string>>();
            if (params.contains("mesh")) p.mesh = length_from_json(params["mesh"]);
            return exp_sphere_gap(p, options);
        }
        if (name == "lemma_suite") {
            reject_unknown(params, {"trials", "tower", "snap_instances"});
            LemmaSuiteParams p;
            if (params.contains("trials")) p.trials = params["trials"].get<std::size_t>();
            if (params.contains("tower")) p.tower = params["tower"].get<std::vector<std::size_t>>();
            if (params.contains("snap_instances")) p.snap_instances = params["snap_instances"].get<std::size_t>();
            return exp_lemma_suite(p, options);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad experiment parameter: ") + e.what());
    }
    throw std::invalid_argument("unknown experiment " + name);
}

} // namespace finhom
