#include "finhom/gh.hpp"

#include "finhom/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace finhom {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
constexpr std::int64_t kScaleLimit = std::int64_t{1} << 61;

// Distances of both spaces on one scale: integers over a shared denominator
// when both are exact and small enough, doubles otherwise.
struct Joint {
    std::size_t nx = 0, ny = 0;
    bool integral = false;
    std::int64_t den = 1;
    std::vector<std::int64_t> ix, iy;
    std::vector<double> vx, vy;
    double tol = 0.0;

    Length length(std::int64_t v) const { return Length(Rational(v, den)); }
    Length length(double v) const { return Length(v); }
};

bool rescale(const std::vector<std::int64_t>& in, std::int64_t factor, std::vector<std::int64_t>& out)
{
    out.resize(in.size());
    for (std::size_t e = 0; e < in.size(); ++e) {
        if (__builtin_mul_overflow(in[e], factor, &out[e]) || out[e] > kScaleLimit) return false;
    }
    return true;
}

Joint make_joint(const FiniteMetricSpace& x, const FiniteMetricSpace& y)
{
    Joint j;
    j.nx = x.size();
    j.ny = y.size();
    if (x.is_exact() && y.is_exact()) {
        auto sx = x.scaled();
        auto sy = y.scaled();
        if (sx && sy) {
            try {
                const std::int64_t l = lcm_checked(sx->denominator, sy->denominator);
                if (rescale(sx->values, l / sx->denominator, j.ix) && rescale(sy->values, l / sy->denominator, j.iy)) {
                    j.integral = true;
                    j.den = l;
                    return j;
                }
            } catch (const std::overflow_error&) {
            }
        }
    }
    j.vx.resize(j.nx * j.nx);
    j.vy.resize(j.ny * j.ny);
    for (std::size_t a = 0; a < j.nx; ++a)
        for (std::size_t b = 0; b < j.nx; ++b) j.vx[a * j.nx + b] = x.value(a, b);
    for (std::size_t a = 0; a < j.ny; ++a)
        for (std::size_t b = 0; b < j.ny; ++b) j.vy[a * j.ny + b] = y.value(a, b);
    j.tol = std::max(x.tolerance(), y.tolerance());
    return j;
}

template <class F>
Length with_joint(const Joint& j, F&& fn)
{
    if (j.integral) return j.length(fn(j.ix, j.iy));
    return j.length(fn(j.vx, j.vy));
}

template <class T>
T absdiff(T a, T b)
{
    return a > b ? a - b : b - a;
}

template <class T>
T pairs_distortion(const std::vector<T>& dx, const std::vector<T>& dy, std::size_t nx, std::size_t ny,
                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
{
    T worst{};
    for (std::size_t p = 0; p < pairs.size(); ++p)
        for (std::size_t r = p + 1; r < pairs.size(); ++r) {
            auto [a, b] = pairs[p];
            auto [c, d] = pairs[r];
            worst = std::max(worst, absdiff(dx[a * nx + c], dy[b * ny + d]));
        }
    return worst;
}

// Greedy map anchored at f(0) = anchor: remaining points in order of distance
// from 0 go to the target point that least increases the distortion so far.
template <class T>
std::vector<std::size_t> anchored_greedy(const std::vector<T>& dx, const std::vector<T>& dy, std::size_t nx,
                                         std::size_t ny, std::size_t anchor)
{
    std::vector<std::size_t> order(nx);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dx[a] < dx[b]; });
    std::vector<std::size_t> f(nx, npos);
    f[order[0]] = anchor;
    for (std::size_t k = 1; k < nx; ++k) {
        const std::size_t x = order[k];
        std::size_t best = 0;
        T best_cost{};
        for (std::size_t y = 0; y < ny; ++y) {
            T cost{};
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t a = order[i];
                cost = std::max(cost, absdiff(dx[x * nx + a], dy[y * ny + f[a]]));
            }
            if (y == 0 || cost < best_cost) {
                best = y;
                best_cost = cost;
            }
        }
        f[x] = best;
    }
    return f;
}

template <class T>
std::vector<std::pair<std::size_t, std::size_t>> map_pairs(const std::vector<T>& dy, std::size_t ny,
                                                           const std::vector<std::size_t>& f)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> covered(ny, false);
    for (std::size_t x = 0; x < f.size(); ++x) {
        pairs.emplace_back(x, f[x]);
        covered[f[x]] = true;
    }
    for (std::size_t y = 0; y < ny; ++y) {
        if (covered[y]) continue;
        std::size_t best = 0;
        for (std::size_t x = 1; x < f.size(); ++x)
            if (dy[f[x] * ny + y] < dy[f[best] * ny + y]) best = x;
        pairs.emplace_back(best, y);
    }
    return pairs;
}

// Branch and bound over (f, g). A y already hit by f needs no g branch: the
// pair (f^-1(y), y) is in the relation anyway.
template <class T>
class GhSearch {
public:
    GhSearch(const std::vector<T>& dx, const std::vector<T>& dy, std::size_t nx, std::size_t ny, T incumbent,
             std::vector<std::pair<std::size_t, std::size_t>> incumbent_pairs, T lower, std::uint64_t budget)
        : dx_(dx), dy_(dy), nx_(nx), ny_(ny), best_(incumbent), best_pairs_(std::move(incumbent_pairs)),
          lower_(lower), budget_(budget), f_(nx, npos), g_(ny, npos), hits_(ny, 0)
    {
    }

    void run()
    {
        if (best_ <= lower_) return;
        dfs();
    }

    T best() const { return best_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& best_pairs() const { return best_pairs_; }
    bool aborted() const { return aborted_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    T cost(std::size_t x, std::size_t y) const
    {
        T c{};
        for (auto [a, b] : pairs_) c = std::max(c, absdiff(dx_[x * nx_ + a], dy_[y * ny_ + b]));
        return c;
    }

    struct Choice {
        std::size_t var = npos;
        std::vector<std::pair<T, std::size_t>> values;
    };

    // Variable with the fewest values that keep the distortion below the
    // incumbent; an empty choice with var set means a dead end.
    Choice choose_x() const
    {
        Choice best;
        for (std::size_t x = 0; x < nx_; ++x) {
            if (f_[x] != npos) continue;
            std::vector<std::pair<T, std::size_t>> values;
            for (std::size_t y = 0; y < ny_; ++y) {
                T c = cost(x, y);
                if (c < best_) values.emplace_back(c, y);
            }
            if (best.var == npos || values.size() < best.values.size()) {
                best.var = x;
                best.values = std::move(values);
                if (best.values.empty()) return best;
            }
        }
        return best;
    }

    Choice choose_y() const
    {
        Choice best;
        for (std::size_t y = 0; y < ny_; ++y) {
            if (hits_[y] > 0 || g_[y] != npos) continue;
            std::vector<std::pair<T, std::size_t>> values;
            for (std::size_t x = 0; x < nx_; ++x) {
                T c = cost(x, y);
                if (c < best_) values.emplace_back(c, x);
            }
            if (best.var == npos || values.size() < best.values.size()) {
                best.var = y;
                best.values = std::move(values);
                if (best.values.empty()) return best;
            }
        }
        return best;
    }

    void dfs()
    {
        if (stop_) return;
        if (++nodes_ > budget_) {
            aborted_ = stop_ = true;
            return;
        }
        Choice c = choose_x();
        const bool x_phase = c.var != npos;
        if (!x_phase) c = choose_y();
        if (c.var == npos) {
            best_ = current_;
            best_pairs_ = pairs_;
            if (best_ <= lower_) stop_ = true;
            return;
        }
        std::stable_sort(c.values.begin(), c.values.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto [cost_value, v] : c.values) {
            if (stop_) return;
            if (!(cost_value < best_)) break;
            const T saved = current_;
            current_ = std::max(current_, cost_value);
            if (x_phase) {
                f_[c.var] = v;
                ++hits_[v];
                pairs_.emplace_back(c.var, v);
            } else {
                g_[c.var] = v;
                pairs_.emplace_back(v, c.var);
            }
            dfs();
            pairs_.pop_back();
            if (x_phase) {
                --hits_[v];
                f_[c.var] = npos;
            } else {
                g_[c.var] = npos;
            }
            current_ = saved;
        }
    }

    const std::vector<T>& dx_;
    const std::vector<T>& dy_;
    std::size_t nx_, ny_;
    T best_;
    std::vector<std::pair<std::size_t, std::size_t>> best_pairs_;
    T lower_;
    std::uint64_t budget_;
    std::vector<std::size_t> f_, g_;
    std::vector<std::size_t> hits_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    T current_{};
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
    bool stop_ = false;
};

std::vector<std::size_t> thin_indices(std::size_t first, std::size_t last, std::size_t limit)
{
    std::vector<std::size_t> out;
    if (last < first) return out;
    const std::size_t count = last - first + 1;
    if (count <= limit || limit < 2) {
        for (std::size_t k = first; k <= last; ++k) out.push_back(k);
        return out;
    }
    for (std::size_t i = 0; i < limit; ++i) {
        std::size_t k = first + (i * (count - 1) + (limit - 1) / 2) / (limit - 1);
        if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
}

struct TransferBound {
    Length value;
    GhLowerCertificate certificate;
    bool found = false;
};

TransferBound packing_transfer(const FiniteMetricSpace& from, const FiniteMetricSpace& to, bool from_x,
                               std::size_t level_limit)
{
    TransferBound out;
    const auto& lf = from.levels();
    const auto& lt = to.levels();
    if (lf.size() < 2) return out;
    const Length slack = Length(from.tolerance() + to.tolerance());
    // Upper bounds for `to` at eps' -> 0+ and at each chosen level.
    std::vector<std::pair<Length, std::size_t>> to_side = {{Length(0), to.size()}};
    for (auto m : thin_indices(1, lt.size() - 1, level_limit))
        to_side.emplace_back(lt[m], packing_number(to, lt[m]).upper);
    // packing(from, eps) is constant for eps in [lf[k], lf[k+1]).
    for (auto k : thin_indices(0, lf.size() - 2, level_limit)) {
        const std::size_t p = k == 0 ? from.size() : packing_number(from, lf[k]).count;
        // The smallest eps' where `to` packs fewer points gives the best bound.
        for (const auto& [eps_prime, qcount] : to_side) {
            if (qcount >= p) continue;
            Length v = (lf[k + 1] - eps_prime) / Length(2);
            if (!from.is_exact() || !to.is_exact()) v = v - slack;
            if (v > out.value) {
                out.value = v;
                out.found = true;
                out.certificate.kind = GhLowerCertificate::Kind::packing_transfer;
                out.certificate.from_x = from_x;
                out.certificate.eps = lf[k + 1];
                out.certificate.eps_prime = eps_prime;
                out.certificate.packing_from = p;
                out.certificate.packing_to = qcount;
            }
            break;
        }
    }
    return out;
}

template <class T>
T to_units(const Joint& j, const Length& l);

template <>
std::int64_t to_units<std::int64_t>(const Joint& j, const Length& l)
{
    // Lower bounds are differences of distances, so they are whole units.
    Rational r = l.exact() * Rational(j.den);
    return r.floor();
}

template <>
double to_units<double>(const Joint& j, const Length& l)
{
    return l.value() - 2 * j.tol;
}

template <class T>
GhBounds run_exact(const Joint& j, const std::vector<T>& dx, const std::vector<T>& dy, const GhLowerBound& lb,
                   const GhOptions& options)
{
    const std::size_t nx = j.nx, ny = j.ny;
    // Incumbent: the relation {(x, 0)} u {(0, y)} or an anchored greedy map.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < nx; ++x) pairs.emplace_back(x, 0);
    for (std::size_t y = 1; y < ny; ++y) pairs.emplace_back(0, y);
    T incumbent = pairs_distortion(dx, dy, nx, ny, pairs);
    for (std::size_t anchor = 0; anchor < ny; ++anchor) {
        auto greedy = map_pairs(dy, ny, anchored_greedy(dx, dy, nx, ny, anchor));
        T d = pairs_distortion(dx, dy, nx, ny, greedy);
        if (d < incumbent) {
            incumbent = d;
            pairs = std::move(greedy);
        }
    }
    const T lower = to_units<T>(j, lb.value * Length(2));
    GhSearch<T> search(dx, dy, nx, ny, incumbent, pairs, lower, options.budget);
    search.run();
    GhBounds out;
    out.upper = j.length(search.best()) / Length(2);
    out.upper_certificate = Correspondence::from_pairs(search.best_pairs());
    out.nodes = search.nodes();
    out.exact = !search.aborted();
    if (out.exact) {
        out.lower = out.upper;
        out.lower_certificate.kind = GhLowerCertificate::Kind::search;
    } else {
        out.lower = lb.value;
        out.lower_certificate = lb.certificate;
    }
    return out;
}

} // namespace

Correspondence Correspondence::from_pairs(std::vector<std::pair<std::size_t, std::size_t>> pairs)
{
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return Correspondence{std::move(pairs)};
}

Correspondence Correspondence::from_maps(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < f.size(); ++x) pairs.emplace_back(x, f[x]);
    for (std::size_t y = 0; y < g.size(); ++y) pairs.emplace_back(g[y], y);
    return from_pairs(std::move(pairs));
}

Correspondence Correspondence::diagonal(std::size_t n)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(k, k);
    return Correspondence{std::move(pairs)};
}

bool Correspondence::surjective(std::size_t nx, std::size_t ny) const
{
    std::vector<bool> hx(nx, false), hy(ny, false);
    for (auto [a, b] : pairs) {
        if (a >= nx || b >= ny) return false;
        hx[a] = true;
        hy[b] = true;
    }
    return std::all_of(hx.begin(), hx.end(), [](bool v) { return v; }) &&
           std::all_of(hy.begin(), hy.end(), [](bool v) { return v; });
}

Length distortion(const Correspondence& corr, const FiniteMetricSpace& x, const FiniteMetricSpace& y)
{
    if (!corr.surjective(x.size(), y.size()))
        throw std::invalid_argument("relation is not a correspondence (not onto both spaces)");
    Joint j = make_joint(x, y);
    return with_joint(j, [&](const auto& dx, const auto& dy) {
        return pairs_distortion(dx, dy, j.nx, j.ny, corr.pairs);
    });
}

std::string GhLowerCertificate::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::trivial: os << "trivial"; break;
    case Kind::diameter: os << "diameter gap"; break;
    case Kind::search: os << "exhaustive search"; break;
    case Kind::packing_transfer:
        os << "packing transfer: " << (from_x ? "X" : "Y") << " packs " << packing_from << " points below eps "
           << eps.str() << ", " << (from_x ? "Y" : "X") << " packs at most " << packing_to << " at eps' "
           << eps_prime.str();
        break;
    }
    return os.str();
}

GhLowerBound gh_lower_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const GhOptions& options)
{
    GhLowerBound out;
    out.value = abs(x.diameter() - y.diameter()) / Length(2);
    if (!x.is_exact() || !y.is_exact()) out.value = max(Length(0.0), out.value - Length(x.tolerance() + y.tolerance()));
    out.certificate.kind = out.value > Length(0) ? GhLowerCertificate::Kind::diameter : GhLowerCertificate::Kind::trivial;
    for (bool from_x : {true, false}) {
        auto t = from_x ? packing_transfer(x, y, true, options.transfer_levels)
                        : packing_transfer(y, x, false, options.transfer_levels);
        if (t.found && t.value > out.value) {
            out.value = t.value;
            out.certificate = t.certificate;
        }
    }
    return out;
}

GhBounds gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const GhOptions& options)
{
    auto lb = gh_lower_bounds(x, y, options);
    Joint j = make_joint(x, y);
    if (j.integral) return run_exact(j, j.ix, j.iy, lb, options);
    return run_exact(j, j.vx, j.vy, lb, options);
}

MapBound gh_upper_from_map(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const std::vector<std::size_t>& f)
{
    if (f.size() != x.size()) throw std::invalid_argument("map must be defined on every point");
    for (auto v : f)
        if (v >= y.size()) throw std::invalid_argument("map value out of range");
    Joint j = make_joint(x, y);
    MapBound out;
    out.value = with_joint(j, [&](const auto& dx, const auto& dy) {
        auto pairs = map_pairs(dy, j.ny, f);
        out.corr = Correspondence::from_pairs(pairs);
        return pairs_distortion(dx, dy, j.nx, j.ny, out.corr.pairs);
    }) / Length(2);
    return out;
}

GhBounds gh_to_model(const FiniteMetricSpace& x, const ModelSpace& model, const Length& mesh,
                     const std::optional<std::vector<ModelPoint>>& embedding, const GhOptions& options)
{
    ModelNet net = model_net(model, mesh);
    const Length h = net.hausdorff_bound;
    const std::size_t nx = x.size(), ny = net.space.size();
    GhBounds inner;
    if (std::max(nx, ny) <= 7) {
        inner = gh_exact(x, net.space, options);
    } else {
        auto lb = gh_lower_bounds(x, net.space, options);
        inner.lower = lb.value;
        inner.lower_certificate = lb.certificate;
        // {(x, 0)} u {(0, y)} is always available.
        std::vector<std::size_t> f0(nx, 0), g0(ny, 0);
        inner.upper_certificate = Correspondence::from_maps(f0, g0);
        inner.upper = distortion(inner.upper_certificate, x, net.space) / Length(2);
        auto consider = [&](const MapBound& m) {
            if (m.value < inner.upper) {
                inner.upper = m.value;
                inner.upper_certificate = m.corr;
            }
        };
        if (embedding) {
            if (embedding->size() != nx) throw std::invalid_argument("embedding must give one model point per point");
            std::vector<std::size_t> f(nx);
            for (std::size_t p = 0; p < nx; ++p) f[p] = nearest_net_point(model, net, (*embedding)[p]);
            consider(gh_upper_from_map(x, net.space, f));
        } else if (static_cast<double>(nx) * static_cast<double>(nx) * static_cast<double>(ny) <= 5e7) {
            Joint j = make_joint(x, net.space);
            std::vector<std::size_t> f = j.integral ? anchored_greedy(j.ix, j.iy, nx, ny, 0)
                                                    : anchored_greedy(j.vx, j.vy, nx, ny, 0);
            consider(gh_upper_from_map(x, net.space, f));
        }
    }
    GhBounds out = inner;
    out.lower = max(Length(0), inner.lower - h);
    out.upper = inner.upper + h;
    out.exact = inner.exact && h == Length(0);
    out.net_slack = h;
    return out;
}

EpsilonEquivalence epsilon_equivalence(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                       const Correspondence& corr)
{
    EpsilonEquivalence out;
    out.epsilon = distortion(corr, x, y);
    out.f.assign(x.size(), npos);
    out.g.assign(y.size(), npos);
    for (auto [a, b] : corr.pairs) {
        out.f[a] = std::min(out.f[a], b);
        out.g[b] = std::min(out.g[b], a);
    }
    return out;
}

Length EquivalenceDefects::worst() const
{
    return max(max(distortion_f, distortion_g), max(displacement_gf, displacement_fg));
}

EquivalenceDefects equivalence_defects(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                       const std::vector<std::size_t>& f, const std::vector<std::size_t>& g)
{
    if (f.size() != x.size() || g.size() != y.size()) throw std::invalid_argument("maps must be total");
    for (auto v : f)
        if (v >= y.size()) throw std::invalid_argument("map value out of range");
    for (auto v : g)
        if (v >= x.size()) throw std::invalid_argument("map value out of range");
    Joint j = make_joint(x, y);
    const std::size_t nx = j.nx, ny = j.ny;
    EquivalenceDefects out;
    out.distortion_f = with_joint(j, [&](const auto& dx, const auto& dy) {
        std::decay_t<decltype(dx[0])> m{};
        for (std::size_t a = 0; a < nx; ++a)
            for (std::size_t b = 0; b < nx; ++b) m = std::max(m, absdiff(dx[a * nx + b], dy[f[a] * ny + f[b]]));
        return m;
    });
    out.distortion_g = with_joint(j, [&](const auto& dx, const auto& dy) {
        std::decay_t<decltype(dx[0])> m{};
        for (std::size_t a = 0; a < ny; ++a)
            for (std::size_t b = 0; b < ny; ++b) m = std::max(m, absdiff(dy[a * ny + b], dx[g[a] * nx + g[b]]));
        return m;
    });
    out.displacement_gf = with_joint(j, [&](const auto& dx, const auto&) {
        std::decay_t<decltype(dx[0])> m{};
        for (std::size_t a = 0; a < nx; ++a) m = std::max(m, dx[a * nx + g[f[a]]]);
        return m;
    });
    out.displacement_fg = with_joint(j, [&](const auto&, const auto& dy) {
        std::decay_t<decltype(dy[0])> m{};
        for (std::size_t b = 0; b < ny; ++b) m = std::max(m, dy[b * ny + f[g[b]]]);
        return m;
    });
    return out;
}

} // namespace finhom
