#include "finhom/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace finhom {

namespace {

double arc01(double s, double t)
{
    double d = std::fmod(std::abs(s - t), 1.0);
    return std::min(d, 1.0 - d);
}

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 normalized(const Vec3& v)
{
    double len = std::sqrt(dot(v, v));
    return {v[0] / len, v[1] / len, v[2] / len};
}

Vec3 to_vec(const ModelPoint& p) { return {p.at(0), p.at(1), p.at(2)}; }

// Smallest m with c / (2m) <= mesh.
std::int64_t grid_size(const Length& circumference, const Length& mesh)
{
    Length ratio = circumference / (Length(2) * mesh);
    std::int64_t m = ratio.is_exact() ? ratio.exact().ceil() : static_cast<std::int64_t>(std::ceil(ratio.value() - 1e-12));
    return std::max<std::int64_t>(m, 1);
}

void check_budget(std::size_t required)
{
    if (required > kMaxNetPoints) throw NetTooLarge(required, kMaxNetPoints);
}

} // namespace

FiniteMetricSpace circulant_space(const std::vector<Length>& row, std::string provenance)
{
    const std::size_t n = row.size();
    const bool exact = std::all_of(row.begin(), row.end(), [](const Length& l) { return l.is_exact(); });
    if (exact) {
        std::vector<Rational> d(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) d[a * n + b] = row[(a + n - b) % n].exact();
        return FiniteMetricSpace::exact(n, std::move(d), std::move(provenance));
    }
    std::vector<double> d(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) d[a * n + b] = row[(a + n - b) % n].value();
    return FiniteMetricSpace::approximate(n, std::move(d), kDefaultTolerance, std::move(provenance));
}

namespace {

ModelNet circle_net(const Length& circumference, const Length& mesh)
{
    const std::int64_t m = grid_size(circumference, mesh);
    check_budget(static_cast<std::size_t>(m));
    const auto n = static_cast<std::size_t>(m);
    std::vector<Length> row(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto steps = static_cast<std::int64_t>(k);
        row[k] = circumference * Length(Rational(std::min(steps, m - steps), m));
    }
    ModelNet net{circulant_space(row, "circle_net(" + std::to_string(m) + ")"), {},
                 circumference / Length(Rational(2 * m))};
    for (std::size_t a = 0; a < n; ++a) net.points.push_back({static_cast<double>(a) / static_cast<double>(m)});
    return net;
}

} // namespace

SolenoidTruncation SolenoidTruncation::factorial(int depth)
{
    if (depth < 1) throw std::invalid_argument("solenoid depth must be at least 1");
    SolenoidTruncation s;
    std::int64_t order = 1;
    for (int j = 1; j <= depth; ++j) {
        order *= j;
        s.orders.push_back(order);
        s.weights.emplace_back(Rational(1, std::int64_t{1} << j));
    }
    return s;
}

NetTooLarge::NetTooLarge(std::size_t required, std::size_t limit)
    : std::runtime_error("net needs " + std::to_string(required) + " points, budget is " + std::to_string(limit)),
      required_(required)
{
}

std::string model_name(const ModelSpace& model)
{
    struct Visitor {
        std::string operator()(const Circle& c) const { return "circle(" + c.circumference.str() + ")"; }
        std::string operator()(const Torus& t) const { return "torus(" + std::to_string(t.circumferences.size()) + ")"; }
        std::string operator()(const Sphere2& s) const { return "sphere2(" + Length(s.radius).str() + ")"; }
        std::string operator()(const SolenoidTruncation& s) const
        {
            return "solenoid_truncation(" + std::to_string(s.orders.size()) + ")";
        }
    };
    return std::visit(Visitor{}, model);
}

void check_model(const ModelSpace& model)
{
    struct Visitor {
        void operator()(const Circle& c) const
        {
            if (!(c.circumference > Length(0))) throw std::invalid_argument("circle circumference must be positive");
        }
        void operator()(const Torus& t) const
        {
            if (t.circumferences.empty()) throw std::invalid_argument("torus needs at least one factor");
            for (const auto& c : t.circumferences)
                if (!(c > Length(0))) throw std::invalid_argument("torus circumferences must be positive");
        }
        void operator()(const Sphere2& s) const
        {
            if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
        }
        void operator()(const SolenoidTruncation& s) const
        {
            if (s.orders.empty() || s.orders.size() != s.weights.size())
                throw std::invalid_argument("solenoid truncation needs matching orders and weights");
            for (std::size_t j = 0; j < s.orders.size(); ++j) {
                if (s.orders[j] < 1) throw std::invalid_argument("solenoid level orders must be positive");
                if (j > 0 && s.orders[j] % s.orders[j - 1] != 0)
                    throw std::invalid_argument("solenoid level orders must divide each other");
                if (!(s.weights[j] > Length(0))) throw std::invalid_argument("solenoid weights must be positive");
            }
        }
    };
    std::visit(Visitor{}, model);
}

double model_distance(const ModelSpace& model, const ModelPoint& a, const ModelPoint& b)
{
    struct Visitor {
        const ModelPoint& a;
        const ModelPoint& b;
        double operator()(const Circle& c) const { return c.circumference.value() * arc01(a.at(0), b.at(0)); }
        double operator()(const Torus& t) const
        {
            double m = 0.0;
            for (std::size_t j = 0; j < t.circumferences.size(); ++j)
                m = std::max(m, t.circumferences[j].value() * arc01(a.at(j), b.at(j)));
            return m;
        }
        double operator()(const Sphere2& s) const { return s.radius * sphere_angle(to_vec(a), to_vec(b)); }
        double operator()(const SolenoidTruncation& s) const
        {
            double sum = 0.0;
            const double delta = a.at(0) - b.at(0);
            for (std::size_t j = 0; j < s.orders.size(); ++j)
                sum += s.weights[j].value() * arc01(delta * static_cast<double>(s.multiplier(j)), 0.0);
            return sum;
        }
    };
    return std::visit(Visitor{a, b}, model);
}

double sphere_angle(const Vec3& a, const Vec3& b)
{
    Vec3 c = cross(a, b);
    return std::atan2(std::sqrt(dot(c, c)), dot(a, b));
}

SphereMesh icosphere(int frequency)
{
    if (frequency < 1) throw std::invalid_argument("icosphere frequency must be positive");
    const double phi = std::numbers::phi;
    const std::vector<Vec3> base = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    const std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    SphereMesh mesh;
    std::map<std::tuple<long long, long long, long long>, std::size_t> index;
    auto vertex_id = [&](const Vec3& v) {
        Vec3 u = normalized(v);
        auto key = std::make_tuple(std::llround(u[0] * 1e9), std::llround(u[1] * 1e9), std::llround(u[2] * 1e9));
        auto [it, inserted] = index.emplace(key, mesh.vertices.size());
        if (inserted) mesh.vertices.push_back(u);
        return it->second;
    };
    const double f = frequency;
    for (const auto& face : faces) {
        const Vec3& A = base[face[0]];
        const Vec3& B = base[face[1]];
        const Vec3& C = base[face[2]];
        auto at = [&](int i, int j) {
            Vec3 p;
            for (int k = 0; k < 3; ++k) p[k] = A[k] + (B[k] - A[k]) * (i / f) + (C[k] - A[k]) * (j / f);
            return vertex_id(p);
        };
        for (int i = 0; i < frequency; ++i)
            for (int j = 0; i + j < frequency; ++j) {
                mesh.triangles.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
                if (i + j + 1 < frequency) mesh.triangles.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
            }
    }
    return mesh;
}

double icosphere_covering_bound(const SphereMesh& mesh)
{
    double worst = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        Vec3 ac{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        Vec3 centre = normalized(cross(ab, ac));
        if (dot(centre, a) < 0) centre = {-centre[0], -centre[1], -centre[2]};
        worst = std::max(worst, sphere_angle(centre, a));
    }
    return worst * (1.0 + 1e-9);
}

ModelNet model_net(const ModelSpace& model, const Length& mesh)
{
    if (!(mesh > Length(0))) throw std::invalid_argument("mesh must be positive");
    check_model(model);

    if (const auto* c = std::get_if<Circle>(&model)) return circle_net(c->circumference, mesh);

    if (const auto* t = std::get_if<Torus>(&model)) {
        std::vector<ModelNet> factors;
        std::size_t required = 1;
        for (const auto& c : t->circumferences) {
            required *= static_cast<std::size_t>(grid_size(c, mesh));
            check_budget(required);
        }
        for (const auto& c : t->circumferences) factors.push_back(circle_net(c, mesh));
        std::vector<FiniteMetricSpace> spaces;
        Length bound(0);
        for (const auto& f : factors) {
            spaces.push_back(f.space);
            bound = max(bound, f.hausdorff_bound);
        }
        ModelNet net{sup_product(spaces), {}, bound};
        net.space.set_provenance("torus_net");
        for (std::size_t p = 0; p < net.space.size(); ++p) {
            ModelPoint point(factors.size());
            std::size_t rest = p;
            for (std::size_t f = factors.size(); f-- > 0;) {
                point[f] = factors[f].points[rest % factors[f].points.size()][0];
                rest /= factors[f].points.size();
            }
            net.points.push_back(std::move(point));
        }
        return net;
    }

    if (const auto* s = std::get_if<Sphere2>(&model)) {
        for (int f = 1;; ++f) {
            std::size_t required = static_cast<std::size_t>(10 * f * f + 2);
            check_budget(required);
            SphereMesh m = icosphere(f);
            double bound = s->radius * icosphere_covering_bound(m);
            if (bound > mesh.value()) continue;
            const std::size_t n = m.vertices.size();
            std::vector<double> d(n * n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) d[a * n + b] = s->radius * sphere_angle(m.vertices[a], m.vertices[b]);
            ModelNet net{FiniteMetricSpace::approximate(n, std::move(d), kDefaultTolerance,
                                                        "icosphere(" + std::to_string(f) + ")"),
                         {}, Length(bound)};
            for (const auto& v : m.vertices) net.points.push_back({v[0], v[1], v[2]});
            return net;
        }
    }

    const auto& sol = std::get<SolenoidTruncation>(model);
    const std::int64_t top = sol.orders.back();
    Length spread(0);
    for (std::size_t j = 0; j < sol.orders.size(); ++j)
        spread += sol.weights[j] * Length(Rational(sol.multiplier(j)));
    // Grid of M points on the deepest level, M a multiple of its order.
    Length blocks = spread / (Length(2) * mesh * Length(Rational(top)));
    std::int64_t k = blocks.is_exact() ? blocks.exact().ceil() : static_cast<std::int64_t>(std::ceil(blocks.value() - 1e-12));
    const std::int64_t M = std::max<std::int64_t>(k, 1) * top;
    check_budget(static_cast<std::size_t>(M));
    const auto n = static_cast<std::size_t>(M);
    std::vector<Length> row(n);
    for (std::size_t a = 0; a < n; ++a) {
        Length sum(0);
        for (std::size_t j = 0; j < sol.orders.size(); ++j)
            sum += sol.weights[j] *
                   Length(arc_distance(Rational(static_cast<std::int64_t>(a) * sol.multiplier(j), M), Rational(0)));
        row[a] = sum;
    }
    ModelNet net{circulant_space(row, "solenoid_net(" + std::to_string(M) + ")"), {},
                 spread / Length(Rational(2 * M))};
    for (std::size_t a = 0; a < n; ++a) net.points.push_back({static_cast<double>(a) / static_cast<double>(M)});
    return net;
}

std::size_t nearest_net_point(const ModelSpace& model, const ModelNet& net, const ModelPoint& p)
{
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < net.points.size(); ++i) {
        double d = model_distance(model, net.points[i], p);
        if (d < best_d - 1e-15) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

} // namespace finhom
