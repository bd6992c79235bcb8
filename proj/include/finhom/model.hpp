#pragma once

#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace finhom {

/// Circle of the given circumference with the arc metric.
struct Circle {
    Length circumference = Length(1);
};

/// Product of circles with the sup of the coordinate arc metrics.
struct Torus {
    std::vector<Length> circumferences;
};

/// Round sphere with the great-circle metric.
struct Sphere2 {
    double radius = 1.0;
};

/// Image of the solenoid in its first K levels. Level j is a circle of
/// order `orders[j]` (each order divides the next) and consecutive levels
/// are bonded by z -> z^(orders[j+1]/orders[j]). A point is described by its
/// position t on the deepest level; level j then sits at t * (orders.back() /
/// orders[j]) and the distance is the weighted sum of level arcs.
struct SolenoidTruncation {
    std::vector<std::int64_t> orders;
    std::vector<Length> weights;

    /// Orders 1!, 2!, ..., K! with weights 2^-1, ..., 2^-K.
    static SolenoidTruncation factorial(int depth);
    std::int64_t multiplier(std::size_t level) const { return orders.back() / orders[level]; }
};

using ModelSpace = std::variant<Circle, Torus, Sphere2, SolenoidTruncation>;

/// Circle, torus and solenoid points are positions in [0,1) per coordinate;
/// sphere points are unit vectors.
using ModelPoint = std::vector<double>;

std::string model_name(const ModelSpace& model);
double model_distance(const ModelSpace& model, const ModelPoint& a, const ModelPoint& b);
/// Throws std::invalid_argument on malformed parameters.
void check_model(const ModelSpace& model);

struct ModelNet {
    FiniteMetricSpace space;
    std::vector<ModelPoint> points;
    /// Certified bound on the Hausdorff distance between the net and the model.
    Length hausdorff_bound;
};

inline constexpr std::size_t kMaxNetPoints = 2500;

class NetTooLarge : public std::runtime_error {
public:
    NetTooLarge(std::size_t required, std::size_t limit);
    std::size_t required() const { return required_; }

private:
    std::size_t required_;
};

/// Finite subset of the model within `mesh` of every model point, carrying
/// the model's own distances.
ModelNet model_net(const ModelSpace& model, const Length& mesh);

/// Index of the net point nearest to `p` (lowest index on ties).
std::size_t nearest_net_point(const ModelSpace& model, const ModelNet& net, const ModelPoint& p);

/// Space whose distance d(a, b) is row[(a - b) mod n]; `row` must be
/// symmetric (row[k] == row[n - k]).
FiniteMetricSpace circulant_space(const std::vector<Length>& row, std::string provenance);

using Vec3 = std::array<double, 3>;

/// Great-circle angle between two unit vectors.
double sphere_angle(const Vec3& a, const Vec3& b);

struct SphereMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;
};

/// Icosahedron with every face split into frequency^2 triangles, projected
/// to the unit sphere.
SphereMesh icosphere(int frequency);

/// Largest spherical circumradius over the mesh triangles; every point of
/// the sphere lies within it of some mesh vertex.
double icosphere_covering_bound(const SphereMesh& mesh);

} // namespace finhom
