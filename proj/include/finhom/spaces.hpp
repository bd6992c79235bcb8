#pragma once

#include "finhom/group.hpp"
#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"
#include "finhom/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace finhom {

/// A connected graph with its scaled shortest-path metric.
struct GraphSpace {
    FiniteMetricSpace space;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    Length scale;
    /// Hop counts, n x n.
    std::vector<std::uint32_t> hops;
};

class DisconnectedGraph : public std::invalid_argument {
public:
    DisconnectedGraph(const std::string& what, std::size_t unreachable)
        : std::invalid_argument(what), unreachable_(unreachable)
    {
    }
    /// A vertex (or group element) not reachable from vertex 0 / the identity.
    std::size_t unreachable() const { return unreachable_; }

private:
    std::size_t unreachable_;
};

/// Shortest-path metric of an undirected graph times `scale`. Self-loops and
/// repeated edges are dropped.
GraphSpace graph_space(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges, const Length& scale,
                       std::string provenance);

/// The n-cycle (n >= 3) with hop metric times `scale`.
GraphSpace cycle_space(std::size_t n, const Length& scale);

/// Cayley graph word metric d(g, h) = |g^-1 h| times `scale`. Generators must
/// be closed under inverses and generate the group.
GraphSpace cayley_space(const FiniteGroup& group, std::span<const std::uint32_t> generators, const Length& scale);

/// (Z_m)^d inside the d-torus with the sup of coordinate arc metrics; an
/// empty circumference list means all circumferences are 1.
FiniteMetricSpace torus_grid(std::size_t d, std::size_t m, std::vector<Length> circumferences = {});

/// Z_n mapped into the first `depth` solenoid levels (orders j!, weights
/// 2^-j): k goes to position k * (depth!/j!) / n on level j. n must be a
/// multiple of depth!.
FiniteMetricSpace solenoid_approximant(int depth, std::size_t n);

/// Vertex sets of Platonic and Archimedean solids on the unit sphere with the
/// great-circle metric.
FiniteMetricSpace archimedean_vertices(std::string_view name);
std::vector<Vec3> archimedean_points(std::string_view name);
const std::vector<std::string>& archimedean_catalogue();

/// Length of the shortest cycle times the scale; nullopt for forests.
std::optional<Length> girth(const GraphSpace& graph);

/// Model coordinates for the generated spaces, used to build explicit maps
/// into model nets.
std::vector<ModelPoint> cycle_embedding(std::size_t n);
std::vector<ModelPoint> torus_grid_embedding(std::size_t d, std::size_t m);
std::vector<ModelPoint> solenoid_embedding(std::size_t n);
std::vector<ModelPoint> archimedean_embedding(std::string_view name);

} // namespace finhom
