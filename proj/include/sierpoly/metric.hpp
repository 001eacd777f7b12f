#ifndef SIERPOLY_METRIC_HPP
#define SIERPOLY_METRIC_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "sierpoly/construction.hpp"
#include "sierpoly/core.hpp"

namespace sierpoly {

using Dist = std::int64_t;
using DistMap = std::unordered_map<Address, Dist, AddressHash>;

/// Exact unweighted shortest-path distances from source, truncated at cutoff.
DistMap bfs_dist(const LevelGraph& g, const VertexId& source,
                 std::optional<Dist> cutoff = std::nullopt);

/// BFS that treats `blocked` vertices as removed (used for cut-pair checks).
DistMap bfs_dist_avoiding(const LevelGraph& g, const VertexId& source,
                          const std::vector<VertexId>& blocked,
                          std::optional<Dist> cutoff = std::nullopt);

// ---------------------------------------------------------------------------
// Hierarchical distance oracle
// ---------------------------------------------------------------------------

/// Exact distances in Gamma_k via the cut-pair decomposition: the r top-level
/// gluing vertices form a ring whose arcs all have the standalone
/// corner-to-corner length D_{k-1}(f); any path between copies decomposes
/// into within-copy segments between attach corners. Corner tables are
/// memoized per level, per-address corner vectors per query. Thread-safe:
/// shared reads, exclusive growth.
class DistanceOracle {
public:
  explicit DistanceOracle(PolygonSpec spec) : spec_(spec) {}

  /// d(u, v) in Gamma_k for level-k addresses (any class member accepted).
  Dist dist(int k, const Address& u, const Address& v);

  /// Standalone distance from a to the corner c^k of its own level graph.
  Dist corner_dist(const Address& a, Letter corner);

  /// Corner-to-corner table: D_k[j] = d(x^k, (x+j)^k), independent of x.
  std::vector<Dist> corner_table(int k);

  const PolygonSpec& spec() const { return spec_; }
  void clear_address_cache();

private:
  std::vector<Dist> corner_vector(const Address& a);
  void ensure_level(int k);

  PolygonSpec spec_;
  std::vector<std::vector<Dist>> tables_;  // tables_[k-1] = D_k
  std::unordered_map<Address, std::vector<Dist>, AddressHash> corner_cache_;
  std::unordered_map<std::string, Dist> pair_cache_;
  mutable std::shared_mutex mu_;
};

/// Spec-facing wrapper: exact distance between two level-k canonicals,
/// equal to BFS by construction.
Dist hierarchical_dist(DistanceOracle& oracle, int k, const VertexId& u,
                       const VertexId& v);

// ---------------------------------------------------------------------------
// Balls
// ---------------------------------------------------------------------------

/// A radius-l ball around a center in Gamma_k, carrying the full ambient
/// distance matrix restricted to its points (not the induced path metric).
struct PointedBall {
  VertexId center;
  Dist radius = 0;
  int ambient_level = 0;
  std::vector<VertexId> points;   // sorted by canonical address
  std::vector<Dist> matrix;       // row-major, points.size()^2

  std::size_t size() const { return points.size(); }
  Dist at(std::size_t i, std::size_t j) const { return matrix[i * points.size() + j]; }
  std::size_t center_index() const;
  std::size_t index_of(const VertexId& v) const;
};

PointedBall ball(const LevelGraph& g, const VertexId& center, Dist radius,
                 DistanceOracle* oracle = nullptr);

// ---------------------------------------------------------------------------
// Pointed isometry search
// ---------------------------------------------------------------------------

/// Center-fixing bijection preserving every matrix entry, if one exists.
/// Plain backtracking with distance-to-center and row-multiset pruning.
std::optional<std::vector<std::size_t>> pointed_isometric(const PointedBall& b1,
                                                          const PointedBall& b2);

/// Same search without pinning the centers.
std::optional<std::vector<std::size_t>> any_isometric(const PointedBall& b1,
                                                      const PointedBall& b2);

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

struct GeodesicPath {
  std::vector<VertexId> vertices;
  Dist length() const { return static_cast<Dist>(vertices.size()) - 1; }
};

/// Shortest paths from u to v in lexicographic order of vertex sequences,
/// up to max_count. The first result is the canonical geodesic.
std::vector<GeodesicPath> geodesics_between(const LevelGraph& g, const VertexId& u,
                                            const VertexId& v, std::size_t max_count);

/// True iff every path from probe_u to probe_v meets {a, b}.
bool is_cut_pair(const LevelGraph& g, const VertexId& a, const VertexId& b,
                 const VertexId& probe_u, const VertexId& probe_v);

std::string ball_json(const PolygonSpec& spec, const PointedBall& b);

}  // namespace sierpoly

#endif
