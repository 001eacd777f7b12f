#ifndef SIERPOLY_CONSTRUCTION_HPP
#define SIERPOLY_CONSTRUCTION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <vector>

#include "sierpoly/core.hpp"

namespace sierpoly {

class BudgetExceeded : public Error {
public:
  explicit BudgetExceeded(const std::string& msg) : Error(msg) {}
};

enum class GraphMode { Materialized, Implicit };

/// Gamma_k^(r) as a quotient of the r^k addresses: each address keeps its two
/// first-letter cycle edges, gluing only identifies vertices. Materialized
/// mode stores the full sorted vertex set and adjacency; implicit mode keeps
/// only (spec, k) and answers neighbor queries by address arithmetic.
class LevelGraph {
public:
  LevelGraph(PolygonSpec spec, int k, GraphMode mode);

  const PolygonSpec& spec() const { return spec_; }
  int level() const { return k_; }
  GraphMode mode() const { return mode_; }

  /// Sorted, deduplicated neighbor classes; never contains v itself.
  std::vector<VertexId> neighbors(const VertexId& v) const;

  bool contains(const VertexId& v) const;

  std::uint64_t vertex_count() const;   // closed form; no enumeration needed
  std::uint64_t edge_count() const;

  // Materialized-only accessors.
  const std::vector<VertexId>& vertices() const;
  /// Edges as index pairs (i < j) into vertices(), sorted.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const;
  std::uint32_t index_of(const VertexId& v) const;

private:
  void materialize();

  PolygonSpec spec_;
  int k_;
  GraphMode mode_;
  std::vector<VertexId> verts_;
  std::unordered_map<Address, std::uint32_t, AddressHash> index_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

/// Free-standing neighbor query on the implicit graph.
std::vector<VertexId> neighbors(const PolygonSpec& spec, int k, const VertexId& v);

struct BuildOptions {
  std::uint64_t materialize_budget = 1'000'000;  // max r^k addresses
};

LevelGraph build_level_graph(const PolygonSpec& spec, int k, GraphMode mode,
                             const BuildOptions& opts = {});

/// The r identification classes joining copy i to copy i+1 at the top level;
/// topGluing[i] = canonical of ((i+f) mod r)^(k-1) . i. Requires k >= 2.
std::map<int, VertexId> top_gluing(const PolygonSpec& spec, int k);

/// Injection of Gamma_{k-1} into copy i of Gamma_k: append letter i and
/// re-canonicalize.
VertexId copy_embedding(const PolygonSpec& spec, int k, int i, const VertexId& v);

/// Visit all r^k addresses in lexicographic order.
void for_each_address(const PolygonSpec& spec, int k,
                      const std::function<void(const Address&)>& fn);

// Export formats. All take a materialized graph and emit deterministic,
// sorted output.
void write_edge_list(std::ostream& os, const LevelGraph& g);
void write_dot(std::ostream& os, const LevelGraph& g);
void write_graphml(std::ostream& os, const LevelGraph& g);
std::string graph_json(const LevelGraph& g);  // {spec, k, vertices, edges, topGluing}

}  // namespace sierpoly

#endif
