#include "sierpoly/construction.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sierpoly {

LevelGraph::LevelGraph(PolygonSpec spec, int k, GraphMode mode)
    : spec_(spec), k_(k), mode_(mode) {
  if (k < 1) throw Error("level must be >= 1");
  if (mode_ == GraphMode::Materialized) materialize();
}

void for_each_address(const PolygonSpec& spec, int k,
                      const std::function<void(const Address&)>& fn) {
  Address a = Address::constant(0, static_cast<std::size_t>(k));
  for (;;) {
    fn(a);
    int i = k - 1;
    while (i >= 0 && a.at(i) == spec.r - 1) {
      a.set(i, 0);
      --i;
    }
    if (i < 0) break;
    a.set(i, static_cast<Letter>(a.at(i) + 1));
  }
}

void LevelGraph::materialize() {
  for_each_address(spec_, k_, [&](const Address& a) {
    VertexId v = canonical(spec_, a);
    if (v.canonical == a) {
      index_.emplace(a, static_cast<std::uint32_t>(verts_.size()));
      verts_.push_back(std::move(v));
    }
  });
  // addresses were visited in lex order, so verts_ is sorted
  for (std::uint32_t i = 0; i < verts_.size(); ++i) {
    for (const VertexId& n : neighbors(verts_[i])) {
      std::uint32_t j = index_.at(n.canonical);
      if (i < j) edges_.emplace_back(i, j);
    }
  }
  std::sort(edges_.begin(), edges_.end());
}

std::vector<VertexId> LevelGraph::neighbors(const VertexId& v) const {
  return sierpoly::neighbors(spec_, k_, v);
}

std::vector<VertexId> neighbors(const PolygonSpec& spec, int k, const VertexId& v) {
  std::vector<VertexId> out;
  for (const Address& m : class_members(spec, v.canonical)) {
    for (int d : {1, spec.r - 1}) {
      Address n = m;
      n.set(0, static_cast<Letter>((m.first() + d) % spec.r));
      VertexId w = canonical(spec, n);
      if (w.canonical != v.canonical) out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  (void)k;
  return out;
}

bool LevelGraph::contains(const VertexId& v) const {
  if (static_cast<int>(v.canonical.size()) != k_) return false;
  for (std::size_t i = 0; i < v.canonical.size(); ++i)
    if (v.canonical.at(i) >= spec_.r) return false;
  return canonical(spec_, v.canonical).canonical == v.canonical;
}

std::uint64_t LevelGraph::vertex_count() const {
  std::uint64_t n = static_cast<std::uint64_t>(spec_.r);
  for (int i = 2; i <= k_; ++i) n = n * spec_.r - spec_.r;
  return n;
}

std::uint64_t LevelGraph::edge_count() const {
  std::uint64_t e = 1;
  for (int i = 0; i < k_; ++i) e *= spec_.r;
  return e;
}

const std::vector<VertexId>& LevelGraph::vertices() const {
  if (mode_ != GraphMode::Materialized) throw Error("graph is implicit");
  return verts_;
}

const std::vector<std::pair<std::uint32_t, std::uint32_t>>& LevelGraph::edges() const {
  if (mode_ != GraphMode::Materialized) throw Error("graph is implicit");
  return edges_;
}

std::uint32_t LevelGraph::index_of(const VertexId& v) const {
  if (mode_ != GraphMode::Materialized) throw Error("graph is implicit");
  return index_.at(v.canonical);
}

LevelGraph build_level_graph(const PolygonSpec& spec, int k, GraphMode mode,
                             const BuildOptions& opts) {
  if (mode == GraphMode::Materialized) {
    long double size = std::pow(static_cast<long double>(spec.r), k);
    if (size > static_cast<long double>(opts.materialize_budget))
      throw BudgetExceeded("r^k = " + std::to_string(spec.r) + "^" + std::to_string(k) +
                           " exceeds the materialization budget; use implicit mode");
  }
  return LevelGraph(spec, k, mode);
}

std::map<int, VertexId> top_gluing(const PolygonSpec& spec, int k) {
  if (k < 2) throw Error("top gluing requires level >= 2");
  std::map<int, VertexId> out;
  for (int i = 0; i < spec.r; ++i) {
    Address a = Address::constant(static_cast<Letter>((i + spec.f) % spec.r), k - 1);
    a.push_back(static_cast<Letter>(i));
    out.emplace(i, canonical(spec, a));
  }
  return out;
}

VertexId copy_embedding(const PolygonSpec& spec, int k, int i, const VertexId& v) {
  if (static_cast<int>(v.canonical.size()) != k - 1)
    throw Error("copy embedding expects a level-(k-1) vertex");
  return canonical(spec, v.canonical.appended(static_cast<Letter>(i)));
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& os, const LevelGraph& g) {
  const auto& vs = g.vertices();
  for (const auto& [i, j] : g.edges())
    os << vs[i].canonical.str(g.spec()) << ' ' << vs[j].canonical.str(g.spec()) << '\n';
}

void write_dot(std::ostream& os, const LevelGraph& g) {
  os << "graph gamma_" << g.level() << "_" << g.spec().r << " {\n";
  const auto& vs = g.vertices();
  for (const auto& v : vs) os << "  \"" << v.canonical.str(g.spec()) << "\";\n";
  for (const auto& [i, j] : g.edges())
    os << "  \"" << vs[i].canonical.str(g.spec()) << "\" -- \""
       << vs[j].canonical.str(g.spec()) << "\";\n";
  os << "}\n";
}

void write_graphml(std::ostream& os, const LevelGraph& g) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <graph id=\"gamma\" edgedefault=\"undirected\">\n";
  const auto& vs = g.vertices();
  for (const auto& v : vs)
    os << "    <node id=\"" << v.canonical.str(g.spec()) << "\"/>\n";
  for (const auto& [i, j] : g.edges())
    os << "    <edge source=\"" << vs[i].canonical.str(g.spec()) << "\" target=\""
       << vs[j].canonical.str(g.spec()) << "\"/>\n";
  os << "  </graph>\n</graphml>\n";
}

std::string graph_json(const LevelGraph& g) {
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  doc["spec"] = {{"r", g.spec().r}, {"f", g.spec().f}, {"ftilde", g.spec().ftilde}};
  doc["k"] = g.level();
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : g.vertices()) verts.push_back(v.canonical.str(g.spec()));
  doc["vertices"] = std::move(verts);
  nlohmann::json edges = nlohmann::json::array();
  const auto& vs = g.vertices();
  for (const auto& [i, j] : g.edges())
    edges.push_back({vs[i].canonical.str(g.spec()), vs[j].canonical.str(g.spec())});
  doc["edges"] = std::move(edges);
  nlohmann::json tg = nlohmann::json::object();
  if (g.level() >= 2)
    for (const auto& [i, v] : top_gluing(g.spec(), g.level()))
      tg[std::to_string(i)] = v.canonical.str(g.spec());
  doc["topGluing"] = std::move(tg);
  return doc.dump(2) + "\n";
}

}  // namespace sierpoly
