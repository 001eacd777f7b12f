#include "sierpoly/metric.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>

#include "json.hpp"

namespace sierpoly {

namespace {
inline int mod(int x, int r) { return ((x % r) + r) % r; }
}  // namespace

// ---------------------------------------------------------------------------
// BFS
// ---------------------------------------------------------------------------

DistMap bfs_dist(const LevelGraph& g, const VertexId& source, std::optional<Dist> cutoff) {
  return bfs_dist_avoiding(g, source, {}, cutoff);
}

DistMap bfs_dist_avoiding(const LevelGraph& g, const VertexId& source,
                          const std::vector<VertexId>& blocked,
                          std::optional<Dist> cutoff) {
  DistMap dist;
  dist.emplace(source.canonical, 0);
  std::deque<VertexId> q{source};
  while (!q.empty()) {
    VertexId u = std::move(q.front());
    q.pop_front();
    Dist du = dist.at(u.canonical);
    if (cutoff && du >= *cutoff) continue;
    for (VertexId& n : g.neighbors(u)) {
      if (dist.count(n.canonical)) continue;
      bool skip = false;
      for (const VertexId& b : blocked)
        if (b.canonical == n.canonical) skip = true;
      if (skip) continue;
      dist.emplace(n.canonical, du + 1);
      q.push_back(std::move(n));
    }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// DistanceOracle
// ---------------------------------------------------------------------------

void DistanceOracle::ensure_level(int k) {
  if (static_cast<int>(tables_.size()) >= k) return;
  const int r = spec_.r;
  const int f = spec_.f;
  if (tables_.empty()) {
    std::vector<Dist> base(r);
    for (int j = 0; j < r; ++j) base[j] = std::min(j, r - j);
    tables_.push_back(std::move(base));
  }
  while (static_cast<int>(tables_.size()) < k) {
    const std::vector<Dist>& prev = tables_.back();
    const Dist arc = prev[f % r];
    const Dist wf = prev[f % r];
    const Dist w2f = prev[(2 * f) % r];
    std::vector<Dist> next(r);
    for (int j = 0; j < r; ++j) {
      if (j == 0) {
        next[0] = 0;
        continue;
      }
      Dist best = std::numeric_limits<Dist>::max();
      // corner 0^k sits in copy 0, corner j^k in copy j; exits are the
      // ring nodes g_{i-1} (corner i+2f of copy i) and g_i (corner i+f)
      const std::pair<int, Dist> src[2] = {{mod(-1, r), w2f}, {0, wf}};
      const std::pair<int, Dist> dst[2] = {{mod(j - 1, r), w2f}, {j, wf}};
      for (const auto& [sg, sw] : src)
        for (const auto& [tg, tw] : dst) {
          int hops = std::abs(sg - tg);
          hops = std::min(hops, r - hops);
          best = std::min(best, sw + static_cast<Dist>(hops) * arc + tw);
        }
      next[j] = best;
    }
    tables_.push_back(std::move(next));
  }
}

std::vector<Dist> DistanceOracle::corner_table(int k) {
  {
    std::shared_lock lk(mu_);
    if (static_cast<int>(tables_.size()) >= k) return tables_[k - 1];
  }
  std::unique_lock lk(mu_);
  ensure_level(k);
  return tables_[k - 1];
}

std::vector<Dist> DistanceOracle::corner_vector(const Address& a) {
  {
    std::shared_lock lk(mu_);
    auto it = corner_cache_.find(a);
    if (it != corner_cache_.end()) return it->second;
  }
  const int r = spec_.r;
  const int f = spec_.f;
  std::vector<Dist> cd(r);
  if (a.size() == 1) {
    for (int c = 0; c < r; ++c) {
      int d = mod(int(a.at(0)) - c, r);
      cd[c] = std::min<Dist>(d, r - d);
    }
  } else {
    const std::size_t m = a.size();
    const std::vector<Dist> table = corner_table(static_cast<int>(m) - 1);
    const Dist arc = table[f % r];
    const Dist wf = table[f % r];
    const Dist w2f = table[(2 * f) % r];
    std::vector<Dist> best(r, std::numeric_limits<Dist>::max());
    for (const Address& mem : class_members(spec_, a)) {
      const int i = mem.last();
      std::vector<Dist> cdw = corner_vector(mem.parent_copy());
      const std::pair<int, Dist> exits[2] = {{mod(i - 1, r), cdw[mod(i + 2 * f, r)]},
                                             {i, cdw[mod(i + f, r)]}};
      for (int c = 0; c < r; ++c) {
        if (i == c) best[c] = std::min(best[c], cdw[c]);
        const std::pair<int, Dist> entries[2] = {{mod(c - 1, r), w2f}, {c, wf}};
        for (const auto& [sg, sw] : exits)
          for (const auto& [tg, tw] : entries) {
            int hops = std::abs(sg - tg);
            hops = std::min(hops, r - hops);
            best[c] = std::min(best[c], sw + static_cast<Dist>(hops) * arc + tw);
          }
      }
    }
    cd = std::move(best);
  }
  std::unique_lock lk(mu_);
  corner_cache_.emplace(a, cd);
  return cd;
}

Dist DistanceOracle::corner_dist(const Address& a, Letter corner) {
  return corner_vector(a)[corner];
}

Dist DistanceOracle::dist(int k, const Address& u, const Address& v) {
  if (static_cast<int>(u.size()) != k || static_cast<int>(v.size()) != k)
    throw Error("oracle: address length does not match level");
  if (u == v) return 0;
  const int r = spec_.r;
  const int f = spec_.f;
  if (k == 1) {
    int d = mod(int(u.at(0)) - int(v.at(0)), r);
    return std::min<Dist>(d, r - d);
  }
  std::string key = u.raw() <= v.raw() ? u.raw() + '|' + v.raw() : v.raw() + '|' + u.raw();
  {
    std::shared_lock lk(mu_);
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) return it->second;
  }
  const auto mus = class_members(spec_, u);
  const auto mvs = class_members(spec_, v);
  Dist best = std::numeric_limits<Dist>::max();
  for (const Address& mu : mus)
    for (const Address& mv : mvs) {
      if (mu == mv) best = 0;
    }
  if (best != 0) {
    const std::vector<Dist> table = corner_table(k - 1);
    const Dist arc = table[f % r];
    for (const Address& mu : mus)
      for (const Address& mv : mvs) {
        const int iu = mu.last(), iv = mv.last();
        if (iu == iv)
          best = std::min(best, dist(k - 1, mu.parent_copy(), mv.parent_copy()));
        std::vector<Dist> cdu = corner_vector(mu.parent_copy());
        std::vector<Dist> cdv = corner_vector(mv.parent_copy());
        const std::pair<int, Dist> eu[2] = {{mod(iu - 1, r), cdu[mod(iu + 2 * f, r)]},
                                            {iu, cdu[mod(iu + f, r)]}};
        const std::pair<int, Dist> ev[2] = {{mod(iv - 1, r), cdv[mod(iv + 2 * f, r)]},
                                            {iv, cdv[mod(iv + f, r)]}};
        for (const auto& [gu, wu] : eu)
          for (const auto& [gv, wv] : ev) {
            int hops = std::abs(gu - gv);
            hops = std::min(hops, r - hops);
            best = std::min(best, wu + static_cast<Dist>(hops) * arc + wv);
          }
      }
  }
  std::unique_lock lk(mu_);
  pair_cache_.emplace(std::move(key), best);
  return best;
}

void DistanceOracle::clear_address_cache() {
  std::unique_lock lk(mu_);
  corner_cache_.clear();
  pair_cache_.clear();
}

Dist hierarchical_dist(DistanceOracle& oracle, int k, const VertexId& u, const VertexId& v) {
  return oracle.dist(k, u.canonical, v.canonical);
}

// ---------------------------------------------------------------------------
// Balls
// ---------------------------------------------------------------------------

std::size_t PointedBall::center_index() const { return index_of(center); }

std::size_t PointedBall::index_of(const VertexId& v) const {
  auto it = std::lower_bound(points.begin(), points.end(), v);
  if (it == points.end() || !(*it == v)) throw Error("point not in ball");
  return static_cast<std::size_t>(it - points.begin());
}

PointedBall ball(const LevelGraph& g, const VertexId& center, Dist radius,
                 DistanceOracle* oracle) {
  PointedBall b;
  b.center = center;
  b.radius = radius;
  b.ambient_level = g.level();
  DistMap from_center = bfs_dist(g, center, radius);
  for (const auto& [addr, d] : from_center)
    if (d <= radius) b.points.push_back(canonical(g.spec(), addr));
  std::sort(b.points.begin(), b.points.end());
  const std::size_t n = b.points.size();
  b.matrix.assign(n * n, 0);
  if (oracle) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Dist d = oracle->dist(g.level(), b.points[i].canonical, b.points[j].canonical);
        b.matrix[i * n + j] = b.matrix[j * n + i] = d;
      }
  } else {
    // pairwise ambient distances are at most 2*radius via the center
    for (std::size_t i = 0; i < n; ++i) {
      DistMap di = bfs_dist(g, b.points[i], 2 * radius);
      for (std::size_t j = 0; j < n; ++j) {
        auto it = di.find(b.points[j].canonical);
        if (it == di.end()) throw Error("ball matrix: unreachable point");
        b.matrix[i * n + j] = it->second;
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Isometry search
// ---------------------------------------------------------------------------

namespace {

struct IsoSearch {
  const PointedBall& b1;
  const PointedBall& b2;
  std::vector<std::size_t> order;        // processing order over b1 indices
  std::vector<std::vector<std::size_t>> cand;  // candidates in b2 per b1 index
  std::vector<std::size_t> img;
  std::vector<bool> used;

  bool run(std::vector<std::size_t>& out) {
    img.assign(b1.size(), SIZE_MAX);
    used.assign(b2.size(), false);
    if (!place(0)) return false;
    out = img;
    return true;
  }

  bool place(std::size_t step) {
    if (step == order.size()) return true;
    std::size_t i = order[step];
    for (std::size_t j : cand[i]) {
      if (used[j]) continue;
      bool ok = true;
      for (std::size_t s = 0; s < step && ok; ++s) {
        std::size_t a = order[s];
        if (b1.at(i, a) != b2.at(j, img[a])) ok = false;
      }
      if (!ok) continue;
      img[i] = j;
      used[j] = true;
      if (place(step + 1)) return true;
      used[j] = false;
      img[i] = SIZE_MAX;
    }
    return false;
  }
};

std::vector<Dist> sorted_row(const PointedBall& b, std::size_t i) {
  std::vector<Dist> row(b.points.size());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = b.at(i, j);
  std::sort(row.begin(), row.end());
  return row;
}

std::optional<std::vector<std::size_t>> isometric_impl(const PointedBall& b1,
                                                       const PointedBall& b2,
                                                       bool pin_center) {
  const std::size_t n = b1.size();
  if (n != b2.size()) return std::nullopt;
  if (n == 0) return std::vector<std::size_t>{};

  std::vector<std::vector<Dist>> rows1(n), rows2(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows1[i] = sorted_row(b1, i);
    rows2[i] = sorted_row(b2, i);
  }
  const std::size_t c1 = b1.center_index();
  const std::size_t c2 = b2.center_index();

  IsoSearch s{b1, b2, {}, {}, {}, {}};
  s.cand.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rows1[i] != rows2[j]) continue;
      if (pin_center) {
        if ((i == c1) != (j == c2)) continue;
        if (b1.at(i, c1) != b2.at(j, c2)) continue;
      }
      s.cand[i].push_back(j);
    }
    if (s.cand[i].empty()) return std::nullopt;
  }
  s.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.order[i] = i;
  // most-constrained first; the center (1 candidate when pinned) leads
  std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
    return s.cand[a].size() < s.cand[b].size();
  });
  std::vector<std::size_t> out;
  if (s.run(out)) return out;
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<std::size_t>> pointed_isometric(const PointedBall& b1,
                                                          const PointedBall& b2) {
  if (b1.radius != b2.radius) return std::nullopt;
  return isometric_impl(b1, b2, true);
}

std::optional<std::vector<std::size_t>> any_isometric(const PointedBall& b1,
                                                      const PointedBall& b2) {
  return isometric_impl(b1, b2, false);
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

std::vector<GeodesicPath> geodesics_between(const LevelGraph& g, const VertexId& u,
                                            const VertexId& v, std::size_t max_count) {
  std::vector<GeodesicPath> out;
  if (max_count == 0) return out;
  DistMap to_v = bfs_dist(g, v);
  auto itu = to_v.find(u.canonical);
  if (itu == to_v.end()) throw Error("geodesics: endpoints not connected");
  const Dist total = itu->second;

  struct Frame {
    VertexId at;
    std::vector<VertexId> next;
    std::size_t pos = 0;
  };
  std::vector<Frame> stack;
  std::vector<VertexId> path{u};
  auto admissible = [&](const VertexId& w, Dist remaining) {
    std::vector<VertexId> ns;
    for (VertexId& n : g.neighbors(w)) {
      auto it = to_v.find(n.canonical);
      if (it != to_v.end() && it->second == remaining - 1) ns.push_back(std::move(n));
    }
    return ns;  // already sorted
  };
  stack.push_back({u, admissible(u, total), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    Dist remaining = total - static_cast<Dist>(stack.size() - 1);
    if (remaining == 0) {
      out.push_back(GeodesicPath{path});
      if (out.size() >= max_count) return out;
      stack.pop_back();
      path.pop_back();
      continue;
    }
    if (f.pos >= f.next.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    VertexId n = f.next[f.pos++];
    path.push_back(n);
    stack.push_back({n, admissible(n, remaining - 1), 0});
  }
  return out;
}

bool is_cut_pair(const LevelGraph& g, const VertexId& a, const VertexId& b,
                 const VertexId& probe_u, const VertexId& probe_v) {
  if (probe_u == a || probe_u == b || probe_v == a || probe_v == b) return true;
  DistMap reach = bfs_dist_avoiding(g, probe_u, {a, b});
  return reach.find(probe_v.canonical) == reach.end();
}

std::string ball_json(const PolygonSpec& spec, const PointedBall& b) {
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  doc["center"] = b.center.canonical.str(spec);
  doc["radius"] = b.radius;
  doc["ambientLevel"] = b.ambient_level;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : b.points) pts.push_back(p.canonical.str(spec));
  doc["points"] = std::move(pts);
  doc["matrix"] = b.matrix;
  return doc.dump(2) + "\n";
}

}  // namespace sierpoly
