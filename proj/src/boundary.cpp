#include "sierpoly/boundary.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "json.hpp"

namespace sierpoly {

namespace {

inline int mod(int x, int r) { return ((x % r) + r) % r; }

Address constant_then(const PolygonSpec& spec, int letter, int run, int last) {
  Address a = Address::constant(static_cast<Letter>(mod(letter, spec.r)), run);
  a.push_back(static_cast<Letter>(mod(last, spec.r)));
  return a;
}

/// Realize a level-m class inside Gamma_M along xi's copy chain.
Address realize_at(const PolygonSpec& spec, const BasepointSeq& xi, const Address& addr,
                   int M) {
  Address out = addr;
  for (std::size_t i = addr.size(); i < static_cast<std::size_t>(M); ++i)
    out.push_back(xi.letter(i));
  return canonical(spec, out).canonical;
}

}  // namespace

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

HoleFrame frame(const PolygonSpec& spec, const BasepointSeq& xi, int m) {
  if (m < 2) throw Error("frame requires m >= 2");
  HoleFrame fr;
  fr.m = m;
  fr.copy_index = xi.letter(m - 1);
  const int c = fr.copy_index;
  fr.b_up = canonical(spec, constant_then(spec, c + spec.f, m - 1, c));
  fr.b_down = canonical(spec, constant_then(spec, c + spec.ftilde, m - 1, c));
  if (spec.r % 2 == 0) {
    const int a = mod(c + spec.r / 2, spec.r);
    fr.antipodal_copies = {a};
    fr.A = canonical(spec, constant_then(spec, a + spec.f, m - 1, a));
    fr.B = canonical(spec, constant_then(spec, a + spec.ftilde, m - 1, a));
  } else {
    const int a1 = mod(c + spec.r / 2, spec.r);
    const int a2 = mod(a1 + 1, spec.r);
    fr.antipodal_copies = {a1, a2};
    fr.A = canonical(spec, constant_then(spec, a1 + spec.ftilde, m - 1, a1));
    fr.B = canonical(spec, constant_then(spec, a2 + spec.f, m - 1, a2));
  }
  return fr;
}

// ---------------------------------------------------------------------------
// Constrained geodesics inside the antipodal copies
// ---------------------------------------------------------------------------

namespace {

/// Neighbors of a level-m class realized by member addresses whose coarse
/// letter stays inside the copy set.
std::vector<VertexId> region_neighbors(const PolygonSpec& spec, const VertexId& v,
                                       const std::vector<int>& copies) {
  std::vector<VertexId> out;
  for (const Address& mem : class_members(spec, v.canonical)) {
    if (std::find(copies.begin(), copies.end(), int(mem.last())) == copies.end())
      continue;
    for (int d : {1, spec.r - 1}) {
      Address n = mem;
      n.set(0, static_cast<Letter>((mem.first() + d) % spec.r));
      VertexId w = canonical(spec, n);
      if (!(w == v)) out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::unordered_map<Address, Dist, AddressHash> region_bfs(const PolygonSpec& spec,
                                                          const VertexId& src,
                                                          const std::vector<int>& copies) {
  std::unordered_map<Address, Dist, AddressHash> dist;
  dist.emplace(src.canonical, 0);
  std::deque<VertexId> q{src};
  while (!q.empty()) {
    VertexId u = std::move(q.front());
    q.pop_front();
    Dist du = dist.at(u.canonical);
    for (VertexId& n : region_neighbors(spec, u, copies)) {
      if (dist.emplace(n.canonical, du + 1).second) q.push_back(std::move(n));
    }
  }
  return dist;
}

}  // namespace

std::vector<VertexId> antipodal_geodesic(const PolygonSpec& spec, const HoleFrame& fr) {
  auto to_b = region_bfs(spec, fr.B, fr.antipodal_copies);
  auto it = to_b.find(fr.A.canonical);
  if (it == to_b.end()) throw Error("antipodal geodesic: A and B not connected in region");
  std::vector<VertexId> path{fr.A};
  VertexId cur = fr.A;
  Dist remaining = it->second;
  while (remaining > 0) {
    VertexId next;
    bool found = false;
    for (VertexId& n : region_neighbors(spec, cur, fr.antipodal_copies)) {
      auto jt = to_b.find(n.canonical);
      if (jt != to_b.end() && jt->second == remaining - 1) {
        next = std::move(n);
        found = true;
        break;  // region_neighbors is sorted: first hit is lex-least
      }
    }
    if (!found) throw Error("antipodal geodesic: dead end");
    path.push_back(next);
    cur = std::move(next);
    --remaining;
  }
  return path;
}

std::vector<std::vector<VertexId>> antipodal_geodesics(const PolygonSpec& spec,
                                                       const HoleFrame& fr,
                                                       std::size_t max_count) {
  std::vector<std::vector<VertexId>> out;
  if (max_count == 0) return out;
  auto to_b = region_bfs(spec, fr.B, fr.antipodal_copies);
  auto it = to_b.find(fr.A.canonical);
  if (it == to_b.end()) throw Error("antipodal geodesics: not connected");
  std::vector<VertexId> path{fr.A};
  // iterative DFS in lex order
  struct Frame {
    std::vector<VertexId> next;
    std::size_t pos = 0;
  };
  auto admissible = [&](const VertexId& w, Dist remaining) {
    std::vector<VertexId> ns;
    for (VertexId& n : region_neighbors(spec, w, fr.antipodal_copies)) {
      auto jt = to_b.find(n.canonical);
      if (jt != to_b.end() && jt->second == remaining - 1) ns.push_back(std::move(n));
    }
    return ns;
  };
  std::vector<Frame> stack;
  stack.push_back({admissible(fr.A, it->second), 0});
  while (!stack.empty()) {
    Dist remaining = it->second - static_cast<Dist>(stack.size() - 1);
    if (remaining == 0) {
      out.push_back(path);
      if (out.size() >= max_count) return out;
      stack.pop_back();
      path.pop_back();
      continue;
    }
    Frame& f = stack.back();
    if (f.pos >= f.next.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    VertexId n = f.next[f.pos++];
    path.push_back(n);
    stack.push_back({admissible(n, remaining - 1), 0});
  }
  return out;
}

namespace {

/// Midpoint class of the canonical constrained geodesic, with parity and
/// equidistance checks. Shared by antipodal_point / antipodal_sequence /
/// shifted_sequence.
struct AntipodalStage {
  HoleFrame fr;
  std::vector<VertexId> geodesic;
  Dist length = 0;
  Dist t_hat = 0;
  VertexId midpoint;
};

AntipodalStage antipodal_stage(const PolygonSpec& spec, DistanceOracle& oracle,
                               const BasepointSeq& xi, int m) {
  AntipodalStage st;
  st.fr = frame(spec, xi, m);
  st.geodesic = antipodal_geodesic(spec, st.fr);
  st.length = static_cast<Dist>(st.geodesic.size()) - 1;
  if (st.length % 2 != 0)
    throw Error("antipodal geodesic has odd length at m=" + std::to_string(m));
  st.t_hat = st.length / 2;
  st.midpoint = st.geodesic[static_cast<std::size_t>(st.t_hat)];
  if (spec.r % 2 == 1) {
    // the midpoint must be the shared gluing vertex of the antipodal copies
    const int a1 = st.fr.antipodal_copies[0];
    VertexId shared = canonical(spec, constant_then(spec, a1 + spec.f, m - 1, a1));
    if (!(st.midpoint == shared))
      throw Error("odd-r antipodal midpoint is not the shared gluing vertex");
  }
  Dist dup = oracle.dist(m, st.fr.b_up.canonical, st.midpoint.canonical);
  Dist ddn = oracle.dist(m, st.fr.b_down.canonical, st.midpoint.canonical);
  if (dup != ddn)
    throw Error("antipodal equidistance failed at m=" + std::to_string(m) + ": " +
                std::to_string(dup) + " vs " + std::to_string(ddn));
  return st;
}

}  // namespace

LimitVertex antipodal_point(const PolygonSpec& spec, DistanceOracle& oracle,
                            const BasepointSeq& xi, int m) {
  AntipodalStage st = antipodal_stage(spec, oracle, xi, m);
  return lift(xi, st.midpoint.canonical);
}

// ---------------------------------------------------------------------------
// Probe assembly
// ---------------------------------------------------------------------------

namespace {

int certified_probe_level(const PolygonSpec& spec, DistanceOracle& oracle,
                          const BasepointSeq& xi, int min_level, Dist radius) {
  for (int M = std::max(min_level, 1);; ++M) {
    if (M > 64) throw Error("no certified probe level below 64");
    if (corner_condition(spec, oracle, xi, M, radius)) return M;
  }
}

/// Realize level-native samples at a certified common ambient level and
/// measure their exact distances from xi. Two passes: provisional distances
/// bound the radius, then the certificate pins the final level.
struct AssembledProbe {
  int level = 0;
  Dist radius = 0;
  std::vector<Address> realized;
  std::vector<Dist> times;
};

AssembledProbe assemble(const PolygonSpec& spec, DistanceOracle& oracle,
                        const BasepointSeq& xi, const std::vector<Address>& samples,
                        Dist margin) {
  int M = 1;
  for (const Address& s : samples) M = std::max<int>(M, static_cast<int>(s.size()));
  AssembledProbe out;
  for (;;) {
    Address base = realize_at(spec, xi, xi.prefix(1), M);
    Dist worst = 0;
    std::vector<Address> realized;
    std::vector<Dist> times;
    for (const Address& s : samples) {
      Address rs = realize_at(spec, xi, s, M);
      Dist t = oracle.dist(M, base, rs);
      worst = std::max(worst, t);
      realized.push_back(std::move(rs));
      times.push_back(t);
    }
    int M2 = certified_probe_level(spec, oracle, xi, M, worst + margin);
    if (M2 == M) {
      out.level = M;
      out.radius = worst + margin;
      out.realized = std::move(realized);
      out.times = std::move(times);
      return out;
    }
    M = M2;
  }
}

void check_strictly_increasing(const std::vector<Dist>& times) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw Error("probe times are not strictly increasing");
}

RayProbe finish_probe(const PolygonSpec& spec, const BasepointSeq& xi, ProbeKind kind,
                      int shift, AssembledProbe&& ap) {
  check_strictly_increasing(ap.times);
  if (ap.times.empty() || ap.times[0] != 0)
    throw Error("probe must start at (0, xi)");
  RayProbe probe;
  probe.base = xi;
  probe.kind = kind;
  probe.shift = shift;
  probe.times = std::move(ap.times);
  probe.realized = std::move(ap.realized);
  probe.ambient_level = ap.level;
  probe.certified_radius = ap.radius;
  probe.points.reserve(probe.realized.size());
  for (const Address& a : probe.realized) probe.points.push_back(lift(xi, a));
  (void)spec;
  return probe;
}

int constant_tail_start(const PolygonSpec& spec, const BasepointSeq& xi) {
  validate_sequence(spec, xi);
  Letter j;
  if (!xi.eventually_constant_letter(&j))
    throw Error("this probe requires an eventually constant sequence");
  return std::max<int>(2, static_cast<int>(xi.preperiod().size()) + 1);
}

}  // namespace

Dist probe_dist(DistanceOracle& oracle, const RayProbe& probe, std::size_t i,
                std::size_t j) {
  return oracle.dist(probe.ambient_level, probe.realized[i], probe.realized[j]);
}

RayProbe gluing_ray(const PolygonSpec& spec, DistanceOracle& oracle,
                    const BasepointSeq& xi, bool up, Dist depth,
                    const ProbeOptions& opts) {
  const int m_start = opts.m_start > 0 ? opts.m_start : constant_tail_start(spec, xi);
  if (depth < 1) throw Error("gluing ray needs depth >= 1");

  // grow the gluing chain until its exact distance covers `depth`
  std::vector<Address> chain;  // level-m class addresses, m = m_start..
  int m_last = m_start - 1;
  AssembledProbe ap;
  for (;;) {
    ++m_last;
    const int c = xi.letter(m_last - 1);
    chain.push_back(up ? constant_then(spec, c + spec.f, m_last - 1, c)
                       : constant_then(spec, c + spec.ftilde, m_last - 1, c));
    std::vector<Address> samples{xi.prefix(1)};
    for (const Address& a : chain) samples.push_back(a);
    ap = assemble(spec, oracle, xi, samples, opts.margin);
    if (ap.times.back() >= depth) break;
    if (m_last > 40) throw Error("gluing chain did not reach the requested depth");
  }

  // canonical geodesic through the chain, interpolated at every integer
  const int M = ap.level;
  std::vector<Address> path{ap.realized[0]};
  for (std::size_t w = 1; w < ap.realized.size(); ++w) {
    const Address& target = ap.realized[w];
    Address cur = path.back();
    Dist remaining = oracle.dist(M, cur, target);
    while (remaining > 0) {
      bool stepped = false;
      for (const VertexId& n : neighbors(spec, M, canonical(spec, cur))) {
        if (oracle.dist(M, n.canonical, target) == remaining - 1) {
          path.push_back(n.canonical);
          cur = n.canonical;
          --remaining;
          stepped = true;
          break;
        }
      }
      if (!stepped) throw Error("gluing ray: no descending neighbor");
    }
  }

  RayProbe probe;
  probe.base = xi;
  probe.kind = up ? ProbeKind::GluingUp : ProbeKind::GluingDown;
  probe.ambient_level = M;
  probe.certified_radius = ap.radius;
  const Dist len = std::min<Dist>(depth, static_cast<Dist>(path.size()) - 1);
  for (Dist t = 0; t <= len; ++t) {
    probe.times.push_back(t);
    probe.realized.push_back(path[static_cast<std::size_t>(t)]);
    probe.points.push_back(lift(xi, path[static_cast<std::size_t>(t)]));
  }
  // the concatenation must be isometric; anything else is a construction bug
  for (std::size_t i = 0; i < probe.size(); ++i)
    for (std::size_t j = i + 1; j < probe.size(); ++j)
      if (probe_dist(oracle, probe, i, j) != probe.times[j] - probe.times[i])
        throw Error("gluing ray violates the geodesic condition at (" +
                    std::to_string(probe.times[i]) + "," + std::to_string(probe.times[j]) +
                    ")");
  return probe;
}

RayProbe antipodal_sequence(const PolygonSpec& spec, DistanceOracle& oracle,
                            const BasepointSeq& xi, int m_min, int m_max,
                            const ProbeOptions& opts) {
  const int start = std::max(m_min, constant_tail_start(spec, xi));
  std::vector<Address> samples{xi.prefix(1)};
  for (int m = start; m <= m_max; ++m)
    samples.push_back(antipodal_stage(spec, oracle, xi, m).midpoint.canonical);
  return finish_probe(spec, xi, ProbeKind::Antipodal, 0,
                      assemble(spec, oracle, xi, samples, opts.margin));
}

RayProbe custom_probe(const PolygonSpec& spec, DistanceOracle& oracle,
                      const BasepointSeq& xi, const std::vector<Address>& samples,
                      const ProbeOptions& opts) {
  std::vector<Address> all{xi.prefix(1)};
  for (const Address& s : samples) all.push_back(s);
  return finish_probe(spec, xi, ProbeKind::Custom, 0,
                      assemble(spec, oracle, xi, all, opts.margin));
}

ShiftedProbe shifted_sequence(const PolygonSpec& spec, DistanceOracle& oracle,
                              const BasepointSeq& xi, int t, int m_min, int m_max,
                              const ProbeOptions& opts) {
  const int start = std::max(m_min, constant_tail_start(spec, xi));
  ShiftedProbe out;
  std::vector<Address> samples{xi.prefix(1)};
  for (int m = start; m <= m_max; ++m) {
    AntipodalStage st = antipodal_stage(spec, oracle, xi, m);
    const Dist pos = st.t_hat + t;
    if (!(0 < pos && pos < st.length)) {
      out.dropped_m.push_back(m);
      continue;
    }
    samples.push_back(st.geodesic[static_cast<std::size_t>(pos)].canonical);
  }
  out.probe = finish_probe(spec, xi, ProbeKind::Shifted, t,
                           assemble(spec, oracle, xi, samples, opts.margin));
  return out;
}

// ---------------------------------------------------------------------------
// Horoprofiles
// ---------------------------------------------------------------------------

HoroProfile horoprofile(DistanceOracle& oracle, const RayProbe& probe,
                        const StableBall& ball) {
  if (!(ball.cert.xi == probe.base))
    throw Error("horoprofile: probe and ball have different basepoints");
  if (probe.size() < 2) throw Error("horoprofile: probe needs at least two samples");
  if (probe.times.back() + ball.cert.radius > probe.certified_radius)
    throw Error("horoprofile: probe certificate does not cover the ball");

  const int M = probe.ambient_level;
  std::vector<Address> pts;
  pts.reserve(ball.lifts.size());
  for (const LimitVertex& lv : ball.lifts)
    pts.push_back(canonical(oracle.spec(), lv.realize(static_cast<std::size_t>(M))).canonical);

  const std::size_t n = pts.size();
  std::vector<std::vector<Dist>> vecs(probe.size(), std::vector<Dist>(n));
  for (std::size_t i = 0; i < probe.size(); ++i)
    for (std::size_t y = 0; y < n; ++y)
      vecs[i][y] = oracle.dist(M, pts[y], probe.realized[i]) - probe.times[i];

  if (vecs[probe.size() - 1] != vecs[probe.size() - 2])
    throw NotStabilized("horoprofile restriction still changing over the final window; "
                        "extend the probe's m range");
  std::size_t stab = probe.size() - 1;
  while (stab > 0 && vecs[stab - 1] == vecs.back()) --stab;

  HoroProfile out;
  out.xi = probe.base;
  out.radius = ball.cert.radius;
  out.points = ball.ball.points;
  out.values = vecs.back();
  out.stabilized_at = stab;
  return out;
}

std::optional<VertexId> profiles_distinct(const HoroProfile& p1, const HoroProfile& p2) {
  if (!(p1.xi == p2.xi) || p1.radius != p2.radius || p1.points != p2.points)
    throw Error("profiles_distinct: profiles restrict different balls");
  for (std::size_t i = 0; i < p1.values.size(); ++i)
    if (p1.values[i] != p2.values[i]) return p1.points[i];
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Defect tests
// ---------------------------------------------------------------------------

namespace {
constexpr std::size_t kFailureCap = 64;

void record_failure(DefectReport& rep, DefectEntry e) {
  rep.max_defect = std::max(rep.max_defect, e.defect);
  ++rep.failure_count;
  if (rep.failures.size() < kFailureCap) rep.failures.push_back(std::move(e));
}
}  // namespace

DefectReport test_geodesic(DistanceOracle& oracle, const RayProbe& probe) {
  DefectReport rep;
  rep.condition = RayCondition::Geodesic;
  for (std::size_t i = 0; i < probe.size(); ++i)
    for (std::size_t j = i + 1; j < probe.size(); ++j) {
      Dist d = probe_dist(oracle, probe, i, j);
      Dist defect = std::abs(d - (probe.times[j] - probe.times[i]));
      if (defect != 0)
        record_failure(rep, {probe.times[i], probe.times[j], std::nullopt, defect});
    }
  rep.passed = rep.failure_count == 0;
  return rep;
}

DefectReport test_almost_geodesic(DistanceOracle& oracle, const RayProbe& probe, Dist N) {
  DefectReport rep;
  rep.condition = RayCondition::Almost;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    if (probe.times[i] < N) continue;
    Dist d0 = probe_dist(oracle, probe, 0, i);
    for (std::size_t j = i; j < probe.size(); ++j) {
      Dist defect = std::abs(probe_dist(oracle, probe, i, j) + d0 - probe.times[j]);
      if (defect != 0)
        record_failure(rep, {probe.times[i], probe.times[j], std::nullopt, defect});
    }
  }
  rep.passed = rep.failure_count == 0;
  return rep;
}

std::vector<AlmostFailure> almost_failure_certificate(DistanceOracle& oracle,
                                                      const RayProbe& probe) {
  std::vector<AlmostFailure> out;
  if (probe.size() < 2) return out;
  std::vector<Dist> thresholds{0};
  for (std::size_t i = 0; i + 1 < probe.size(); ++i)
    if (probe.times[i] > 0) thresholds.push_back(probe.times[i]);
  for (Dist n : thresholds) {
    bool found = false;
    for (std::size_t i = 0; i < probe.size() && !found; ++i) {
      if (probe.times[i] < n) continue;
      Dist d0 = probe_dist(oracle, probe, 0, i);
      for (std::size_t j = i + 1; j < probe.size(); ++j) {
        Dist defect = std::abs(probe_dist(oracle, probe, i, j) + d0 - probe.times[j]);
        if (defect >= 1) {
          out.push_back({n, probe.times[i], probe.times[j], defect});
          found = true;
          break;
        }
      }
    }
    if (!found) out.push_back({n, -1, -1, 0});  // no witness at this threshold
  }
  return out;
}

DefectReport test_weakly_geodesic(DistanceOracle& oracle, const RayProbe& probe,
                                  const StableBall& ball, Dist n_budget) {
  DefectReport rep;
  rep.condition = RayCondition::Weakly;
  if (probe.size() < 2) throw Error("weakly test needs at least two samples");
  const int M = probe.ambient_level;
  if (probe.times.back() + ball.cert.radius > probe.certified_radius)
    throw Error("weakly test: probe certificate does not cover the ball");

  const Dist max_threshold = std::min<Dist>(n_budget, probe.times[probe.size() - 2]);
  std::vector<Dist> thresholds{0};
  for (Dist t : probe.times)
    if (t > 0 && t <= max_threshold) thresholds.push_back(t);

  bool all_found = true;
  for (std::size_t yi = 0; yi < ball.lifts.size(); ++yi) {
    Address y = canonical(oracle.spec(),
                          ball.lifts[yi].realize(static_cast<std::size_t>(M))).canonical;
    std::vector<Dist> dy(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i)
      dy[i] = oracle.dist(M, y, probe.realized[i]);
    std::optional<Dist> ny;
    for (Dist n : thresholds) {
      bool ok = true;
      for (std::size_t i = 0; i < probe.size() && ok; ++i) {
        if (probe.times[i] < n) continue;
        for (std::size_t j = i + 1; j < probe.size() && ok; ++j)
          if (dy[j] - dy[i] != probe.times[j] - probe.times[i]) ok = false;
      }
      if (ok) {
        ny = n;
        break;
      }
    }
    if (ny) {
      rep.witness_n.emplace_back(ball.ball.points[yi], *ny);
    } else {
      all_found = false;
      // witnesses at the weakest admissible threshold
      Dist n = thresholds.back();
      for (std::size_t i = 0; i < probe.size(); ++i) {
        if (probe.times[i] < n) continue;
        for (std::size_t j = i + 1; j < probe.size(); ++j) {
          Dist defect = std::abs(dy[j] - dy[i] - (probe.times[j] - probe.times[i]));
          if (defect != 0)
            record_failure(rep, {probe.times[i], probe.times[j], ball.ball.points[yi],
                                 defect});
        }
      }
    }
  }
  rep.passed = all_found;
  return rep;
}

// ---------------------------------------------------------------------------
// Splitting counterexample
// ---------------------------------------------------------------------------

SplittingReport splitting_counterexample(const PolygonSpec& spec, DistanceOracle& oracle,
                                         const BasepointSeq& xi, int N, int m_min,
                                         int m_max, const ProbeOptions& opts) {
  const int start = std::max(m_min, constant_tail_start(spec, xi));
  if (N < 2 || N > m_max) throw Error("splitting counterexample: N out of range");
  std::vector<Address> samples{xi.prefix(1)};
  bool up_turn = true;
  for (int m = start; m <= m_max; ++m, up_turn = !up_turn) {
    const int c = xi.letter(m - 1);
    samples.push_back(up_turn ? constant_then(spec, c + spec.f, m - 1, c)
                              : constant_then(spec, c + spec.ftilde, m - 1, c));
  }
  SplittingReport out;
  out.probe = finish_probe(spec, xi, ProbeKind::Custom, 0,
                           assemble(spec, oracle, xi, samples, opts.margin));

  const int cN = xi.letter(N - 1);
  const int M = out.probe.ambient_level;
  Address y = realize_at(spec, xi, constant_then(spec, cN + spec.f, N - 1, cN), M);
  out.witness_y = canonical(spec, y);

  DefectReport rep;
  rep.condition = RayCondition::Weakly;
  std::vector<Dist> dy(out.probe.size());
  for (std::size_t i = 0; i < out.probe.size(); ++i)
    dy[i] = oracle.dist(M, y, out.probe.realized[i]);
  std::vector<Dist> thresholds{0};
  for (std::size_t i = 0; i + 1 < out.probe.size(); ++i)
    if (out.probe.times[i] > 0) thresholds.push_back(out.probe.times[i]);
  bool fails_everywhere = true;
  for (Dist n : thresholds) {
    bool witnessed = false;
    for (std::size_t i = 0; i < out.probe.size() && !witnessed; ++i) {
      if (out.probe.times[i] < n) continue;
      for (std::size_t j = i + 1; j < out.probe.size(); ++j) {
        Dist defect =
            std::abs(dy[j] - dy[i] - (out.probe.times[j] - out.probe.times[i]));
        if (defect >= 1) {
          record_failure(rep, {out.probe.times[i], out.probe.times[j], out.witness_y,
                               defect});
          witnessed = true;
          break;
        }
      }
    }
    fails_everywhere = fails_everywhere && witnessed;
  }
  rep.passed = !fails_everywhere;  // the construction should fail at every threshold
  out.weakly = std::move(rep);
  return out;
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

namespace {
HoroProfile census_profile(DistanceOracle& oracle, const RayProbe& probe,
                           const StableBall& ball, const std::string& id) {
  try {
    return horoprofile(oracle, probe, ball);
  } catch (const NotStabilized& e) {
    throw NotStabilized(std::string("probe '") + id + "': " + e.what());
  }
}
}  // namespace

CensusReport boundary_census(const PolygonSpec& spec, const BasepointSeq& xi,
                             const CensusParams& params) {
  validate_sequence(spec, xi);
  CensusReport rep;
  rep.spec = spec;
  rep.xi = xi;
  rep.params = params;

  DistanceOracle oracle(spec);
  rep.ball = stable_ball(spec, xi, params.radius);

  ProbeOptions popts;
  popts.margin = params.radius + 8;

  // rays deep enough to pass the m_max gluing vertex
  const int c_top = xi.letter(params.m_max - 1);
  std::vector<Address> top{xi.prefix(1),
                           constant_then(spec, c_top + spec.f, params.m_max - 1, c_top)};
  Dist depth = assemble(spec, oracle, xi, top, 0).times.back();

  RayProbe up_probe = gluing_ray(spec, oracle, xi, true, depth, popts);
  RayProbe down_probe = gluing_ray(spec, oracle, xi, false, depth, popts);
  rep.up = {"up", test_geodesic(oracle, up_probe),
            census_profile(oracle, up_probe, rep.ball, "busemann-up"), "busemann-up"};
  rep.down = {"down", test_geodesic(oracle, down_probe),
              census_profile(oracle, down_probe, rep.ball, "busemann-down"),
              "busemann-down"};

  RayProbe ant = antipodal_sequence(spec, oracle, xi, params.m_min, params.m_max, popts);
  rep.antipodal.weakly = test_weakly_geodesic(oracle, ant, rep.ball, params.n_budget);
  rep.antipodal.almost_failures = almost_failure_certificate(oracle, ant);
  rep.antipodal.fails_every_threshold =
      !rep.antipodal.almost_failures.empty() &&
      std::all_of(rep.antipodal.almost_failures.begin(), rep.antipodal.almost_failures.end(),
                  [](const AlmostFailure& a) { return a.defect >= 1; });
  rep.antipodal.profile = census_profile(oracle, ant, rep.ball, "antipodal");
  rep.antipodal.profile_id = "antipodal";

  for (int t = params.shift_min; t <= params.shift_max; ++t) {
    ShiftedProbe sp =
        shifted_sequence(spec, oracle, xi, t, params.m_min, params.m_max, popts);
    CensusShifted cs;
    cs.t = t;
    cs.profile_id = t < 0 ? "shift" + std::to_string(t) : "shift+" + std::to_string(t);
    cs.weakly = test_weakly_geodesic(oracle, sp.probe, rep.ball, params.n_budget);
    cs.profile = census_profile(oracle, sp.probe, rep.ball, cs.profile_id);
    cs.dropped_m = sp.dropped_m;
    rep.shifted.push_back(std::move(cs));
  }

  std::vector<std::pair<std::string, const HoroProfile*>> all;
  all.emplace_back(rep.up.profile_id, &rep.up.profile);
  all.emplace_back(rep.down.profile_id, &rep.down.profile);
  all.emplace_back(rep.antipodal.profile_id, &rep.antipodal.profile);
  for (const auto& cs : rep.shifted) all.emplace_back(cs.profile_id, &cs.profile);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      rep.distinctness.push_back(
          {all[i].first, all[j].first, profiles_distinct(*all[i].second, *all[j].second)});

  for (const auto& cs : rep.shifted)
    if (cs.t == 0)
      rep.shift0_equals_antipodal =
          !profiles_distinct(cs.profile, rep.antipodal.profile).has_value();
  return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

nlohmann::json defect_json(const PolygonSpec& spec, const DefectReport& rep) {
  nlohmann::json d;
  d["condition"] = rep.condition == RayCondition::Geodesic   ? "geodesic"
                   : rep.condition == RayCondition::Almost   ? "almost"
                                                             : "weakly";
  d["passed"] = rep.passed;
  d["maxDefect"] = rep.max_defect;
  d["failureCount"] = rep.failure_count;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& e : rep.failures) {
    nlohmann::json f;
    f["s"] = e.s;
    f["t"] = e.t;
    if (e.y) f["y"] = e.y->canonical.str(spec);
    f["defect"] = e.defect;
    fs.push_back(std::move(f));
  }
  d["failures"] = std::move(fs);
  if (!rep.witness_n.empty()) {
    nlohmann::json wn = nlohmann::json::object();
    for (const auto& [p, n] : rep.witness_n) wn[p.canonical.str(spec)] = n;
    d["weaklyN"] = std::move(wn);
  }
  return d;
}

nlohmann::json profile_json(const PolygonSpec& spec, const HoroProfile& p) {
  nlohmann::json d;
  nlohmann::json vals = nlohmann::json::object();
  for (std::size_t i = 0; i < p.points.size(); ++i)
    vals[p.points[i].canonical.str(spec)] = p.values[i];
  d["values"] = std::move(vals);
  d["stabilizedAt"] = p.stabilized_at;
  return d;
}

}  // namespace

std::string census_json(const CensusReport& rep) {
  const PolygonSpec& spec = rep.spec;
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  doc["spec"] = {{"r", spec.r}, {"f", spec.f}, {"ftilde", spec.ftilde}};
  doc["xi"] = rep.xi.str(spec);
  doc["params"] = {{"mMin", rep.params.m_min},
                   {"mMax", rep.params.m_max},
                   {"radius", rep.params.radius},
                   {"shiftMin", rep.params.shift_min},
                   {"shiftMax", rep.params.shift_max},
                   {"nBudget", rep.params.n_budget}};
  doc["ball"] = {{"center", rep.ball.ball.center.canonical.str(spec)},
                 {"radius", rep.ball.cert.radius},
                 {"level", rep.ball.cert.level},
                 {"size", rep.ball.ball.points.size()}};
  nlohmann::json bus = nlohmann::json::array();
  for (const CensusRay* ray : {&rep.up, &rep.down}) {
    nlohmann::json b;
    b["direction"] = ray->direction;
    b["geodesicDefects"] = defect_json(spec, ray->geodesic);
    b["profileId"] = ray->profile_id;
    bus.push_back(std::move(b));
  }
  doc["busemann"] = std::move(bus);
  nlohmann::json ant;
  ant["weakly"] = defect_json(spec, rep.antipodal.weakly);
  nlohmann::json wn = nlohmann::json::object();
  for (const auto& [p, n] : rep.antipodal.weakly.witness_n)
    wn[p.canonical.str(spec)] = n;
  ant["weaklyN"] = std::move(wn);
  nlohmann::json afs = nlohmann::json::array();
  for (const auto& a : rep.antipodal.almost_failures)
    afs.push_back({{"n", a.n}, {"s", a.s}, {"t", a.t}, {"defect", a.defect}});
  ant["almostFailures"] = std::move(afs);
  ant["failsEveryThreshold"] = rep.antipodal.fails_every_threshold;
  ant["profileId"] = rep.antipodal.profile_id;
  doc["antipodal"] = std::move(ant);
  nlohmann::json sh = nlohmann::json::array();
  for (const auto& cs : rep.shifted) {
    nlohmann::json s;
    s["t"] = cs.t;
    s["weakly"] = defect_json(spec, cs.weakly);
    s["profileId"] = cs.profile_id;
    s["droppedM"] = cs.dropped_m;
    sh.push_back(std::move(s));
  }
  doc["shifted"] = std::move(sh);
  nlohmann::json dis = nlohmann::json::array();
  for (const auto& e : rep.distinctness) {
    nlohmann::json d;
    d["a"] = e.id_a;
    d["b"] = e.id_b;
    if (e.witness)
      d["witness"] = e.witness->canonical.str(spec);
    else
      d["witness"] = nullptr;
    dis.push_back(std::move(d));
  }
  doc["distinctness"] = std::move(dis);
  nlohmann::json profs;
  profs[rep.up.profile_id] = profile_json(spec, rep.up.profile);
  profs[rep.down.profile_id] = profile_json(spec, rep.down.profile);
  profs[rep.antipodal.profile_id] = profile_json(spec, rep.antipodal.profile);
  for (const auto& cs : rep.shifted) profs[cs.profile_id] = profile_json(spec, cs.profile);
  doc["profiles"] = std::move(profs);
  doc["shift0EqualsAntipodal"] = rep.shift0_equals_antipodal;
  return doc.dump(2) + "\n";
}

}  // namespace sierpoly
