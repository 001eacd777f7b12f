#include "sierpoly/limit.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace sierpoly {

// ---------------------------------------------------------------------------
// LimitVertex
// ---------------------------------------------------------------------------

Address LimitVertex::realize(std::size_t k) const {
  if (k < word.size()) throw Error("realization level below vertex depth");
  Address out = word;
  for (std::size_t i = word.size(); i < k; ++i) out.push_back(base.letter(i));
  return out;
}

LimitVertex make_limit_vertex(const BasepointSeq& xi, const Address& word) {
  Address w = word;
  while (!w.empty() && w.last() == xi.letter(w.size() - 1)) w.pop_back();
  return LimitVertex{xi, w};
}

LimitVertex lift(const BasepointSeq& xi, const Address& realized) {
  return make_limit_vertex(xi, realized);
}

bool vertex_in_limit(const BasepointSeq& xi, const BasepointSeq& eta) {
  return cofinal(xi, eta).has_value();
}

// ---------------------------------------------------------------------------
// Stabilization
// ---------------------------------------------------------------------------

bool corner_condition(const PolygonSpec& spec, DistanceOracle& oracle,
                      const BasepointSeq& xi, int level, Dist radius) {
  // Beyond the preperiod every copy index is a period letter c, and the copy
  // chain attaches to the rest of each deeper graph only at the corners
  // (c+f)^k and (c+2f)^k. Keeping those corners farther than twice the
  // radius confines every geodesic between ball points to the copy chain,
  // so the ball and its matrix are pinned at all deeper levels. Corners
  // outside this set may stay close (xi cofinal with a corner) and are
  // harmless: they never re-attach the chain.
  if (level < static_cast<int>(xi.preperiod().size())) return false;
  std::set<Letter> attach;
  for (std::size_t i = 0; i < xi.period().size(); ++i) {
    const int c = xi.period().at(i);
    attach.insert(static_cast<Letter>((c + spec.f) % spec.r));
    attach.insert(static_cast<Letter>((c + spec.ftilde) % spec.r));
  }
  const Address base = xi.prefix(level);
  for (Letter y : attach) {
    if (Address::constant(y, level) == base) return false;
    if (oracle.corner_dist(base, y) <= 2 * radius) return false;
  }
  return true;
}

namespace {

PointedBall level_ball(const PolygonSpec& spec, DistanceOracle& oracle,
                       const BasepointSeq& xi, int level, Dist radius) {
  LevelGraph g(spec, level, GraphMode::Implicit);
  return ball(g, canonical(spec, xi.prefix(level)), radius, &oracle);
}

bool window_isometric(const PolygonSpec& spec, DistanceOracle& oracle,
                      const BasepointSeq& xi, int level, Dist radius, int window) {
  PointedBall prev = level_ball(spec, oracle, xi, level, radius);
  for (int k = level + 1; k <= level + window; ++k) {
    PointedBall next = level_ball(spec, oracle, xi, k, radius);
    if (!pointed_isometric(prev, next)) return false;
    prev = std::move(next);
  }
  return true;
}

}  // namespace

StabilizationCertificate stabilization_level(const PolygonSpec& spec,
                                             const BasepointSeq& xi, Dist radius,
                                             CertMode mode,
                                             const StabilizationOptions& opts) {
  validate_sequence(spec, xi);
  DistanceOracle oracle(spec);
  for (int M = 1; M <= opts.max_level; ++M) {
    if (mode == CertMode::Certified && !corner_condition(spec, oracle, xi, M, radius))
      continue;
    if (!window_isometric(spec, oracle, xi, M, radius, opts.window)) {
      if (mode == CertMode::Certified)
        throw Error("corner condition held but window isometry failed at level " +
                    std::to_string(M));
      continue;
    }
    return StabilizationCertificate{xi, radius, M, opts.window, mode};
  }
  throw StabilizationBudgetExceeded(
      "no stabilization level found up to " + std::to_string(opts.max_level),
      opts.max_level);
}

StableBall stable_ball(const PolygonSpec& spec, const BasepointSeq& xi, Dist radius,
                       const StabilizationOptions& opts) {
  StabilizationCertificate cert =
      stabilization_level(spec, xi, radius, CertMode::Certified, opts);
  DistanceOracle oracle(spec);
  StableBall out{level_ball(spec, oracle, xi, cert.level, radius), {}, cert};
  out.lifts.reserve(out.ball.points.size());
  for (const VertexId& p : out.ball.points) out.lifts.push_back(lift(xi, p.canonical));
  return out;
}

// ---------------------------------------------------------------------------
// Dihedral equivariance
// ---------------------------------------------------------------------------

bool reflections_letterwise_equivariant(const PolygonSpec& spec) {
  return (3 * spec.f) % spec.r == 0;
}

std::vector<EquivarianceReport> dihedral_equivariance_check(const PolygonSpec& spec, int k) {
  if (k < 2) throw Error("equivariance check requires level >= 2");
  std::vector<EquivarianceReport> out;
  for (const DihedralElement& sigma : dihedral_elements(spec)) {
    EquivarianceReport rep;
    rep.sigma = sigma;
    rep.preserves_classes = true;
    rep.preserves_edges = true;
    for_each_address(spec, k, [&](const Address& a) {
      auto partner = gluing_partner(spec, a);
      Address ia = apply_dihedral(spec, sigma, a);
      if (partner) {
        Address ip = apply_dihedral(spec, sigma, *partner);
        auto image_partner = gluing_partner(spec, ia);
        if (!image_partner || *image_partner != ip) {
          rep.preserves_classes = false;
          if (rep.class_counterexamples.size() < 4)
            rep.class_counterexamples.emplace_back(a, ia);
        }
      }
      // first-letter cycle edge a -- a+1
      Address b = a;
      b.set(0, static_cast<Letter>((a.first() + 1) % spec.r));
      Address ib = apply_dihedral(spec, sigma, b);
      VertexId iu = canonical(spec, ia);
      VertexId iv = canonical(spec, ib);
      if (iu == iv) {
        rep.preserves_edges = false;
      } else {
        auto ns = neighbors(spec, k, iu);
        if (!std::binary_search(ns.begin(), ns.end(), iv)) rep.preserves_edges = false;
      }
    });
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism experiments
// ---------------------------------------------------------------------------

IsoVerdict iso_check_theorem(const PolygonSpec& spec, const BasepointSeq& xi,
                             const BasepointSeq& eta, Dist max_radius,
                             const StabilizationOptions& opts) {
  IsoVerdict v;
  v.reflections_searched = reflections_letterwise_equivariant(spec);
  for (const DihedralElement& sigma : dihedral_elements(spec)) {
    if (sigma.reflect && !v.reflections_searched) continue;
    if (auto n = cofinal(eta, apply_dihedral(spec, sigma, xi))) {
      v.algebraic_found = true;
      v.sigma = sigma;
      v.cofinal_index = *n;
      break;
    }
  }
  bool all_pointed = true, all_sigma = true, any_relaxed_fail = false;
  for (Dist l = 1; l <= max_radius; ++l) {
    IsoRadiusEvidence ev;
    ev.radius = l;
    StableBall bx = stable_ball(spec, xi, l, opts);
    StableBall be = stable_ball(spec, eta, l, opts);
    ev.pointed_isometric = pointed_isometric(bx.ball, be.ball).has_value();
    ev.relaxed_isometric =
        ev.pointed_isometric || any_isometric(bx.ball, be.ball).has_value();
    if (v.algebraic_found) {
      StableBall bs = stable_ball(spec, apply_dihedral(spec, v.sigma, xi), l, opts);
      ev.sigma_ball_isometric = pointed_isometric(bx.ball, bs.ball).has_value();
      all_sigma = all_sigma && ev.sigma_ball_isometric;
    }
    all_pointed = all_pointed && ev.pointed_isometric;
    any_relaxed_fail = any_relaxed_fail || !ev.relaxed_isometric;
    v.radii.push_back(ev);
  }
  if (v.algebraic_found) {
    // the sound geometric counterpart compares around corresponding points
    v.agreement = all_sigma ? "consistent" : "violated";
  } else {
    v.agreement = any_relaxed_fail ? "balls-differ" : "inconclusive";
  }
  return v;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string certificate_json(const PolygonSpec& spec, const StabilizationCertificate& c) {
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  doc["xi"] = c.xi.str(spec);
  doc["radius"] = c.radius;
  doc["level"] = c.level;
  doc["window"] = c.window;
  doc["mode"] = c.mode == CertMode::Certified ? "certified" : "heuristic";
  return doc.dump(2) + "\n";
}

std::string iso_verdict_json(const PolygonSpec& spec, const IsoVerdict& v) {
  (void)spec;
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  nlohmann::json alg;
  alg["found"] = v.algebraic_found;
  if (v.algebraic_found) {
    alg["sigma"] = {{"shift", v.sigma.shift}, {"reflect", v.sigma.reflect}};
    alg["N"] = v.cofinal_index;
  }
  alg["reflectionsSearched"] = v.reflections_searched;
  doc["algebraic"] = std::move(alg);
  nlohmann::json geo = nlohmann::json::array();
  for (const auto& ev : v.radii) {
    nlohmann::json e;
    e["radius"] = ev.radius;
    e["isometric"] = ev.relaxed_isometric;
    e["pointedIsometric"] = ev.pointed_isometric;
    e["relaxedIsometric"] = ev.relaxed_isometric;
    if (v.algebraic_found) e["sigmaBallIsometric"] = ev.sigma_ball_isometric;
    geo.push_back(std::move(e));
  }
  doc["geometric"] = std::move(geo);
  doc["agreement"] = v.agreement;
  return doc.dump(2) + "\n";
}

std::string equivariance_json(const PolygonSpec& spec,
                              const std::vector<EquivarianceReport>& reports) {
  nlohmann::json doc;
  doc["schemaVersion"] = 1;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rep : reports) {
    nlohmann::json e;
    e["sigma"] = {{"shift", rep.sigma.shift}, {"reflect", rep.sigma.reflect}};
    e["preservesClasses"] = rep.preserves_classes;
    e["preservesEdges"] = rep.preserves_edges;
    nlohmann::json ces = nlohmann::json::array();
    for (const auto& [a, ia] : rep.class_counterexamples)
      ces.push_back({a.str(spec), ia.str(spec)});
    e["classCounterexamples"] = std::move(ces);
    arr.push_back(std::move(e));
  }
  doc["reports"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace sierpoly
