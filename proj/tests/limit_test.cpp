#include "doctest.h"

#include <algorithm>

#include "sierpoly/limit.hpp"

using namespace sierpoly;

namespace {
Address addr(const PolygonSpec& spec, const std::string& s) {
  return Address::parse(s, spec);
}
}  // namespace

TEST_CASE("limit vertices normalize against the base sequence") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq xi = BasepointSeq::constant(4);
  LimitVertex v = make_limit_vertex(xi, addr(spec, "13444"));
  CHECK(v.depth() == 2);  // trailing 4s match xi
  CHECK(v.realize(5) == addr(spec, "13444"));
  CHECK(v.as_sequence() == BasepointSeq::parse("13(4)*", spec));

  LimitVertex base = make_limit_vertex(xi, addr(spec, "444"));
  CHECK(base.depth() == 0);
  CHECK(base.as_sequence() == xi);
}

TEST_CASE("vertex membership in the limit graph") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq j4 = BasepointSeq::constant(4);
  CHECK(vertex_in_limit(j4, BasepointSeq::parse("13(4)*", spec)));
  CHECK(!vertex_in_limit(j4, BasepointSeq::constant(5)));
  CHECK(vertex_in_limit(BasepointSeq::parse("(45)*", spec),
                        BasepointSeq::parse("1(54)*", spec)));
}

TEST_CASE("stabilization levels") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq j4 = BasepointSeq::constant(4);

  // single-point balls are always isometric
  StabilizationCertificate c0 = stabilization_level(spec, j4, 0, CertMode::Heuristic);
  CHECK(c0.level == 1);

  StabilizationCertificate c3 = stabilization_level(spec, j4, 3, CertMode::Heuristic);
  CHECK(c3.level >= 1);
  CHECK(c3.window == 2);

  BasepointSeq fig = BasepointSeq::parse("1(54)*", spec);
  StabilizationCertificate c5 = stabilization_level(spec, fig, 5, CertMode::Heuristic);
  CHECK(c5.level >= 1);
  StabilizationCertificate c5c = stabilization_level(spec, fig, 5, CertMode::Certified);
  CHECK(c5c.level >= c5.level);

  // monotone in the radius, for both modes
  for (CertMode mode : {CertMode::Heuristic, CertMode::Certified}) {
    int prev = 0;
    for (Dist l : {0, 2, 4, 6, 8}) {
      int lvl = stabilization_level(spec, j4, l, mode).level;
      CHECK(lvl >= prev);
      prev = lvl;
    }
  }

  StabilizationOptions tight;
  tight.max_level = 1;
  CHECK_THROWS_AS(stabilization_level(spec, fig, 12, CertMode::Certified, tight),
                  StabilizationBudgetExceeded);
}

TEST_CASE("stable balls") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq j4 = BasepointSeq::constant(4);

  StableBall b0 = stable_ball(spec, j4, 0);
  CHECK(b0.ball.size() == 1);
  CHECK(b0.lifts[0].as_sequence() == j4);

  // xi = 4^inf is never a gluing vertex: degree 2 in the limit
  StableBall b1 = stable_ball(spec, j4, 1);
  CHECK(b1.ball.size() == 3);

  // recomputation one level deeper is pointed-isometric
  StableBall b3 = stable_ball(spec, j4, 3);
  DistanceOracle oracle(spec);
  LevelGraph deeper(spec, b3.cert.level + 1, GraphMode::Implicit);
  PointedBall again = ball(deeper, canonical(spec, j4.prefix(b3.cert.level + 1)), 3, &oracle);
  CHECK(pointed_isometric(b3.ball, again).has_value());

  // radius monotonicity: the smaller ball embeds isometrically, center fixed
  StableBall b2 = stable_ball(spec, j4, 2);
  for (std::size_t i = 0; i < b2.lifts.size(); ++i) {
    const BasepointSeq si = b2.lifts[i].as_sequence();
    auto jt = std::find_if(b3.lifts.begin(), b3.lifts.end(), [&](const LimitVertex& lv) {
      return lv.as_sequence() == si;
    });
    REQUIRE(jt != b3.lifts.end());
    std::size_t j = static_cast<std::size_t>(jt - b3.lifts.begin());
    CHECK(b3.ball.at(b3.ball.center_index(), j) == b2.ball.at(b2.ball.center_index(), i));
  }

  // rotation naturality
  DihedralElement rot{2, false};
  StableBall br = stable_ball(spec, apply_dihedral(spec, rot, j4), 3);
  CHECK(pointed_isometric(b3.ball, br.ball).has_value());

  // membership agrees with cofinality: 13 4^inf sits in a big enough ball
  BasepointSeq eta = BasepointSeq::parse("13(4)*", spec);
  DistanceOracle o2(spec);
  Dist d = o2.dist(6, j4.prefix(6), eta.prefix(6));
  StableBall big = stable_ball(spec, j4, d);
  bool found = false;
  for (const auto& lv : big.lifts) found = found || lv.as_sequence() == eta;
  CHECK(found);
}

TEST_CASE("dihedral equivariance reports") {
  // identity passes for every r; rotations pass everywhere
  for (int r : {3, 5, 6, 7}) {
    PolygonSpec spec = make_spec(r);
    auto reports = dihedral_equivariance_check(spec, 3);
    CHECK(reports.size() == static_cast<std::size_t>(2 * r));
    for (const auto& rep : reports) {
      if (!rep.sigma.reflect) {
        CHECK(rep.preserves_classes);
        CHECK(rep.preserves_edges);
      }
    }
  }

  // r=6: reflections are letterwise equivariant (3f = 6 = r)
  {
    PolygonSpec spec = make_spec(6);
    CHECK(reflections_letterwise_equivariant(spec));
    for (int k = 2; k <= 4; ++k)
      for (const auto& rep : dihedral_equivariance_check(spec, k))
        CHECK(rep.preserves_classes);
  }

  // r=5: the reflection x -> -x maps the glued pair {20,01} to the unglued
  // {30,04}; the report carries that verbatim
  {
    PolygonSpec spec = make_spec(5);
    CHECK(!reflections_letterwise_equivariant(spec));
    auto reports = dihedral_equivariance_check(spec, 2);
    const EquivarianceReport* refl0 = nullptr;
    for (const auto& rep : reports)
      if (rep.sigma.reflect && rep.sigma.shift == 0) refl0 = &rep;
    REQUIRE(refl0 != nullptr);
    CHECK(!refl0->preserves_classes);
    CHECK(!refl0->class_counterexamples.empty());
    CHECK(!gluing_partner(spec, addr(spec, "30")).has_value());
    CHECK(!gluing_partner(spec, addr(spec, "04")).has_value());
    CHECK(gluing_partner(spec, addr(spec, "20")) == addr(spec, "01"));
  }
}

TEST_CASE("isomorphism experiments") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq j4 = BasepointSeq::constant(4);

  SUBCASE("rotated sequence") {
    DihedralElement rot{3, false};
    BasepointSeq eta = apply_dihedral(spec, rot, j4);
    IsoVerdict v = iso_check_theorem(spec, j4, eta, 3);
    CHECK(v.algebraic_found);
    CHECK(v.sigma == rot);
    CHECK(v.agreement == "consistent");
    for (const auto& ev : v.radii) CHECK(ev.sigma_ball_isometric);
  }

  SUBCASE("cofinal pair, identity sigma") {
    BasepointSeq eta = BasepointSeq::parse("13(4)*", spec);
    IsoVerdict v = iso_check_theorem(spec, j4, eta, 2);
    CHECK(v.algebraic_found);
    CHECK(v.sigma == dihedral_identity());
    CHECK(v.cofinal_index == 3);
    CHECK(v.agreement == "consistent");
  }

  SUBCASE("4^inf vs (45)^inf: no sigma") {
    BasepointSeq eta = BasepointSeq::parse("(45)*", spec);
    IsoVerdict v = iso_check_theorem(spec, j4, eta, 3);
    CHECK(!v.algebraic_found);
    CHECK(v.reflections_searched);  // r=6: all 12 elements were tried
    CHECK(v.radii.size() == 3);
    CHECK((v.agreement == "balls-differ" || v.agreement == "inconclusive"));
  }
}

TEST_CASE("report json shapes") {
  PolygonSpec spec = make_spec(6);
  BasepointSeq j4 = BasepointSeq::constant(4);
  StabilizationCertificate c = stabilization_level(spec, j4, 2, CertMode::Certified);
  std::string js = certificate_json(spec, c);
  CHECK(js.find("\"mode\": \"certified\"") != std::string::npos);
  CHECK(js == certificate_json(spec, c));

  auto reports = dihedral_equivariance_check(spec, 2);
  CHECK(equivariance_json(spec, reports).find("preservesClasses") != std::string::npos);
}
