#ifndef SIERPOLY_BOUNDARY_HPP
#define SIERPOLY_BOUNDARY_HPP

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sierpoly/limit.hpp"

namespace sierpoly {

class NotStabilized : public Error {
public:
  explicit NotStabilized(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Frames around the hole
// ---------------------------------------------------------------------------

/// The level-m data around the basepoint's copy: c is xi's m-th letter,
/// bUp/bDown the gluing vertices joining copy c upward and downward, and
/// A, B the outer gluing vertices of the antipodal copy (r even) or copies
/// (r odd). All are level-m canonicals.
struct HoleFrame {
  int m = 0;
  Letter copy_index = 0;
  VertexId b_up, b_down;
  std::vector<int> antipodal_copies;  // one entry (r even) or two (r odd)
  VertexId A, B;
};

HoleFrame frame(const PolygonSpec& spec, const BasepointSeq& xi, int m);

/// The canonical (lex-least) geodesic from A to B constrained inside the
/// antipodal copy/copies, as level-m classes. Edges are realized by member
/// addresses whose coarse letter stays in the antipodal copy set.
std::vector<VertexId> antipodal_geodesic(const PolygonSpec& spec, const HoleFrame& fr);

/// All constrained A->B geodesics in lexicographic order, up to max_count.
std::vector<std::vector<VertexId>> antipodal_geodesics(const PolygonSpec& spec,
                                                       const HoleFrame& fr,
                                                       std::size_t max_count);

/// The antipodal point of the m-hole with respect to xi: the shared gluing
/// vertex of the two antipodal copies (r odd), or the midpoint of the
/// canonical constrained A->B geodesic (r even). The equidistance
/// d(bUp, p) = d(bDown, p) is asserted in ambient Gamma_m.
LimitVertex antipodal_point(const PolygonSpec& spec, DistanceOracle& oracle,
                            const BasepointSeq& xi, int m);

// ---------------------------------------------------------------------------
// Ray probes
// ---------------------------------------------------------------------------

enum class ProbeKind { GluingUp, GluingDown, Antipodal, Shifted, Custom };

/// A finite sample of a candidate ray: strictly increasing times t with
/// d(xi, point) = t exactly, first sample (0, xi). All samples are realized
/// at one ambient level whose certificate covers certified_radius, so every
/// stored or derived distance equals its limit-graph value.
struct RayProbe {
  BasepointSeq base;
  ProbeKind kind = ProbeKind::Custom;
  int shift = 0;
  std::vector<Dist> times;
  std::vector<LimitVertex> points;
  std::vector<Address> realized;  // canonical level-ambient_level addresses
  int ambient_level = 0;
  Dist certified_radius = 0;

  std::size_t size() const { return times.size(); }
};

/// d(probe sample i, probe sample j), exact.
Dist probe_dist(DistanceOracle& oracle, const RayProbe& probe, std::size_t i,
                std::size_t j);

struct ProbeOptions {
  Dist margin = 16;       // certificate slack beyond the farthest sample
  int m_start = 0;        // 0: first level with the constant tail letter
};

/// The concatenated geodesic through the chain of up (resp. down) gluing
/// vertices, interpolated at every integer time up to `depth`. Verifies the
/// exact geodesic condition on all sampled pairs and throws on violation.
RayProbe gluing_ray(const PolygonSpec& spec, DistanceOracle& oracle,
                    const BasepointSeq& xi, bool up, Dist depth,
                    const ProbeOptions& opts = {});

/// Antipodal points p_m for m in [m_min, m_max].
RayProbe antipodal_sequence(const PolygonSpec& spec, DistanceOracle& oracle,
                            const BasepointSeq& xi, int m_min, int m_max,
                            const ProbeOptions& opts = {});

/// Probe through caller-chosen sample classes (any native levels); the
/// basepoint sample is prepended. Times must come out strictly increasing.
RayProbe custom_probe(const PolygonSpec& spec, DistanceOracle& oracle,
                      const BasepointSeq& xi, const std::vector<Address>& samples,
                      const ProbeOptions& opts = {});

struct ShiftedProbe {
  RayProbe probe;
  std::vector<int> dropped_m;  // stages where the shift fell off the geodesic
};

/// Samples gamma_m(t_hat + t) along the constrained A->B geodesics, where
/// t_hat is the midpoint parameter; t = 0 reproduces the antipodal points.
ShiftedProbe shifted_sequence(const PolygonSpec& spec, DistanceOracle& oracle,
                              const BasepointSeq& xi, int t, int m_min, int m_max,
                              const ProbeOptions& opts = {});

// ---------------------------------------------------------------------------
// Horofunction profiles
// ---------------------------------------------------------------------------

/// The restriction of y -> d(y, v) - d(xi, v) to a stable ball, taken at the
/// stabilized tail of the probe. Values are exact integers.
struct HoroProfile {
  BasepointSeq xi;
  Dist radius = 0;
  std::vector<VertexId> points;  // the stable ball's points
  std::vector<Dist> values;
  std::size_t stabilized_at = 0;  // first sample index from which constant
};

HoroProfile horoprofile(DistanceOracle& oracle, const RayProbe& probe,
                        const StableBall& ball);

/// Least point (canonical order) where the two profiles differ, if any.
/// Throws unless both profiles restrict the same ball.
std::optional<VertexId> profiles_distinct(const HoroProfile& p1, const HoroProfile& p2);

// ---------------------------------------------------------------------------
// Defect tests (exact integer identities of the ray definitions)
// ---------------------------------------------------------------------------

enum class RayCondition { Geodesic, Almost, Weakly };

struct DefectEntry {
  Dist s = 0, t = 0;
  std::optional<VertexId> y;
  Dist defect = 0;
};

struct DefectReport {
  RayCondition condition = RayCondition::Geodesic;
  bool passed = false;
  Dist max_defect = 0;
  std::vector<DefectEntry> failures;                 // capped
  std::vector<std::pair<VertexId, Dist>> witness_n;  // weakly: N(y) per point
  std::size_t failure_count = 0;
};

/// |d(gamma(t), gamma(s)) - |t - s|| over all sampled pairs.
DefectReport test_geodesic(DistanceOracle& oracle, const RayProbe& probe);

/// |d(gamma(t), gamma(s)) + d(gamma(s), gamma(0)) - t| over t >= s >= N.
DefectReport test_almost_geodesic(DistanceOracle& oracle, const RayProbe& probe, Dist N);

/// For each ball point y, the minimal threshold N(y) <= n_budget such that
/// all sampled s, t >= N(y) give |d(gamma(t), y) - d(gamma(s), y) - (t-s)| = 0;
/// fails with witnesses when no threshold below the penultimate time works.
DefectReport test_weakly_geodesic(DistanceOracle& oracle, const RayProbe& probe,
                                  const StableBall& ball, Dist n_budget);

struct AlmostFailure {
  Dist n = 0;       // threshold candidate
  Dist s = 0, t = 0;
  Dist defect = 0;  // >= 1
};

/// For every threshold N in {0} union sample times up to the penultimate,
/// a witness pair t >= s >= N with almost-geodesic defect >= 1, when one
/// exists. The probe fails to be almost-geodesic iff every N has a witness.
std::vector<AlmostFailure> almost_failure_certificate(DistanceOracle& oracle,
                                                      const RayProbe& probe);

// ---------------------------------------------------------------------------
// Splitting counterexample
// ---------------------------------------------------------------------------

struct SplittingReport {
  RayProbe probe;       // alternates between the up and down gluing chains
  VertexId witness_y;   // bUp_N realized at the probe's ambient level
  DefectReport weakly;  // strictly positive defects at y for every threshold
};

/// A sequence alternating between vertices behind bUp and behind bDown can
/// not be weakly geodesic: the report exhibits the failure at y = bUp_N.
SplittingReport splitting_counterexample(const PolygonSpec& spec, DistanceOracle& oracle,
                                         const BasepointSeq& xi, int N, int m_min,
                                         int m_max, const ProbeOptions& opts = {});

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

struct CensusParams {
  int m_min = 2;
  int m_max = 7;
  Dist radius = 8;
  int shift_min = -3;
  int shift_max = 3;
  Dist n_budget = 1 << 20;
};

struct CensusRay {
  std::string direction;
  DefectReport geodesic;
  HoroProfile profile;
  std::string profile_id;
};

struct CensusAntipodal {
  DefectReport weakly;
  std::vector<AlmostFailure> almost_failures;
  bool fails_every_threshold = false;
  HoroProfile profile;
  std::string profile_id;
};

struct CensusShifted {
  int t = 0;
  DefectReport weakly;
  HoroProfile profile;
  std::string profile_id;
  std::vector<int> dropped_m;
};

struct DistinctnessEntry {
  std::string id_a, id_b;
  std::optional<VertexId> witness;  // nullopt: profiles equal
};

struct CensusReport {
  PolygonSpec spec;
  BasepointSeq xi;
  CensusParams params;
  StableBall ball;
  CensusRay up, down;
  CensusAntipodal antipodal;
  std::vector<CensusShifted> shifted;
  std::vector<DistinctnessEntry> distinctness;
  bool shift0_equals_antipodal = false;
};

/// The full experiment for xi = w . j^inf: two geodesic-certified gluing-ray
/// profiles, the antipodal probe with its weakly-pass and almost-failure
/// certificates, and the shifted family, with pairwise distinctness
/// witnesses on the stable ball.
CensusReport boundary_census(const PolygonSpec& spec, const BasepointSeq& xi,
                             const CensusParams& params);

std::string census_json(const CensusReport& report);

}  // namespace sierpoly

#endif
