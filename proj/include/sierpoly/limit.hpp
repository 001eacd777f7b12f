#ifndef SIERPOLY_LIMIT_HPP
#define SIERPOLY_LIMIT_HPP

#include <optional>
#include <string>
#include <vector>

#include "sierpoly/metric.hpp"

namespace sierpoly {

// ---------------------------------------------------------------------------
// LimitVertex
// ---------------------------------------------------------------------------

/// A vertex of the limit graph: the sequence word . (tail of xi after
/// position |word|). Normal form trims trailing word letters that already
/// match xi. Every such sequence is cofinal with xi, hence a vertex.
struct LimitVertex {
  BasepointSeq base;
  Address word;   // first |word| letters; may be empty (the basepoint itself)

  std::size_t depth() const { return word.size(); }
  BasepointSeq as_sequence() const { return base.with_prefix_replaced(word); }
  /// Realization in Gamma_k for k >= depth: word extended by xi's letters.
  Address realize(std::size_t k) const;
  bool operator==(const LimitVertex& o) const {
    return as_sequence() == o.as_sequence();
  }
};

LimitVertex make_limit_vertex(const BasepointSeq& xi, const Address& word);
/// Lift a realized level-k canonical address back to a limit vertex.
LimitVertex lift(const BasepointSeq& xi, const Address& realized);

/// Lemma-style membership: eta is a vertex of Gamma_xi iff cofinal(xi, eta).
bool vertex_in_limit(const BasepointSeq& xi, const BasepointSeq& eta);

// ---------------------------------------------------------------------------
// Stabilization
// ---------------------------------------------------------------------------

enum class CertMode { Heuristic, Certified };

struct StabilizationCertificate {
  BasepointSeq xi;
  Dist radius = 0;
  int level = 0;       // M
  int window = 0;      // W: pointed isometries verified on [M, M+W]
  CertMode mode = CertMode::Heuristic;
};

class StabilizationBudgetExceeded : public Error {
public:
  StabilizationBudgetExceeded(const std::string& msg, int largest)
      : Error(msg), largest_level_tried(largest) {}
  int largest_level_tried;
};

struct StabilizationOptions {
  int window = 2;
  int max_level = 48;
};

/// Minimal level passing the mode's criterion. Heuristic: consecutive
/// pointed ball isometries across the window. Certified: additionally the
/// corner-confinement condition d(xi[M], y^M) > 2*radius for every corner
/// the copy chain can re-attach through, which pins the ball and its
/// matrix at all deeper levels.
StabilizationCertificate stabilization_level(const PolygonSpec& spec,
                                             const BasepointSeq& xi, Dist radius,
                                             CertMode mode,
                                             const StabilizationOptions& opts = {});

/// Does the corner-confinement condition hold at this level?
bool corner_condition(const PolygonSpec& spec, DistanceOracle& oracle,
                      const BasepointSeq& xi, int level, Dist radius);

/// The limit ball B(xi, radius) realized at its certificate level, with
/// limit-vertex identities for every point.
struct StableBall {
  PointedBall ball;
  std::vector<LimitVertex> lifts;   // parallel to ball.points
  StabilizationCertificate cert;
};

StableBall stable_ball(const PolygonSpec& spec, const BasepointSeq& xi, Dist radius,
                       const StabilizationOptions& opts = {});

// ---------------------------------------------------------------------------
// Dihedral equivariance
// ---------------------------------------------------------------------------

struct EquivarianceReport {
  DihedralElement sigma;
  bool preserves_classes = false;
  bool preserves_edges = false;
  // up to a handful of counterexamples, as (class member, image) pairs
  std::vector<std::pair<Address, Address>> class_counterexamples;
};

/// Checks, for every sigma in D_r, whether the letterwise action on level-k
/// addresses maps gluing classes to gluing classes and edges to edges.
/// Purely reported; reflections genuinely fail for some r.
std::vector<EquivarianceReport> dihedral_equivariance_check(const PolygonSpec& spec, int k);

/// Letterwise reflections respect the gluing rule iff r divides 3*f.
bool reflections_letterwise_equivariant(const PolygonSpec& spec);

// ---------------------------------------------------------------------------
// Isomorphism experiments
// ---------------------------------------------------------------------------

struct IsoRadiusEvidence {
  Dist radius = 0;
  bool pointed_isometric = false;   // B(xi,l) vs B(eta,l), centers pinned
  bool relaxed_isometric = false;   // any matrix-preserving bijection
  bool sigma_ball_isometric = false;  // B(xi,l) vs B(sigma(xi),l), when sigma found
};

struct IsoVerdict {
  bool algebraic_found = false;
  DihedralElement sigma;
  std::size_t cofinal_index = 0;    // agreement index N when found
  bool reflections_searched = false;
  std::vector<IsoRadiusEvidence> radii;
  std::string agreement;            // "consistent" | "inconclusive" | "balls-differ"
};

/// Theorem-style experiment: search sigma in D_r with eta ~ sigma(xi)
/// (reflections only when letterwise equivariant), then compare stable
/// balls radius by radius.
IsoVerdict iso_check_theorem(const PolygonSpec& spec, const BasepointSeq& xi,
                             const BasepointSeq& eta, Dist max_radius,
                             const StabilizationOptions& opts = {});

std::string certificate_json(const PolygonSpec& spec, const StabilizationCertificate& c);
std::string iso_verdict_json(const PolygonSpec& spec, const IsoVerdict& v);
std::string equivariance_json(const PolygonSpec& spec,
                              const std::vector<EquivarianceReport>& reports);

}  // namespace sierpoly

#endif
