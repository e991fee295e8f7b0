#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "projcx/system.hpp"

namespace projcx {

class ProjectionComplex;  // complex.hpp

/// The pair set H(X,Z): (X,Z) itself, pairs whose projections to both X and
/// Z exceed 2 xi, and the two one-sided variants.
struct HSet {
  Vertex x = 0, z = 0;
  std::vector<std::pair<Vertex, Vertex>> members;
};

HSet h_set(const ProjectionSystem& sys, Vertex x, Vertex z);

/// Single modified-distance value computed by direct enumeration of H(x,z).
/// Kept independent of the cache below so the two routes can be compared.
double modified_distance_direct(const ProjectionSystem& sys, Vertex y, Vertex x, Vertex z);

/// Lazy per-pair cache of d_Y(X,Z): one H-set enumeration fills the row of
/// values for every Y. Rows are shared between (X,Z) and (Z,X). Not
/// thread-safe while filling; treat as read-only once warmed.
class ModifiedDistances {
 public:
  explicit ModifiedDistances(std::shared_ptr<const ProjectionSystem> sys);

  const ProjectionSystem& system() const { return *sys_; }
  double xi() const { return sys_->xi(); }
  std::size_t size() const { return n_; }

  /// d_Y(x,z); requires y != x, y != z, x != z.
  double operator()(Vertex y, Vertex x, Vertex z) const;

  /// Row of d_Y(x,z) over all y (entries y == x and y == z read as 0).
  std::span<const double> row(Vertex x, Vertex z) const;

  void warm_all() const;  // eager fill, single-threaded

 private:
  std::size_t pair_index(Vertex x, Vertex z) const;
  std::shared_ptr<const ProjectionSystem> sys_;
  std::size_t n_;
  mutable std::vector<std::unique_ptr<double[]>> rows_;
};

/// { Y not in {x,z} : d_Y(x,z) > threshold }, ascending vertex order.
std::vector<Vertex> large_set(const ModifiedDistances& d, Vertex x, Vertex z,
                              double threshold);

/// Y_K(X,Z) u {X,Z} sorted by the comparator Y < W iff d_Y(X,W) > xi, with X
/// least and Z greatest.
struct OrderedInterval {
  Vertex x = 0, z = 0;
  double threshold = 0;
  std::vector<Vertex> elements;  // begins with x, ends with z
};

/// Thrown when the comparator is not a strict total order at this K.
struct OrderError : std::runtime_error {
  Vertex a, b, c;
  OrderError(const std::string& what, Vertex a_, Vertex b_, Vertex c_)
      : std::runtime_error(what), a(a_), b(b_), c(c_) {}
};

OrderedInterval order_interval(const ModifiedDistances& d, Vertex x, Vertex z,
                               double threshold);

/// W guards Y at level K: from every viewpoint X with d_W(X,Y) > theta, every
/// Z in Y_K(X,Y) satisfies Z <= W in the order on Y_theta(X,Y).
bool is_guard(const ModifiedDistances& d, const CoreParams& params, Vertex w, Vertex y,
              double K);

/// Y sees every path vertex far from z: d_Y(X_i, z) > theta for all i.
bool is_barrier(const ModifiedDistances& d, const CoreParams& params, Vertex y,
                std::span<const Vertex> path, Vertex z);

/// Guard-chaining construction of a barrier between a path and z. Requires
/// every path vertex at complex distance >= 3 from z.
struct BarrierResult {
  std::optional<Vertex> barrier;
  std::vector<Vertex> guards;  // W_i per path vertex
  std::string diagnostic;      // set when no barrier was found
};
BarrierResult find_barrier(const ModifiedDistances& d, const CoreParams& params,
                           const ProjectionComplex& complex,
                           std::span<const Vertex> path, Vertex z);

// --------------------------------------------------------------- reports

struct AxiomViolation {
  std::string axiom;
  Vertex y = 0, x = 0, z = 0, w = 0;
  double value = 0;
};

struct AxiomReport {
  bool ok = true;
  double minimal_valid_xi = 0;  // max-min over triples plus one ulp
  std::size_t triples_checked = 0;
  bool triangle_exhaustive = true;  // false when the quadruple sweep was sampled
  std::size_t triangle_checked = 0;
  std::vector<AxiomViolation> violations;  // capped
  json to_json() const;
};

/// Checks symmetry/triangle exactly and the triple inequality strictly below
/// xi; finiteness is trivial for finite systems and only reported. The
/// quadruple triangle sweep falls back to seeded sampling above
/// `exhaustive_quadruple_budget`.
AxiomReport validate_axioms(const ProjectionSystem& sys,
                            std::size_t exhaustive_quadruple_budget = 200'000'000,
                            std::uint64_t sample_seed = 0);

struct ClauseReport {
  std::string statement;  // property tag carried into exported reports
  bool pass = true;
  bool flagged = false;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_slack = 0;
  std::vector<AxiomViolation> samples;  // first few violations
  json to_json() const;
};

struct TheoremMainReport {
  std::vector<ClauseReport> clauses;
  bool all_pass() const;
  json to_json() const;
};

/// Exhaustive verification of the modified-distance properties (A)-(H) at
/// params.theta, with measured slacks for the coarse clauses.
TheoremMainReport check_theorem_main(const ModifiedDistances& d, const CoreParams& params);

/// Doubles K from params.K until order_interval is consistent for every pair
/// at that threshold (and K stays >= theta). Returns the validated K.
double auto_select_K(const ModifiedDistances& d, const CoreParams& params,
                     int max_doublings = 40);

}  // namespace projcx
