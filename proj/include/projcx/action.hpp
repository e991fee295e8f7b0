#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projcx/complex.hpp"
#include "projcx/core.hpp"
#include "projcx/system.hpp"

namespace projcx {

/// Reduced word over the generator alphabet (a..z, inverses A..Z) together
/// with its matrix.
struct GroupElement {
  std::string word;  // reduced
  MoebiusMap matrix;
};

std::string reduce_word(std::string w);
std::string word_power(const std::string& w, int k);  // reduced w^k (k may be negative)

/// Window-aware action of group elements on an enumerated instance.
class ActionContext {
 public:
  explicit ActionContext(const SchottkyInstance& inst);

  const SchottkyInstance& instance() const { return *inst_; }
  GroupElement element(const std::string& word) const;

  /// g(Y) as a vertex of the window, or nullopt when the translate left it.
  std::optional<Vertex> apply(const GroupElement& g, Vertex y) const;

  /// All reduced words of length <= radius (including the empty word).
  std::vector<std::string> word_ball(int radius) const;

 private:
  const SchottkyInstance* inst_;
  std::size_t letter_count_;
};

struct EquivarianceReport {
  double max_defect = 0;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // images left the window
  bool pass = true;         // max defect <= 1e-6
  std::uint64_t seed = 0;
  json to_json() const;
};
EquivarianceReport check_equivariance(const ActionContext& ctx, std::size_t sample_count,
                                      std::uint64_t seed);

struct TranslationCurve {
  std::string word;
  Vertex basepoint = 0;
  std::vector<unsigned> distances;  // d(Y, g^k Y), k = 1..
  double tau_hat = 0;               // last distance / k
  bool truncated = false;           // a power left the window
  bool hypothesis_witnessed = false;  // d_Y(g^-N Y, g^N Y) > K' for some N
  bool positive = false;              // all measured distances > 0
  std::string to_csv() const;
};

/// Distances d(Y, g^k Y) for k <= k_max from a basepoint the element moves.
/// The element fixes its own axis vertex when that translate is enumerated,
/// so the basepoint is the first vertex g does not fix.
TranslationCurve translation_length_estimate(const ActionContext& ctx,
                                             const ModifiedDistances& d,
                                             const CoreParams& params,
                                             const ProjectionComplex& complex,
                                             const GroupElement& g, int k_max);

struct CombinatorialAxis {
  std::string word;
  double threshold = 0;
  std::vector<Vertex> elements;  // ordered chain
  bool order_consistent = true;
  bool betweenness_ok = true;   // interior elements are K-large for their flanks
  bool shift_ok = true;         // g shifts positions by a constant amount
  int shift = 0;
  std::size_t invariance_skips = 0;  // g-images whose witnesses left the window
  json to_json() const;
};

/// { Y : d_Y(g^-N Y, g^N Y) > threshold for some N <= max_power }, ordered as
/// a chain; empty result is legal.
CombinatorialAxis combinatorial_axis(const ActionContext& ctx, const ModifiedDistances& d,
                                     const CoreParams& params, const GroupElement& g,
                                     double threshold, int max_power);

struct WpdProbe {
  std::string word;
  double D = 0;
  int M = 0;
  int word_radius = 0;
  std::size_t count = 0;   // elements moving both marked orbit points <= D
  std::size_t skipped = 0; // elements with out-of-window translates
  std::size_t ball = 0;    // total words examined
  json to_json() const;
};
WpdProbe wpd_probe(const ActionContext& ctx, const ModifiedDistances& d,
                   const ProjectionComplex& complex, const GroupElement& g, double D, int M,
                   int word_radius);

}  // namespace projcx
