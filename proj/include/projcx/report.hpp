#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace projcx {

using json = nlohmann::ordered_json;

/// splitmix64: tiny deterministic PRNG, stable across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(const std::string& data);

/// Writes `j` to `path` with a trailing newline; creates parent directories.
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace projcx
