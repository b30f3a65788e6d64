#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace greenedge {

/// Deterministic random stream, splittable by name.
///
/// Every consumer draws from its own named stream derived from the run seed,
/// so adding draws in one component never shifts the sequence seen by
/// another. All primitives consume a fixed number of engine words per call
/// (uniform: 1, normal: 2, categorical: 1); the per-slot draw order is part
/// of the trace reproducibility contract.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::string_view stream);

  /// Uniform double in [0, 1).
  double uniform();

  /// Normal deviate via Box-Muller. No caching, exactly two words.
  double normal(double mean, double stddev);

  /// Index sampled from a finite distribution; one word. Residual mass
  /// from imperfect normalization falls on the last index.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace greenedge
