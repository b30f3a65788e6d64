#include "greenedge/rng.hpp"

#include <cmath>
#include <numbers>

namespace greenedge {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed, std::string_view stream)
    : engine_(splitmix64(seed ^ fnv1a64(stream))) {}

double SplitRng::uniform() {
  // 53 high bits -> [0, 1) with one engine word.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SplitRng::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SplitRng::categorical(std::span<const double> probs) {
  const double u = uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace greenedge
