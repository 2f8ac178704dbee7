#include "vmocap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vmocap {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

CounterRng::CounterRng(std::uint64_t seed, const SampleKey& key, RngStream stream) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ fnv1a64(key.clip_id));
  k = splitmix64(k ^ key.frame);
  k = splitmix64(k ^ fnv1a64(key.camera_id));
  key_ = splitmix64(k ^ static_cast<std::uint64_t>(stream));
}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ + kGolden * ++counter_); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return std::min(hi, lo + uniform() * (hi - lo));
}

double CounterRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool CounterRng::bernoulli(double p) { return uniform() < p; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

}  // namespace vmocap
