#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace vmocap {

// Identity of one generated datum; the unit of RNG keying and of output files.
struct SampleKey {
  std::string clip_id;
  std::uint64_t frame = 0;
  std::string camera_id;

  bool operator==(const SampleKey&) const = default;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);

// Independent sub-streams drawn for one sample.
enum class RngStream : std::uint64_t { Augmentation = 1, Photometric = 2, Background = 3 };

// Counter-based generator: draw i is a pure function of (key, i), so results
// do not depend on which thread evaluates a sample or in what order. Normal
// deviates use Box-Muller rather than std::normal_distribution, whose output
// differs between standard library implementations.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, const SampleKey& key, RngStream stream);
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  bool bernoulli(double p);
  std::uint64_t below(std::uint64_t n);  // uniform on [0, n), n > 0

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace vmocap
