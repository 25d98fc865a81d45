#pragma once
/**
 * Seeded random streams.
 *
 * Every consumer derives its own stream from a root seed and a fixed text
 * label, so adding draws to one entity class never shifts another class.
 * The generator is xoshiro256** seeded through SplitMix64; streams are split
 * per ant and per probe, so construction has to be cheap. Conversions from
 * raw 64-bit words are done here rather than through <random> distributions,
 * whose output is implementation-defined.
 */

#include <cstdint>
#include <array>
#include <string_view>
#include <utility>
#include <vector>

namespace edgemkt {

/** SplitMix64 finalizer; used to decorrelate derived seeds. */
std::uint64_t mix64(std::uint64_t x);

/** FNV-1a hash of a label. */
std::uint64_t hash_label(std::string_view label);

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /** Independent child stream identified by a label. */
  Rng split(std::string_view label) const;
  /** Independent child stream identified by an index. */
  Rng split(std::uint64_t index) const;

  std::uint64_t next_u64();
  /** Uniform in [0, 1). */
  double uniform01();
  /** Uniform in [lo, hi]; returns lo when lo == hi. */
  double uniform(double lo, double hi);
  /** Uniform integer in [lo, hi], inclusive. */
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /** Standard normal via Box-Muller. */
  double normal(double mean = 0.0, double sd = 1.0);
  /** Index drawn proportionally to non-negative weights; -1 if all are zero. */
  int weighted_index(const std::vector<double>& weights);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace edgemkt
