#pragma once

#include <cmath>
#include <cstdint>

namespace fairexpo {

// Mixes a 64-bit value through the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a stream tag. Children with
// distinct tags are independent, and a child's value never depends on how
// many numbers the parent stream has produced.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// Counter-based generator: a fixed key plus an incrementing counter fed
// through the splitmix64 finalizer. Splitting derives an independent child
// stream from the key alone, so adding a new consumer never perturbs the
// numbers an existing consumer sees.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Knuth's product method; for large means the draw is split so the running
  // product stays away from underflow.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 60.0) return poisson(mean / 2) + poisson(mean / 2);
    const double limit = std::exp(-mean);
    int count = -1;
    double product = 1.0;
    do {
      ++count;
      product *= next_double();
    } while (product > limit);
    return count;
  }

  SplitRng split(std::uint64_t tag) const { return SplitRng(derive_seed(key_, tag)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fairexpo
