#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace coad {

/// Deterministic random generator used everywhere randomness is needed.
///
/// Wraps mt19937_64 but converts to doubles explicitly, so streams are
/// bit-identical across standard libraries (std::normal_distribution is
/// implementation-defined and must not be used for reproducible output).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

    /// Stream for replicate `rep` of a run seeded with `seed`. Streams for
    /// distinct (seed, rep) pairs are independent for practical purposes.
    static Rng for_replicate(std::uint64_t seed, std::uint64_t rep) {
        return Rng(mix(seed) ^ mix(rep + 0x51ce5e5e5ULL));
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (deterministic, spare value cached).
    double normal();

    /// Uniform integer in [lo, hi] inclusive, by rejection.
    int uniform_int(int lo, int hi);

    /// k distinct values from {0..n-1}, in random order (partial Fisher-Yates).
    std::vector<int> sample_without_replacement(int n, int k);

    /// In-place Fisher-Yates shuffle.
    void shuffle(std::vector<int>& v);

    /// splitmix64 finalizer; also used to derive sub-stream seeds.
    static std::uint64_t mix(std::uint64_t x);

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace coad
