#pragma once

#include <cstdint>

namespace schw {

/// 64-bit linear congruential generator with the documented constants
///   state <- state * 6364136223846793005 + 1442695040888963407
/// producing doubles from the top 53 bits.  Fixed here so that reports are
/// reproducible bit-for-bit across platforms and reimplementations.
class Lcg {
  public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {
        // One warm-up step so that small seeds do not produce near-zero
        // first draws.
        next();
    }

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

}  // namespace schw
