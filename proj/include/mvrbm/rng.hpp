#ifndef MVRBM_RNG_HPP
#define MVRBM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mvrbm {

// Seedable random stream with a fixed, platform-independent draw order.
//
// The engine is mt19937_64, whose output sequence is pinned by the standard.
// All derived draws are computed here rather than through std distributions
// (their algorithms are implementation-defined), so the same seed produces
// the same stream on every platform.
//
// Draw costs, for reasoning about reproducibility:
//   uniform()            one engine step
//   normal()             two uniform draws (Box-Muller, cosine branch)
//   index_below(n)       one uniform draw
//   shuffle(v)           size(v)-1 uniform draws, Fisher-Yates from the back
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n). n must be >= 1.
    std::size_t index_below(std::size_t n) {
        const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index_below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace mvrbm

#endif
