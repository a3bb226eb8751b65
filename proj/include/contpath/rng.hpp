#ifndef CONTPATH_RNG_HPP
#define CONTPATH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace contpath {

// Pinned random generator used for all synthetic data. The engine is
// std::mt19937_64 (algorithm fixed by the C++ standard); every transform on
// top of it is spelled out here so the stream can be reproduced elsewhere:
//
//   uniform01:  (next_u64() >> 11) * 2^-53, in [0, 1)
//   normal:     Marsaglia polar method, pairs drawn as
//               u = 2*uniform01() - 1, v = 2*uniform01() - 1, reject s = u^2+v^2
//               outside (0, 1); returns u*m then caches v*m, m = sqrt(-2 ln(s)/s)
//   laplace:    inverse CDF, x = -scale * sign(u - 1/2) * ln(1 - 2|u - 1/2|)
//   below(m):   next_u64() % m
//
// One Rng instance is one continuous stream; the cached normal spare is part
// of the stream state.
class rng {
 public:
  explicit rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double laplace(double scale) {
    const double u = uniform01() - 0.5;
    return -scale * (u < 0.0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
  }

  std::uint64_t below(std::uint64_t m) { return next_u64() % m; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace contpath

#endif  // CONTPATH_RNG_HPP
