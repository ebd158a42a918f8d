#pragma once

#include <cmath>
#include <cstdint>

#include "vpp/types.hpp"

namespace vpp {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator: the n-th output is a pure function of (seed, stream, n),
// so per-sample streams are reproducible regardless of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(detail::mix64(detail::mix64(seed) ^ stream)) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + counter_++ * 0x9e3779b97f4a7c15ull); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  // circularly-symmetric complex Gaussian, unit variance
  cplx cgauss() { return cplx(gauss() * M_SQRT1_2, gauss() * M_SQRT1_2); }

  // one complex symbol uniform on CUBE, i.e. re/im on [-0.5, 0.5)
  cplx cube_symbol() { return cplx(uniform() - 0.5, uniform() - 0.5); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline CVector random_cube_point(int k, Rng& rng) {
  CVector a(k);
  for (int i = 0; i < k; ++i) a(i) = rng.cube_symbol();
  return a;
}

// i.i.d. CN(0,1) Rayleigh channel, K x N_T
inline CMatrix gen_channel(int k, int n_t, Rng& rng) {
  CMatrix h(k, n_t);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < n_t; ++c) h(r, c) = rng.cgauss();
  return h;
}

}  // namespace vpp
