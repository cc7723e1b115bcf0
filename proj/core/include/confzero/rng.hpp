#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace confzero {

// Deterministic RNG used for all sampling. mt19937_64 is fully specified by
// the standard and the double conversions below avoid distribution objects,
// so identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64; passes through zero-seed degeneracies of raw LCGs
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  // standard normal via Box-Muller
  double gauss() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd gauss_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss();
    return v;
  }

  // child generator with decorrelated stream, for per-task seeding
  Rng fork(std::uint64_t salt) {
    return Rng(next_u64() ^ (salt * 0xd1342543de82ef95ULL + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace confzero
