#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qcl {

// SplitMix64 finalizer. Used to derive independent stream seeds from a root
// seed and a path of integer ids (experiment / model / run / purpose), so that
// every unit of work owns its own generator and thread scheduling can never
// perturb the random sequence seen by any given run.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t root, std::uint64_t i0 = 0,
                                   std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
  std::uint64_t h = mix64(root);
  h = mix64(h ^ (i0 + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (i1 + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (i2 + 0x94d049bb133111ebULL));
  return h;
}

// Deterministic random stream. mt19937_64 has a fully specified sequence, and
// the uniform/gaussian transforms below avoid the implementation-defined
// std::*_distribution classes, so identical seeds give identical doubles.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; keeps the spare value
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // i.i.d. uniform [-1,1] per component
  std::vector<double> uniform_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(-1.0, 1.0);
    return v;
  }

  // uniform direction on the unit sphere of R^n
  std::vector<double> sphere_vector(std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    do {
      s = 0.0;
      for (auto& x : v) {
        x = gauss();
        s += x * x;
      }
    } while (s == 0.0);
    const double inv = 1.0 / std::sqrt(s);
    for (auto& x : v) x *= inv;
    return v;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qcl
