#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace ksv {

/// splitmix64 step: advances the state and returns the next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64.  Substreams are derived from
/// (seed, index) so independently sampled terms are scheduling-invariant.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed + 0x9E3779B97F4A7C15ull * (index + 1));
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via the polar method; one spare is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::complex<double> complex_gaussian() {
    double re = gaussian();
    double im = gaussian();
    return {re, im};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-random unit vector in C^dim.
inline std::vector<std::complex<double>> haar_state(int dim, Rng& rng) {
  std::vector<std::complex<double>> v(dim);
  double norm2 = 0.0;
  for (auto& z : v) {
    z = rng.complex_gaussian();
    norm2 += std::norm(z);
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : v) z *= inv;
  return v;
}

/// Haar-random unitary: modified Gram-Schmidt applied to a complex Gaussian
/// matrix.  Norm division keeps the triangular factor's diagonal real
/// positive, which makes the orthonormal factor exactly Haar.
inline std::vector<std::vector<std::complex<double>>> haar_unitary(int dim, Rng& rng) {
  std::vector<std::vector<std::complex<double>>> col(dim,
                                                     std::vector<std::complex<double>>(dim));
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) col[j][i] = rng.complex_gaussian();
    for (int k = 0; k < j; ++k) {
      std::complex<double> overlap = 0.0;
      for (int i = 0; i < dim; ++i) overlap += std::conj(col[k][i]) * col[j][i];
      for (int i = 0; i < dim; ++i) col[j][i] -= overlap * col[k][i];
    }
    double norm2 = 0.0;
    for (int i = 0; i < dim; ++i) norm2 += std::norm(col[j][i]);
    double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < dim; ++i) col[j][i] *= inv;
  }
  // Return in row-major form: U[i][j] = component i of column j.
  std::vector<std::vector<std::complex<double>>> u(dim,
                                                   std::vector<std::complex<double>>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) u[i][j] = col[j][i];
  return u;
}

}  // namespace ksv
