#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ksv/errors.hpp"
#include "ksv/scalar.hpp"

namespace ksv {

inline constexpr int kMaxDimension = 8;

/// A projective ray: the canonical representative of v ~ lambda*v.
///
/// Exact rays canonicalize to a coprime integer vector whose component sum is
/// positive (first nonzero component positive when the sum is zero), so ray
/// equality is plain data comparison and the canonical 13-ray set keeps the
/// textbook components.  Float rays canonicalize to unit norm with the first
/// nonzero component rotated real positive.
struct Ray {
  std::string label;
  int dim = 0;
  std::vector<Scalar> comps;
  bool exact = true;

  friend bool operator==(const Ray& a, const Ray& b) {
    return a.dim == b.dim && a.exact == b.exact && a.comps == b.comps;
  }
};

namespace detail {

inline Ray canonicalize_exact(std::vector<Rational> v, int dim, std::string label) {
  // Clear denominators, then divide by the gcd of the integer components.
  Rational scale(1);
  for (const auto& c : v) scale = scale * Rational(c.den());
  std::int64_t g = 0;
  std::vector<std::int64_t> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational n = v[i] * scale;
    ints[i] = n.num();  // den == 1 by construction
    g = std::gcd(g, ints[i] < 0 ? -ints[i] : ints[i]);
  }
  for (auto& n : ints) n /= g;

  __int128 sum = 0;
  for (auto n : ints) sum += n;
  bool flip = sum < 0;
  if (sum == 0) {
    for (auto n : ints) {
      if (n != 0) {
        flip = n < 0;
        break;
      }
    }
  }
  Ray r;
  r.label = std::move(label);
  r.dim = dim;
  r.exact = true;
  r.comps.reserve(v.size());
  for (auto n : ints) r.comps.emplace_back(Rational(flip ? -n : n));
  return r;
}

inline Ray canonicalize_float(std::vector<std::complex<double>> v, int dim,
                              std::string label) {
  double norm2 = 0.0;
  for (auto z : v) norm2 += std::norm(z);
  double norm = std::sqrt(norm2);
  for (auto& z : v) z /= norm;
  for (auto z : v) {
    if (std::abs(z) > 1e-12) {
      std::complex<double> phase = z / std::abs(z);
      for (auto& w : v) w *= std::conj(phase);
      break;
    }
  }
  Ray r;
  r.label = std::move(label);
  r.dim = dim;
  r.exact = false;
  r.comps.reserve(v.size());
  for (auto z : v) r.comps.emplace_back(z);
  return r;
}

}  // namespace detail

/// Canonical projective representative; idempotent and scale-invariant.
/// Throws ZeroVectorError on the zero vector and DimensionMismatchError when
/// the component count disagrees with `dim`.
inline Ray canonicalize_ray(const std::vector<Scalar>& comps, int dim,
                            std::string label = "") {
  if (dim < 1 || dim > kMaxDimension)
    throw TooLargeError("dimension " + std::to_string(dim) + " outside supported range 1.." +
                        std::to_string(kMaxDimension));
  if (static_cast<int>(comps.size()) != dim)
    throw DimensionMismatchError("ray has " + std::to_string(comps.size()) +
                                 " components, expected " + std::to_string(dim));
  bool all_zero = true;
  bool all_exact = true;
  for (const auto& c : comps) {
    if (!c.is_zero()) all_zero = false;
    if (!c.is_exact()) all_exact = false;
  }
  if (all_zero) throw ZeroVectorError("ray components are all zero");

  if (all_exact) {
    std::vector<Rational> v;
    v.reserve(comps.size());
    for (const auto& c : comps) v.push_back(c.rat());
    return detail::canonicalize_exact(std::move(v), dim, std::move(label));
  }
  std::vector<std::complex<double>> v;
  v.reserve(comps.size());
  for (const auto& c : comps) v.push_back(c.to_complex());
  return detail::canonicalize_float(std::move(v), dim, std::move(label));
}

inline Ray canonicalize_ray(const std::vector<std::int64_t>& ints, int dim,
                            std::string label = "") {
  std::vector<Scalar> comps;
  comps.reserve(ints.size());
  for (auto n : ints) comps.emplace_back(n);
  return canonicalize_ray(comps, dim, std::move(label));
}

/// <a|b>, conjugate-linear in the first argument.  Exact when both rays are.
inline Scalar inner_product(const Ray& a, const Ray& b) {
  if (a.dim != b.dim)
    throw DimensionMismatchError("inner product of rays with dimensions " +
                                 std::to_string(a.dim) + " and " + std::to_string(b.dim));
  Scalar acc(0);
  for (int i = 0; i < a.dim; ++i) acc += a.comps[i].conj() * b.comps[i];
  return acc;
}

inline Scalar norm2(const Ray& r) { return inner_product(r, r); }

/// True when the two rays span the same projective direction:
/// |<a|b>|^2 >= (1 - eps) * |a|^2 |b|^2.  Exact rays compare exactly.
inline bool projectively_equal(const Ray& a, const Ray& b, double eps = 1e-9) {
  if (a.dim != b.dim) return false;
  if (a.exact && b.exact) return a.comps == b.comps;
  double overlap = std::norm(inner_product(a, b).to_complex());
  double n2 = norm2(a).real() * norm2(b).real();
  return overlap >= (1.0 - eps) * n2;
}

}  // namespace ksv
