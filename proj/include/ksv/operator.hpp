#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ksv/errors.hpp"
#include "ksv/ray.hpp"
#include "ksv/scalar.hpp"

namespace ksv {

/// Dense square matrix of Scalars; the carrier for projectors, dichotomic
/// observables and density matrices at d <= 8.
class Operator {
 public:
  explicit Operator(int dim) : dim_(check_dim(dim)), e_(dim * dim, Scalar(0)) {}

  static Operator identity(int dim) {
    Operator op(dim);
    for (int i = 0; i < dim; ++i) op.at(i, i) = Scalar(1);
    return op;
  }

  int dim() const { return dim_; }
  Scalar& at(int r, int c) { return e_[r * dim_ + c]; }
  const Scalar& at(int r, int c) const { return e_[r * dim_ + c]; }

  bool is_exact() const {
    for (const auto& s : e_)
      if (!s.is_exact()) return false;
    return true;
  }

  Operator adjoint() const {
    Operator op(dim_);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) op.at(r, c) = at(c, r).conj();
    return op;
  }

  Scalar trace() const {
    Scalar t(0);
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
  }

  bool is_hermitian(double eps = 1e-9) const {
    for (int r = 0; r < dim_; ++r)
      for (int c = r; c < dim_; ++c) {
        const Scalar& a = at(r, c);
        const Scalar& b = at(c, r);
        if (a.is_exact() && b.is_exact()) {
          if (a != b.conj()) return false;  // exact entries are real
        } else if (!approx_equal(a, b.conj(), eps)) {
          return false;
        }
      }
    return true;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    a.require_same_dim(b);
    Operator r(a.dim_);
    for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
    return r;
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    a.require_same_dim(b);
    Operator r(a.dim_);
    for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
    return r;
  }
  friend Operator operator*(const Scalar& s, const Operator& a) {
    Operator r(a.dim_);
    for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = s * a.e_[i];
    return r;
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same_dim(b);
    Operator r(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int k = 0; k < a.dim_; ++k) {
        const Scalar& aik = a.at(i, k);
        if (aik.is_zero()) continue;
        for (int j = 0; j < a.dim_; ++j) r.at(i, j) += aik * b.at(k, j);
      }
    return r;
  }
  Operator& operator+=(const Operator& b) { return *this = *this + b; }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.dim_ == b.dim_ && a.e_ == b.e_;
  }

  bool approx(const Operator& b, double eps) const {
    if (dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (!approx_equal(e_[i], b.e_[i], eps)) return false;
    return true;
  }

 private:
  static int check_dim(int dim) {
    if (dim < 1 || dim > kMaxDimension)
      throw TooLargeError("operator dimension " + std::to_string(dim) +
                          " outside supported range 1.." + std::to_string(kMaxDimension));
    return dim;
  }
  void require_same_dim(const Operator& b) const {
    if (dim_ != b.dim_)
      throw DimensionMismatchError("operator dimensions " + std::to_string(dim_) +
                                   " and " + std::to_string(b.dim_) + " differ");
  }

  int dim_;
  std::vector<Scalar> e_;
};

/// Rank-1 projector |r><r| / <r|r>.  Exact for exact rays.
inline Operator projector(const Ray& r) {
  Operator p(r.dim);
  Scalar n2 = norm2(r);
  for (int i = 0; i < r.dim; ++i)
    for (int j = 0; j < r.dim; ++j) p.at(i, j) = r.comps[i] * r.comps[j].conj() / n2;
  return p;
}

/// Dichotomic observable I - 2|r><r|/<r|r>: eigenvalue -1 on the ray,
/// +1 on its orthocomplement.
inline Operator observable(const Ray& r) {
  return Operator::identity(r.dim) - (Scalar(2) * projector(r));
}

inline Operator sum_of_projectors(const std::vector<Ray>& rays) {
  if (rays.empty()) throw DimensionMismatchError("sum_of_projectors of empty ray list");
  Operator acc(rays.front().dim);
  for (const auto& r : rays) {
    if (r.dim != acc.dim())
      throw DimensionMismatchError("sum_of_projectors over mixed dimensions");
    acc += projector(r);
  }
  return acc;
}

/// True when [a, b] = 0: exactly on the exact backend, Frobenius norm of the
/// commutator <= eps otherwise.
inline bool commutes(const Operator& a, const Operator& b, double eps = 1e-9) {
  Operator comm = a * b - b * a;
  if (comm.is_exact()) {
    for (int r = 0; r < comm.dim(); ++r)
      for (int c = 0; c < comm.dim(); ++c)
        if (!comm.at(r, c).is_zero()) return false;
    return true;
  }
  double fro2 = 0.0;
  for (int r = 0; r < comm.dim(); ++r)
    for (int c = 0; c < comm.dim(); ++c) fro2 += comm.at(r, c).abs2().real();
  return std::sqrt(fro2) <= eps;
}

/// Returns c when op == c*I (exactly on the exact backend, entrywise within
/// eps otherwise); empty when op is not a multiple of the identity.
inline std::optional<Scalar> identity_multiple(const Operator& op, double eps = 1e-9) {
  const Scalar& c = op.at(0, 0);
  bool exact = op.is_exact();
  for (int r = 0; r < op.dim(); ++r)
    for (int col = 0; col < op.dim(); ++col) {
      const Scalar want = (r == col) ? c : Scalar(0);
      if (exact ? !(op.at(r, col) == want) : !approx_equal(op.at(r, col), want, eps))
        return std::nullopt;
    }
  return c;
}

}  // namespace ksv
