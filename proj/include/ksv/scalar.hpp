#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "ksv/errors.hpp"
#include "ksv/rational.hpp"

namespace ksv {

/// Scalar with two backends: exact rational or complex double.
///
/// Arithmetic between two exact values stays exact; as soon as a float value
/// enters, the result is complex-float.  Exact values are real (the rational
/// pipeline covers every claim of the canonical ray set); complex entries
/// only appear on the float backend.
class Scalar {
 public:
  Scalar() : exact_(true), rat_(0) {}
  Scalar(std::int64_t n) : exact_(true), rat_(n) {}
  Scalar(int n) : exact_(true), rat_(n) {}
  Scalar(const Rational& r) : exact_(true), rat_(r) {}
  Scalar(std::complex<double> z) : exact_(false), flt_(z) {}

  static Scalar floating(double re, double im = 0.0) {
    return Scalar(std::complex<double>(re, im));
  }

  bool is_exact() const { return exact_; }

  const Rational& rat() const {
    if (!exact_) throw Error(ErrorKind::input, "scalar is not exact");
    return rat_;
  }

  std::complex<double> to_complex() const {
    return exact_ ? std::complex<double>(rat_.to_double(), 0.0) : flt_;
  }
  double real() const { return exact_ ? rat_.to_double() : flt_.real(); }
  double imag() const { return exact_ ? 0.0 : flt_.imag(); }

  bool is_zero() const { return exact_ ? rat_.is_zero() : flt_ == 0.0; }

  Scalar conj() const {
    return exact_ ? *this : Scalar(std::conj(flt_));
  }

  /// |x|^2; exact on the exact backend.
  Scalar abs2() const {
    return exact_ ? Scalar(rat_ * rat_) : Scalar::floating(std::norm(flt_));
  }

  friend Scalar operator-(const Scalar& a) {
    return a.exact_ ? Scalar(-a.rat_) : Scalar(-a.flt_);
  }
  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.rat_ + b.rat_);
    return Scalar(a.to_complex() + b.to_complex());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.rat_ - b.rat_);
    return Scalar(a.to_complex() - b.to_complex());
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.rat_ * b.rat_);
    return Scalar(a.to_complex() * b.to_complex());
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.rat_ / b.rat_);
    return Scalar(a.to_complex() / b.to_complex());
  }
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

  /// Exact data comparison on matching backends; mixed backends compare the
  /// complex promotions bit-for-bit.  Use approx_equal for tolerant checks.
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.rat_ == b.rat_;
    return a.to_complex() == b.to_complex();
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  std::string to_string() const {
    if (exact_) return rat_.to_string();
    std::string s = std::to_string(flt_.real());
    if (flt_.imag() != 0.0) s += (flt_.imag() < 0 ? "" : "+") + std::to_string(flt_.imag()) + "i";
    return s;
  }

 private:
  bool exact_;
  Rational rat_;
  std::complex<double> flt_{};
};

inline bool approx_equal(const Scalar& a, const Scalar& b, double eps) {
  return std::abs(a.to_complex() - b.to_complex()) <= eps;
}

}  // namespace ksv
