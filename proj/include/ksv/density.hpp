#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "ksv/linalg.hpp"
#include "ksv/operator.hpp"

namespace ksv {

/// Validated quantum state: Hermitian, unit trace, positive semidefinite.
/// Construct through validate_density.
class DensityMatrix {
 public:
  const Operator& op() const { return rho_; }
  int dim() const { return rho_.dim(); }

  friend DensityMatrix validate_density(const Operator&, double);

 private:
  explicit DensityMatrix(Operator rho) : rho_(std::move(rho)) {}
  Operator rho_;
};

/// Accepts iff the matrix is Hermitian within eps, has trace within eps of 1,
/// and smallest eigenvalue >= -eps.  Exact matrices must additionally certify
/// positivity exactly (principal minors) and have trace exactly 1.
inline DensityMatrix validate_density(const Operator& m, double eps = 1e-9) {
  std::string violated;
  auto note = [&violated](const char* what) {
    if (!violated.empty()) violated += ", ";
    violated += what;
  };

  bool exact = m.is_exact();
  bool hermitian = m.is_hermitian(eps);
  if (!hermitian) note("hermiticity");

  Scalar tr = m.trace();
  if (exact ? !(tr == Scalar(1)) : !approx_equal(tr, Scalar(1), eps)) note("trace");

  if (hermitian) {
    double min_ev = hermitian_eigenvalues(m).front();
    if (min_ev < -eps) note("positivity");
    else if (exact && !exact_psd(m)) note("positivity");
  }

  if (!violated.empty()) throw NotAStateError("not a density matrix: " + violated);
  return DensityMatrix(m);
}

/// trace(rho * op); real up to eps, exact when both sides are exact.
inline Scalar expectation(const Operator& op, const DensityMatrix& rho,
                          double eps = 1e-9) {
  if (op.dim() != rho.dim())
    throw DimensionMismatchError("expectation of operator with mismatched state dimension");
  if (!op.is_hermitian(eps)) throw NotHermitianError("expectation of non-Hermitian operator");
  return (rho.op() * op).trace();
}

/// Maximally mixed state I/d.
inline DensityMatrix maximally_mixed(int dim) {
  Operator m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = Scalar(Rational(1, dim));
  return validate_density(m);
}

/// Pure state |r><r|/<r|r> from a ray.
inline DensityMatrix pure_state(const Ray& r, double eps = 1e-9) {
  return validate_density(projector(r), eps);
}

/// Pure state from complex amplitudes; normalizes, so any nonzero vector works.
inline DensityMatrix pure_state(const std::vector<std::complex<double>>& amplitudes,
                                double eps = 1e-9) {
  int dim = static_cast<int>(amplitudes.size());
  double norm2 = 0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (norm2 <= 0) throw ZeroVectorError("state amplitudes are all zero");
  Operator m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      std::complex<double> entry = amplitudes[i] * std::conj(amplitudes[j]) / norm2;
      m.at(i, j) = Scalar::floating(entry.real(), entry.imag());
    }
  return validate_density(m, eps);
}

}  // namespace ksv
