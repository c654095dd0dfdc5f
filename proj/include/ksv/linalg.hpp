#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "ksv/operator.hpp"
#include "ksv/rational.hpp"

namespace ksv {

inline Eigen::MatrixXcd to_eigen(const Operator& op) {
  Eigen::MatrixXcd m(op.dim(), op.dim());
  for (int r = 0; r < op.dim(); ++r)
    for (int c = 0; c < op.dim(); ++c) m(r, c) = op.at(r, c).to_complex();
  return m;
}

/// Eigenvalues of a Hermitian operator, ascending, at float precision.
inline std::vector<double> hermitian_eigenvalues(const Operator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(op),
                                                         Eigen::EigenvaluesOnly);
  std::vector<double> ev(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + op.dim());
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Exact determinant of a rational matrix given as row-major entries.
inline Rational exact_determinant(std::vector<Rational> m, int n) {
  Rational det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!m[r * n + col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) return Rational(0);
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      det = -det;
    }
    Rational p = m[col * n + col];
    det = det * p;
    for (int r = col + 1; r < n; ++r) {
      Rational factor = m[r * n + col] / p;
      if (factor.is_zero()) continue;
      for (int c = col; c < n; ++c)
        m[r * n + c] = m[r * n + c] - factor * m[col * n + c];
    }
  }
  return det;
}

/// Exact positive-semidefiniteness certificate for a symmetric rational
/// matrix: every principal minor (all nonempty index subsets, not just the
/// leading ones, which do not suffice for semidefiniteness) is >= 0.
inline bool exact_psd(const Operator& op) {
  int n = op.dim();
  for (unsigned subset = 1; subset < (1u << n); ++subset) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (subset & (1u << i)) idx.push_back(i);
    int k = static_cast<int>(idx.size());
    std::vector<Rational> sub(k * k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub[r * k + c] = op.at(idx[r], idx[c]).rat();
    if (exact_determinant(std::move(sub), k) < Rational(0)) return false;
  }
  return true;
}

}  // namespace ksv
