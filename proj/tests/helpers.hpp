// Shared utilities for the test suite.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "latspec/lattice.hpp"

namespace test_helpers {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a,
                            const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Kronecker chain matching the library's node ordering: the factor for
// dimension 1 owns the fastest-varying (least-significant) digit, so the
// chain multiplies as B_D kron ... kron B_1.
template <typename Matrix>
inline Matrix kron_chain(const std::vector<Matrix>& factors) {
  Matrix out = factors.back();
  for (auto it = factors.rbegin() + 1; it != factors.rend(); ++it)
    out = kron(out, *it);
  return out;
}

inline Eigen::MatrixXd complete_adjacency(int m) {
  return Eigen::MatrixXd::Ones(m, m) - Eigen::MatrixXd::Identity(m, m);
}

// Closed-form spectrum expanded to a sorted list of N eigenvalues.
inline std::vector<double> expanded_spectrum(const latspec::LatticeSpec& spec) {
  std::vector<double> out;
  for (const auto& line : latspec::deterministic_spectrum(spec))
    for (long long k = 0; k < line.multiplicity; ++k)
      out.push_back(line.eigenvalue);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace test_helpers
