// Reduced canonical system for the deterministic-equivalent Stieltjes
// transform of scaled percolation adjacencies.
//
// For a lattice with dimension sizes M_1..M_D and link probability p, the
// deterministic equivalent of the empirical spectral distribution of
// W = A/gamma has Stieltjes transform S(z) = alpha_{1,...,1}(z), where the
// 2^D coefficients alpha_i (i in {0,1}^D) solve the linear-plus-scalar system
//
//   sum_i alpha_i * prod_d ef(d, i_d, j_d)
//     = 1 / ( (p/gamma) * Lambda_j - z - (p(1-p)/gamma) * alpha_{1,...,1} )
//
// for every j in {0,1}^D, with the eigen-factor table
//   ef(d, 0, 0) = M_d - 1,   ef(d, 0, 1) = -1,   ef(d, 1, j_d) = 1,
// and Lambda_j the lattice eigenvalue for index j.  In matrix form this is
// X * alpha = g(alpha) with X the Kronecker product of the 2x2 factors
// [[M_d - 1, 1], [-1, 1]].
//
// Because the right side depends on alpha only through its last entry S,
// the system collapses to the scalar fixed point
//
//   S = (1/N) * sum_j mult_j / ( (p/gamma) * Lambda_j - z - c * S ),
//   c = p(1-p)/gamma,
//
// (multiply X*alpha = g by the multiplicity vector: only the all-ones column
// of X survives, with weight N).  The production path solves the scalar
// equation by damped fixed-point iteration and recovers alpha with a single
// linear solve; the reference path iterates alpha_{n+1} = X^{-1} g(alpha_n)
// directly.  Both enforce the admissibility condition Im(z) * Im(S) > 0 under
// which the solution is unique.
#pragma once

#include <Eigen/Dense>
#include <cfloat>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "latspec/errors.hpp"
#include "latspec/lattice.hpp"

namespace latspec {

struct EvaluationPoint {
  explicit EvaluationPoint(std::complex<double> value) : z(value) {
    if (value.imag() == 0.0)
      throw invalid_argument_error(
          "evaluation point must lie off the real axis");
  }
  std::complex<double> z;
};

// The 2^D coefficients, lexicographic in i with i_1 most significant;
// index (1,...,1) is the last entry.
struct CoefficientVector {
  std::vector<std::complex<double>> alpha;
};

struct SolverOptions {
  double tolerance = 1e-12;
  long max_iterations = 10000;
  double damping = 1.0;  // starting step size, halved adaptively, floor 1/64
};

struct SolveDiagnostics {
  long iterations = 0;
  double residual = 0.0;
};

// Eigen-factor table entry; dim_index is the 0-based position in dims.
inline double eigen_factor(const LatticeSpec& spec, int dim_index, int i_bit,
                           int j_bit) {
  if (dim_index < 0 || dim_index >= spec.dimension_count())
    throw invalid_argument_error("dimension index out of range");
  if ((i_bit != 0 && i_bit != 1) || (j_bit != 0 && j_bit != 1))
    throw invalid_argument_error("eigen-factor bits must be 0 or 1");
  if (i_bit == 1) return 1.0;
  return j_bit == 0 ? spec.dims()[dim_index] - 1.0 : -1.0;
}

// Eigenspace dimensions per j index, in the shared lexicographic order.
inline std::vector<long long> multiplicities(const LatticeSpec& spec) {
  std::vector<long long> out;
  const auto lines = deterministic_spectrum(spec);
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(line.multiplicity);
  return out;
}

// X with rows indexed by j and columns by i (both lexicographic, first bit
// most significant); equals the Kronecker product of the per-dimension
// factors [[M_d - 1, 1], [-1, 1]].
inline Eigen::MatrixXd lhs_matrix(const LatticeSpec& spec) {
  const int d_count = spec.dimension_count();
  const long long m = 1LL << d_count;
  Eigen::MatrixXd x(m, m);
  for (long long j = 0; j < m; ++j)
    for (long long i = 0; i < m; ++i) {
      double v = 1.0;
      for (int d = 0; d < d_count; ++d) {
        const int i_bit = static_cast<int>((i >> (d_count - 1 - d)) & 1);
        const int j_bit = static_cast<int>((j >> (d_count - 1 - d)) & 1);
        v *= eigen_factor(spec, d, i_bit, j_bit);
      }
      x(j, i) = v;
    }
  return x;
}

inline std::complex<double> stieltjes_value(const CoefficientVector& alpha) {
  if (alpha.alpha.empty())
    throw invalid_argument_error("empty coefficient vector");
  return alpha.alpha.back();
}

// Caches the z-independent pieces of the system (X and its factorization,
// lattice eigenvalues and multiplicities) for repeated solves along a grid.
class CanonicalSystem {
public:
  CanonicalSystem(LatticeSpec spec, double p)
      : spec_(std::move(spec)), p_(p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw invalid_argument_error("link probability must lie in [0, 1]");
    x_ = lhs_matrix(spec_);
    lu_.compute(x_);
    const auto lines = deterministic_spectrum(spec_);
    lambda_.reserve(lines.size());
    mult_.reserve(lines.size());
    for (const auto& line : lines) {
      lambda_.push_back(line.eigenvalue);
      mult_.push_back(static_cast<double>(line.multiplicity));
    }
    n_ = static_cast<double>(spec_.node_count());
    g_ = static_cast<double>(spec_.gamma());
    c_ = p_ * (1.0 - p_) / g_;
  }

  const LatticeSpec& spec() const { return spec_; }
  double p() const { return p_; }
  const Eigen::MatrixXd& lhs() const { return x_; }
  double variance_scale() const { return c_; }  // c = p(1-p)/gamma

  // g(j) at a given value of the last coefficient.
  std::vector<std::complex<double>> rhs(std::complex<double> z,
                                        std::complex<double> alpha_last) const {
    std::vector<std::complex<double>> out(lambda_.size());
    for (std::size_t j = 0; j < lambda_.size(); ++j) {
      const std::complex<double> denom =
          (p_ / g_) * lambda_[j] - z - c_ * alpha_last;
      if (denom == std::complex<double>(0.0, 0.0))
        throw invalid_argument_error(
            "vanishing denominator in the canonical right side");
      out[j] = 1.0 / denom;
    }
    return out;
  }

  // Fixed-point map Phi(S) = (1/N) sum_j mult_j * g_j(S).
  std::complex<double> fixed_point_map(std::complex<double> z,
                                       std::complex<double> s) const {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < lambda_.size(); ++j)
      acc += mult_[j] / ((p_ / g_) * lambda_[j] - z - c_ * s);
    return acc / n_;
  }

  // Damped fixed-point iteration for the scalar self-consistent equation.
  std::complex<double> scalar_solve(EvaluationPoint point,
                                    const SolverOptions& opts,
                                    SolveDiagnostics* diag = nullptr) const {
    validate(opts);
    const std::complex<double> z = point.z;
    std::complex<double> s = -1.0 / z;  // the p = 0 solution; admissible
    double eta = opts.damping;
    double prev_delta = HUGE_VAL;
    long iterations = 0;
    double last_delta = HUGE_VAL;
    bool converged = false;
    while (iterations < opts.max_iterations) {
      ++iterations;
      const std::complex<double> phi = fixed_point_map(z, s);
      if (!std::isfinite(phi.real()) || !std::isfinite(phi.imag())) {
        eta = std::max(eta / 2.0, kMinDamping);
        continue;
      }
      const double delta = std::abs(phi - s);
      last_delta = delta;
      // Absolute tolerance with a stagnation floor: near the real axis |S|
      // can be large and the update cannot shrink below |S| * machine eps.
      const double tol_eff =
          std::max(opts.tolerance, 64.0 * DBL_EPSILON * std::abs(s));
      if (delta <= tol_eff) {
        s = phi;
        converged = true;
        break;
      }
      if (delta > prev_delta)
        eta = std::max(eta / 2.0, kMinDamping);
      else
        // Recover step size after transients so a brief overshoot early on
        // does not leave the tail of the iteration permanently slowed.
        eta = std::min(eta * kDampingGrowth, opts.damping);
      s += eta * (phi - s);
      prev_delta = delta;
    }
    if (diag) {
      diag->iterations = iterations;
      diag->residual = converged ? std::abs(fixed_point_map(z, s) - s)
                                 : last_delta;
    }
    if (!converged)
      throw convergence_error(
          "scalar fixed point did not converge within " +
              std::to_string(opts.max_iterations) + " iterations",
          last_delta, iterations);
    check_class(z, s);
    return s;
  }

  // One linear solve X alpha = g(alpha_last).
  CoefficientVector recover(std::complex<double> z,
                            std::complex<double> alpha_last) const {
    const auto g = rhs(z, alpha_last);
    Eigen::VectorXd re(g.size()), im(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      re[static_cast<long>(j)] = g[j].real();
      im[static_cast<long>(j)] = g[j].imag();
    }
    const Eigen::VectorXd sol_re = lu_.solve(re);
    const Eigen::VectorXd sol_im = lu_.solve(im);
    CoefficientVector alpha;
    alpha.alpha.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      alpha.alpha[i] = {sol_re[static_cast<long>(i)],
                        sol_im[static_cast<long>(i)]};
    return alpha;
  }

  // Max-norm residual of the full system at a candidate alpha.
  double residual_inf(std::complex<double> z,
                      const CoefficientVector& alpha) const {
    const auto g = rhs(z, alpha.alpha.back());
    double worst = 0.0;
    for (long j = 0; j < x_.rows(); ++j) {
      std::complex<double> row(0.0, 0.0);
      for (long i = 0; i < x_.cols(); ++i)
        row += x_(j, i) * alpha.alpha[static_cast<std::size_t>(i)];
      worst = std::max(worst, std::abs(row - g[static_cast<std::size_t>(j)]));
    }
    return worst;
  }

  // Production solver: scalar fixed point, then coefficient recovery,
  // tightening the scalar tolerance until the full-system residual meets
  // opts.tolerance (or the double-precision floor is reached).
  CoefficientVector solve(EvaluationPoint point, const SolverOptions& opts,
                          SolveDiagnostics* diag = nullptr) const {
    validate(opts);
    SolverOptions inner = opts;
    long total_iterations = 0;
    CoefficientVector alpha;
    double residual = HUGE_VAL;
    for (int round = 0; round < 4; ++round) {
      SolveDiagnostics scalar_diag;
      const std::complex<double> s = scalar_solve(point, inner, &scalar_diag);
      total_iterations += scalar_diag.iterations;
      alpha = recover(point.z, s);
      residual = residual_inf(point.z, alpha);
      if (residual <= opts.tolerance || residual <= residual_floor(alpha))
        break;
      inner.tolerance /= 100.0;
    }
    if (diag) {
      diag->iterations = total_iterations;
      diag->residual = residual;
    }
    if (residual > opts.tolerance && residual > residual_floor(alpha))
      throw convergence_error("coefficient recovery residual " +
                                  std::to_string(residual) +
                                  " above tolerance",
                              residual, total_iterations);
    check_class(point.z, alpha.alpha.back());
    return alpha;
  }

  // Reference solver: damped vector iteration alpha_{n+1} = X^{-1} g(alpha_n).
  CoefficientVector solve_iterative(EvaluationPoint point,
                                    const SolverOptions& opts,
                                    SolveDiagnostics* diag = nullptr) const {
    validate(opts);
    const std::complex<double> z = point.z;
    CoefficientVector alpha;
    alpha.alpha.assign(static_cast<std::size_t>(x_.rows()), {0.0, 0.0});
    alpha.alpha.back() = -1.0 / z;
    double eta = opts.damping;
    double prev_delta = HUGE_VAL;
    long iterations = 0;
    double residual = HUGE_VAL;
    bool converged = false;
    while (iterations < opts.max_iterations) {
      ++iterations;
      residual = residual_inf(z, alpha);
      if (residual <= opts.tolerance || residual <= residual_floor(alpha)) {
        converged = true;
        break;
      }
      const CoefficientVector next = recover(z, alpha.alpha.back());
      double delta = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < alpha.alpha.size(); ++i) {
        const std::complex<double> diff = next.alpha[i] - alpha.alpha[i];
        if (!std::isfinite(diff.real()) || !std::isfinite(diff.imag()))
          finite = false;
        delta = std::max(delta, std::abs(diff));
      }
      if (!finite) {
        eta = std::max(eta / 2.0, kMinDamping);
        continue;
      }
      if (delta > prev_delta)
        eta = std::max(eta / 2.0, kMinDamping);
      else
        eta = std::min(eta * kDampingGrowth, opts.damping);
      for (std::size_t i = 0; i < alpha.alpha.size(); ++i)
        alpha.alpha[i] += eta * (next.alpha[i] - alpha.alpha[i]);
      prev_delta = delta;
    }
    if (diag) {
      diag->iterations = iterations;
      diag->residual = residual;
    }
    if (!converged)
      throw convergence_error(
          "vector iteration did not converge within " +
              std::to_string(opts.max_iterations) + " iterations",
          residual, iterations);
    check_class(z, alpha.alpha.back());
    return alpha;
  }

private:
  static constexpr double kMinDamping = 1.0 / 64.0;
  // Growth applied per non-increasing step: 2^(1/8), so one halving takes
  // eight successes to undo (hysteresis keeps genuinely unstable points slow).
  static constexpr double kDampingGrowth = 1.0905077326652577;

  static void validate(const SolverOptions& opts) {
    if (!(opts.tolerance > 0.0))
      throw invalid_argument_error("solver tolerance must be positive");
    if (opts.max_iterations < 1)
      throw invalid_argument_error("max iterations must be at least 1");
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
      throw invalid_argument_error("damping must lie in (0, 1]");
  }

  static void check_class(std::complex<double> z, std::complex<double> s) {
    if (!(z.imag() * s.imag() > 0.0))
      throw solution_class_error(
          "converged value violates the admissibility condition "
          "Im(z) * Im(S) > 0");
  }

  // Smallest residual representable for this solution in double precision:
  // one backward-stable linear solve leaves ~ eps * ||X|| * ||alpha||.
  double residual_floor(const CoefficientVector& alpha) const {
    double alpha_norm = 0.0;
    for (const auto& a : alpha.alpha)
      alpha_norm = std::max(alpha_norm, std::abs(a));
    return 64.0 * DBL_EPSILON * x_norm_inf() * std::max(1.0, alpha_norm);
  }

  double x_norm_inf() const {
    // max row sum of |X|; for this X it equals N (row j = 0).
    return n_;
  }

  LatticeSpec spec_;
  double p_;
  Eigen::MatrixXd x_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<double> lambda_;
  std::vector<double> mult_;
  double n_ = 0.0;
  double g_ = 0.0;
  double c_ = 0.0;
};

// Free-function forms of the solver entry points.

inline std::vector<std::complex<double>> rhs_map(const LatticeSpec& spec,
                                                 double p, EvaluationPoint z,
                                                 const CoefficientVector& alpha) {
  if (alpha.alpha.size() != (1ULL << spec.dimension_count()))
    throw invalid_argument_error("coefficient vector has wrong length");
  return CanonicalSystem(spec, p).rhs(z.z, alpha.alpha.back());
}

inline CoefficientVector solve_coefficients(const LatticeSpec& spec, double p,
                                            EvaluationPoint z,
                                            const SolverOptions& opts = {},
                                            SolveDiagnostics* diag = nullptr) {
  return CanonicalSystem(spec, p).solve(z, opts, diag);
}

inline CoefficientVector solve_coefficients_iterative(
    const LatticeSpec& spec, double p, EvaluationPoint z,
    const SolverOptions& opts = {}, SolveDiagnostics* diag = nullptr) {
  return CanonicalSystem(spec, p).solve_iterative(z, opts, diag);
}

inline std::complex<double> scalar_self_consistent(
    const LatticeSpec& spec, double p, EvaluationPoint z,
    const SolverOptions& opts = {}, SolveDiagnostics* diag = nullptr) {
  return CanonicalSystem(spec, p).scalar_solve(z, opts, diag);
}

}  // namespace latspec
