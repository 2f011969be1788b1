// Stieltjes-transform evaluation on grids and inversion to density/CDF.
//
// The deterministic-equivalent density is recovered through the inversion
// formula f(x) = lim_{eps -> 0+} (1/pi) Im S(x + i eps), approximated at a
// fixed small eps; the distribution function is the cumulative trapezoid of
// f over the same grid, clamped to [0, 1].  The approximation error is
// quantified by the eps-consistency checks in the test suite rather than by
// extrapolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "latspec/canonical.hpp"
#include "latspec/errors.hpp"
#include "latspec/lattice.hpp"
#include "latspec/parallel.hpp"

namespace latspec {

class Grid {
public:
  Grid(double x_min, double x_max, long n_points, double epsilon)
      : x_min_(x_min), x_max_(x_max), n_points_(n_points), epsilon_(epsilon) {
    if (!(x_min < x_max))
      throw invalid_argument_error("grid needs x_min < x_max");
    if (n_points < 2)
      throw invalid_argument_error("grid needs at least 2 points");
    if (!(epsilon > 0.0))
      throw invalid_argument_error("grid offset epsilon must be positive");
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  long n_points() const { return n_points_; }
  double epsilon() const { return epsilon_; }
  double spacing() const { return (x_max_ - x_min_) / (n_points_ - 1); }
  double x(long k) const { return x_min_ + k * spacing(); }

  bool operator==(const Grid& other) const {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ &&
           n_points_ == other.n_points_ && epsilon_ == other.epsilon_;
  }

private:
  double x_min_;
  double x_max_;
  long n_points_;
  double epsilon_;
};

struct DensityCurve {
  DensityCurve(Grid g, std::vector<double> density, std::vector<double> cdf)
      : grid(std::move(g)), f(std::move(density)), F(std::move(cdf)) {}
  Grid grid;
  std::vector<double> f;  // density values per grid point
  std::vector<double> F;  // CDF values per grid point
};

struct DensityDiagnostics {
  long max_iterations = 0;    // worst single-point iteration count
  double max_residual = 0.0;  // worst fixed-point update at convergence
};

// Spectral support heuristic: expectation spectrum [p*Lambda_min/gamma, p]
// widened by five fluctuation scales sigma = sqrt(p(1-p)/gamma), then padded
// 10%.  A minimum half-width keeps the window well-posed when p is 0 or 1
// and all atoms coincide.
inline std::pair<double, double> default_support_window(const LatticeSpec& spec,
                                                        double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw invalid_argument_error("link probability must lie in [0, 1]");
  const double g = static_cast<double>(spec.gamma());
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  for (const auto& line : deterministic_spectrum(spec)) {
    lambda_min = std::min(lambda_min, line.eigenvalue);
    lambda_max = std::max(lambda_max, line.eigenvalue);
  }
  const double sigma = std::sqrt(p * (1.0 - p) / g);
  double lo = p * lambda_min / g - 5.0 * sigma;
  double hi = p * lambda_max / g + 5.0 * sigma;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double center = 0.5 * (lo + hi);
  const double min_half_width = 0.5;
  if (hi - lo < 2.0 * min_half_width) {
    lo = center - min_half_width;
    hi = center + min_half_width;
  }
  return {lo, hi};
}

// Evaluates the deterministic-equivalent density and CDF on a grid.  Grid
// points are independent scalar solves and may run concurrently; the
// cumulative integration pass is sequential, so output is identical for any
// thread count.
inline DensityCurve density_on_grid(const LatticeSpec& spec, double p,
                                    const Grid& grid,
                                    const SolverOptions& opts = {},
                                    int threads = 0,
                                    DensityDiagnostics* diag = nullptr) {
  const CanonicalSystem system(spec, p);
  const long n = grid.n_points();
  std::vector<double> f(n, 0.0);
  std::vector<long> iterations(n, 0);
  std::vector<double> residuals(n, 0.0);
  parallel_for_index(n, resolve_thread_count(threads), [&](long long k) {
    const double x = grid.x(static_cast<long>(k));
    SolveDiagnostics point_diag;
    std::complex<double> s;
    try {
      s = system.scalar_solve(EvaluationPoint({x, grid.epsilon()}), opts,
                              &point_diag);
    } catch (const convergence_error& e) {
      throw convergence_error("solver failed at x = " + std::to_string(x) +
                                  ": " + e.what(),
                              e.residual, e.iterations);
    }
    double density = s.imag() / M_PI;
    if (density < 0.0) {
      if (density < -1e-12)
        throw solution_class_error("negative density " +
                                   std::to_string(density) + " at x = " +
                                   std::to_string(x));
      density = 0.0;
    }
    f[k] = density;
    iterations[k] = point_diag.iterations;
    residuals[k] = point_diag.residual;
  });
  std::vector<double> cdf(n, 0.0);
  const double h = grid.spacing();
  double acc = 0.0;
  for (long k = 1; k < n; ++k) {
    acc += 0.5 * h * (f[k - 1] + f[k]);
    cdf[k] = std::clamp(acc, 0.0, 1.0);
  }
  if (diag) {
    diag->max_iterations = *std::max_element(iterations.begin(), iterations.end());
    diag->max_residual = *std::max_element(residuals.begin(), residuals.end());
  }
  return DensityCurve(grid, std::move(f), std::move(cdf));
}

// Stieltjes transform of an atomic measure with mass 1/N at each eigenvalue.
inline std::complex<double> empirical_stieltjes(
    const std::vector<double>& eigenvalues, std::complex<double> z) {
  if (z.imag() == 0.0)
    throw invalid_argument_error("evaluation point must lie off the real axis");
  if (eigenvalues.empty())
    throw invalid_argument_error("empty eigenvalue list");
  std::complex<double> acc(0.0, 0.0);
  for (double lambda : eigenvalues) acc += 1.0 / (lambda - z);
  return acc / static_cast<double>(eigenvalues.size());
}

// Linear interpolation of the CDF, clamped to the boundary values outside
// the grid.
inline double cdf_value(const DensityCurve& curve, double x) {
  const Grid& grid = curve.grid;
  if (x <= grid.x_min()) return curve.F.front();
  if (x >= grid.x_max()) return curve.F.back();
  const double t = (x - grid.x_min()) / grid.spacing();
  const long k = std::min(static_cast<long>(t), grid.n_points() - 2);
  const double frac = t - k;
  return curve.F[k] + frac * (curve.F[k + 1] - curve.F[k]);
}

}  // namespace latspec
