// Empirical spectral distributions and comparison metrics.
//
// Covers the Monte-Carlo side of the pipeline: dense symmetric eigensolving,
// per-sample and trial-averaged empirical spectral distributions (ESDs),
// Kolmogorov and Levy distances between distribution functions on a shared
// grid, the normalized-adjacency comparison (Levy distance between the ESDs
// of p*sqrt(gamma)*Ahat and sqrt(gamma)*W from the same sample), and the
// graph-filter metrics (total variation of a signal, consensus convergence
// rate of a polynomial filter).
//
// Determinism: trial-averaged quantities accumulate per-trial results in
// trial-index order after the (possibly concurrent) per-trial computations
// finish, so output is bit-identical for any thread count.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "latspec/errors.hpp"
#include "latspec/lattice.hpp"
#include "latspec/parallel.hpp"
#include "latspec/percolation.hpp"
#include "latspec/rng.hpp"
#include "latspec/stieltjes.hpp"

namespace latspec {

struct SpectrumSample {
  std::vector<double> eigenvalues;  // ascending
  std::string descriptor;
  SampleSeed seed;
};

struct EmpiricalCDF {
  std::vector<double> x;
  std::vector<double> F;
  long trials = 1;
};

// Eigenvalues of a dense symmetric matrix, ascending.  Backed by Eigen's
// self-adjoint solver (Householder tridiagonalization + implicit-shift QL),
// with a shifted-SVD fallback for spectra so degenerate that the QL sweep
// exhausts its fixed iteration budget (e.g. complete-graph products with a
// handful of distinct eigenvalues among hundreds).
inline std::vector<double> eigenvalues_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw invalid_argument_error("matrix must be square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw invalid_argument_error("matrix is not symmetric (max deviation " +
                                 std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() == Eigen::Success) {
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
  }
  // Shift beyond the spectral radius (bounded by the max absolute row sum)
  // so the matrix is positive definite; its singular values are then exactly
  // the shifted eigenvalues, and divide-and-conquer SVD is backward stable.
  const double shift = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  Eigen::MatrixXd shifted = m;
  shifted.diagonal().array() += shift;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(shifted);
  if (svd.info() != Eigen::Success)
    throw convergence_error("symmetric eigenvalue solver failed", 0.0, 0);
  const Eigen::VectorXd& sv = svd.singularValues();  // descending
  std::vector<double> out(sv.size());
  for (long i = 0; i < sv.size(); ++i)
    out[static_cast<std::size_t>(i)] = sv[sv.size() - 1 - i] - shift;
  return out;
}

// Step ESD of sorted eigenvalues sampled on a grid: F[k] = #(ev <= x_k)/N.
inline EmpiricalCDF esd(const std::vector<double>& sorted_eigenvalues,
                        const std::vector<double>& grid_x) {
  if (sorted_eigenvalues.empty())
    throw invalid_argument_error("empty eigenvalue list");
  if (!std::is_sorted(sorted_eigenvalues.begin(), sorted_eigenvalues.end()))
    throw invalid_argument_error("eigenvalues must be sorted ascending");
  EmpiricalCDF out;
  out.x = grid_x;
  out.F.resize(grid_x.size());
  const double n = static_cast<double>(sorted_eigenvalues.size());
  for (std::size_t k = 0; k < grid_x.size(); ++k) {
    const auto it = std::upper_bound(sorted_eigenvalues.begin(),
                                     sorted_eigenvalues.end(), grid_x[k]);
    out.F[k] =
        static_cast<double>(it - sorted_eigenvalues.begin()) / n;
  }
  out.trials = 1;
  return out;
}

inline EmpiricalCDF esd(const SpectrumSample& sample,
                        const std::vector<double>& grid_x) {
  return esd(sample.eigenvalues, grid_x);
}

// Trial-averaged ESD of W = A/gamma over reproducible percolation samples.
// Optionally reports the number of zero-degree nodes in each trial.
inline EmpiricalCDF expected_esd(const PercolationModel& model, long trials,
                                 std::uint64_t master_seed,
                                 const std::vector<double>& grid_x,
                                 int threads = 0,
                                 std::vector<long long>* zero_degree_counts =
                                     nullptr) {
  if (trials < 1) throw invalid_argument_error("need at least one trial");
  if (grid_x.empty()) throw invalid_argument_error("empty grid");
  const int workers = resolve_thread_count(threads);
  const long block = 32;
  std::vector<double> sum(grid_x.size(), 0.0);
  std::vector<long long> zero_counts(trials, 0);
  std::vector<std::vector<double>> slots(
      std::min<long>(block, trials));
  for (long base = 0; base < trials; base += block) {
    const long count = std::min<long>(block, trials - base);
    parallel_for_index(count, workers, [&](long long b) {
      const long trial = base + static_cast<long>(b);
      const Eigen::MatrixXd a = sample_adjacency(
          model, SampleSeed{master_seed, static_cast<std::uint64_t>(trial)});
      long long isolated = 0;
      for (long long i = 0; i < a.rows(); ++i)
        if (a.row(i).sum() == 0.0) ++isolated;
      zero_counts[trial] = isolated;
      const auto evs =
          eigenvalues_symmetric(scaled_adjacency(a, model.lattice()));
      slots[b] = esd(evs, grid_x).F;
    });
    for (long b = 0; b < count; ++b)
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += slots[b][k];
  }
  EmpiricalCDF out;
  out.x = grid_x;
  out.F.resize(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k)
    out.F[k] = sum[k] / static_cast<double>(trials);
  out.trials = trials;
  if (zero_degree_counts) *zero_degree_counts = std::move(zero_counts);
  return out;
}

namespace detail {

inline void require_shared_grid(const std::vector<double>& xa,
                                const std::vector<double>& xb) {
  if (xa.size() != xb.size())
    throw grid_mismatch_error("grids differ in length (" +
                              std::to_string(xa.size()) + " vs " +
                              std::to_string(xb.size()) + ")");
  for (std::size_t k = 0; k < xa.size(); ++k) {
    const double scale = std::max({1.0, std::abs(xa[k]), std::abs(xb[k])});
    if (std::abs(xa[k] - xb[k]) > 1e-12 * scale)
      throw grid_mismatch_error("grids differ at point " + std::to_string(k));
  }
}

inline double ks_core(const std::vector<double>& fa,
                      const std::vector<double>& fb) {
  double worst = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k)
    worst = std::max(worst, std::abs(fa[k] - fb[k]));
  return worst;
}

// Piecewise-linear evaluation of F over grid x, extended by its boundary
// values outside the grid.
inline double interp(const std::vector<double>& x, const std::vector<double>& f,
                     double at) {
  if (at <= x.front()) return f.front();
  if (at >= x.back()) return f.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  const double span = x[k + 1] - x[k];
  const double frac = span > 0.0 ? (at - x[k]) / span : 0.0;
  return f[k] + frac * (f[k + 1] - f[k]);
}

inline double levy_core(const std::vector<double>& x,
                        const std::vector<double>& fa,
                        const std::vector<double>& fb) {
  const double h = (x.back() - x.front()) /
                   static_cast<double>(x.size() - 1);
  const auto admissible = [&](double e) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double lo = interp(x, fa, x[k] - e) - e;
      const double hi = interp(x, fa, x[k] + e) + e;
      if (fb[k] < lo - 1e-15 || fb[k] > hi + 1e-15) return false;
    }
    return true;
  };
  if (admissible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = ks_core(fa, fb) + h;
  while (!admissible(hi)) hi *= 2.0;  // interpolation slack; terminates fast
  while (hi - lo > 0.5 * h) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

// Kolmogorov (sup) distance between two distribution functions that share an
// evaluation grid.
inline double ks_distance(const EmpiricalCDF& a, const EmpiricalCDF& b) {
  detail::require_shared_grid(a.x, b.x);
  return detail::ks_core(a.F, b.F);
}

inline std::vector<double> grid_points(const Grid& grid) {
  std::vector<double> x(grid.n_points());
  for (long k = 0; k < grid.n_points(); ++k) x[k] = grid.x(k);
  return x;
}

inline double ks_distance(const DensityCurve& a, const EmpiricalCDF& b) {
  const auto xa = grid_points(a.grid);
  detail::require_shared_grid(xa, b.x);
  return detail::ks_core(a.F, b.F);
}

inline double ks_distance(const EmpiricalCDF& a, const DensityCurve& b) {
  return ks_distance(b, a);
}

// Levy distance: smallest e (to half a grid spacing) with
// F(x-e)-e <= G(x) <= F(x+e)+e at every grid point, F evaluated by linear
// interpolation.
inline double levy_distance(const EmpiricalCDF& a, const EmpiricalCDF& b) {
  detail::require_shared_grid(a.x, b.x);
  return detail::levy_core(a.x, a.F, b.F);
}

inline double levy_distance(const DensityCurve& a, const EmpiricalCDF& b) {
  const auto xa = grid_points(a.grid);
  detail::require_shared_grid(xa, b.x);
  return detail::levy_core(xa, a.F, b.F);
}

inline double levy_distance(const EmpiricalCDF& a, const DensityCurve& b) {
  const auto xb = grid_points(b.grid);
  detail::require_shared_grid(a.x, xb);
  return detail::levy_core(a.x, a.F, b.F);
}

// Bisection resolution of levy_distance on a uniform grid.
inline double levy_resolution(const std::vector<double>& x) {
  return 0.5 * (x.back() - x.front()) / static_cast<double>(x.size() - 1);
}

// Eigenvalues of the row-normalized adjacency Ahat = Dinv * A, ascending.
// Isolated nodes contribute eigenvalue 0; the rest come from the symmetric
// similarity D^{-1/2} A D^{-1/2} restricted to non-isolated nodes.
inline std::vector<double> normalized_adjacency_eigenvalues(
    const Eigen::MatrixXd& a, long long* zero_degree_count = nullptr) {
  const long long n = a.rows();
  if (a.cols() != n)
    throw invalid_argument_error("adjacency matrix must be square");
  Eigen::VectorXd degree = a.rowwise().sum();
  std::vector<long long> keep;
  keep.reserve(n);
  for (long long i = 0; i < n; ++i)
    if (degree[i] > 0.0) keep.push_back(i);
  const long long isolated = n - static_cast<long long>(keep.size());
  if (zero_degree_count) *zero_degree_count = isolated;
  std::vector<double> evs;
  evs.reserve(n);
  for (long long i = 0; i < isolated; ++i) evs.push_back(0.0);
  if (!keep.empty()) {
    const long long m = static_cast<long long>(keep.size());
    Eigen::MatrixXd sym(m, m);
    for (long long r = 0; r < m; ++r)
      for (long long c = 0; c < m; ++c)
        sym(r, c) = a(keep[r], keep[c]) /
                    std::sqrt(degree[keep[r]] * degree[keep[c]]);
    const auto block = eigenvalues_symmetric(sym);
    evs.insert(evs.end(), block.begin(), block.end());
  }
  std::sort(evs.begin(), evs.end());
  return evs;
}

struct NormalizedComparison {
  std::vector<double> d_levy_per_trial;
  double d_levy_mean = 0.0;
  double d_levy_std = 0.0;  // sample standard deviation over trials
  std::vector<long long> zero_degree_counts;
};

// Per-trial Levy distance between the ESDs of p*sqrt(gamma)*Ahat and
// sqrt(gamma)*W computed from the same percolation sample.
inline NormalizedComparison normalized_comparison(
    const PercolationModel& model, long trials, std::uint64_t master_seed,
    const std::vector<double>& grid_x, int threads = 0) {
  if (trials < 1) throw invalid_argument_error("need at least one trial");
  if (grid_x.empty()) throw invalid_argument_error("empty grid");
  const double root_gamma =
      std::sqrt(static_cast<double>(model.lattice().gamma()));
  const double p = model.p();
  NormalizedComparison out;
  out.d_levy_per_trial.resize(trials, 0.0);
  out.zero_degree_counts.resize(trials, 0);
  parallel_for_index(trials, resolve_thread_count(threads), [&](long long t) {
    const Eigen::MatrixXd a = sample_adjacency(
        model, SampleSeed{master_seed, static_cast<std::uint64_t>(t)});
    long long isolated = 0;
    std::vector<double> ev_norm = normalized_adjacency_eigenvalues(a, &isolated);
    out.zero_degree_counts[t] = isolated;
    for (double& v : ev_norm) v *= p * root_gamma;
    std::sort(ev_norm.begin(), ev_norm.end());
    std::vector<double> ev_w =
        eigenvalues_symmetric(scaled_adjacency(a, model.lattice()));
    for (double& v : ev_w) v *= root_gamma;
    const EmpiricalCDF fa = esd(ev_norm, grid_x);
    const EmpiricalCDF fw = esd(ev_w, grid_x);
    out.d_levy_per_trial[t] = detail::levy_core(grid_x, fa.F, fw.F);
  });
  double sum = 0.0;
  for (double d : out.d_levy_per_trial) sum += d;
  out.d_levy_mean = sum / static_cast<double>(trials);
  double var = 0.0;
  for (double d : out.d_levy_per_trial) {
    const double dev = d - out.d_levy_mean;
    var += dev * dev;
  }
  out.d_levy_std = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
  return out;
}

// Row-normalized Laplacian Lhat = I - Dinv * A.
inline Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& a) {
  return Eigen::MatrixXd::Identity(a.rows(), a.cols()) -
         row_normalized_adjacency(a);
}

// Total variation of a graph signal: ||(I - Ahat) x||_p^p.
inline double total_variation(const Eigen::MatrixXd& shift,
                              const Eigen::VectorXd& x, double p_norm) {
  if (shift.rows() != shift.cols() || shift.rows() != x.size())
    throw invalid_argument_error("shift matrix and signal dimensions differ");
  if (!(p_norm >= 1.0))
    throw invalid_argument_error("p-norm exponent must be at least 1");
  const Eigen::VectorXd r = x - shift * x;
  double acc = 0.0;
  for (long i = 0; i < r.size(); ++i)
    acc += std::pow(std::abs(r[i]), p_norm);
  return acc;
}

struct ConsensusRate {
  double rate = 0.0;
  bool disconnected = false;
  long zero_modes = 1;  // eigenvalues treated as trivial consensus modes
};

// Consensus convergence rate max_{i >= 2} |P(lambda_i)|^{1/d} of a degree-d
// polynomial filter P with P(0) = 1, over the nonzero eigenvalues of the
// normalized Laplacian.  Eigenvalues within 1e-8 of zero beyond the first
// indicate a disconnected graph; they are excluded and flagged.
inline ConsensusRate consensus_rate(const std::vector<double>& poly_coeffs,
                                    const std::vector<double>& sorted_eigenvalues,
                                    int degree) {
  if (poly_coeffs.empty())
    throw invalid_argument_error("polynomial needs at least one coefficient");
  if (std::abs(poly_coeffs.front() - 1.0) > 1e-12)
    throw invalid_argument_error(
        "filter polynomial must satisfy P(0) = 1 to preserve consensus");
  if (sorted_eigenvalues.empty())
    throw invalid_argument_error("empty eigenvalue list");
  if (!std::is_sorted(sorted_eigenvalues.begin(), sorted_eigenvalues.end()))
    throw invalid_argument_error("eigenvalues must be sorted ascending");
  const int d_eff = std::max(degree, 1);
  long zero_modes = 0;
  for (double lambda : sorted_eigenvalues)
    if (std::abs(lambda) <= 1e-8) ++zero_modes;
  // The smallest eigenvalue is the trivial mode even if it is not
  // numerically tiny.
  zero_modes = std::max<long>(zero_modes, 1);
  ConsensusRate out;
  out.zero_modes = zero_modes;
  out.disconnected = zero_modes > 1;
  double worst = 0.0;
  for (std::size_t i = static_cast<std::size_t>(zero_modes);
       i < sorted_eigenvalues.size(); ++i) {
    const double lambda = sorted_eigenvalues[i];
    double value = 0.0;
    double power = 1.0;
    for (double coeff : poly_coeffs) {
      value += coeff * power;
      power *= lambda;
    }
    worst = std::max(worst, std::pow(std::abs(value), 1.0 / d_eff));
  }
  out.rate = worst;
  return out;
}

}  // namespace latspec
