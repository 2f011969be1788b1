// D-dimensional lattice graphs.
//
// Nodes are D-tuples (b_1, ..., b_D) with 0 <= b_d < M_d; two nodes are
// linked exactly when their tuples differ in one position, so each
// axis-aligned line of nodes forms a complete graph K_{M_d}.  Consequences
// used throughout the library:
//   * node count N = prod_d M_d, constant degree gamma = sum_d (M_d - 1);
//   * the adjacency matrix is a Kronecker sum of complete-graph adjacencies,
//     so its spectrum is known in closed form: for every bit vector
//     j in {0,1}^D the value  lambda(j) = sum_d (M_d - 1 if j_d = 0 else -1)
//     is an eigenvalue with multiplicity  prod_d (1 if j_d = 0 else M_d - 1).
//
// Node indices are 1-based in the public API; the tuple <-> index bijection
// is the mixed-radix expansion  x = 1 + sum_d b_d * prod_{j<d} M_j  with b_1
// the least significant digit.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "latspec/errors.hpp"

namespace latspec {

inline constexpr long long kDefaultDenseCap = 20000;

class LatticeSpec {
public:
  explicit LatticeSpec(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
      throw invalid_argument_error("lattice spec needs at least one dimension");
    if (dims_.size() > 30)
      throw invalid_argument_error("lattice spec limited to 30 dimensions");
    node_count_ = 1;
    gamma_ = 0;
    for (int m : dims_) {
      if (m < 2)
        throw invalid_argument_error(
            "every dimension size must be at least 2, got " +
            std::to_string(m));
      node_count_ *= m;
      gamma_ += m - 1;
    }
  }

  const std::vector<int>& dims() const { return dims_; }
  int dimension_count() const { return static_cast<int>(dims_.size()); }
  long long node_count() const { return node_count_; }
  long long gamma() const { return gamma_; }

  bool operator==(const LatticeSpec& other) const {
    return dims_ == other.dims_;
  }

private:
  std::vector<int> dims_;
  long long node_count_;
  long long gamma_;
};

struct MixedRadixIndex {
  std::vector<int> digits;  // digits[d] = b_{d+1}, the coordinate in dimension d+1
};

inline long long node_count(const LatticeSpec& spec) {
  return spec.node_count();
}

inline long long gamma(const LatticeSpec& spec) { return spec.gamma(); }

inline MixedRadixIndex index_to_tuple(const LatticeSpec& spec, long long x) {
  if (x < 1 || x > spec.node_count())
    throw invalid_argument_error("node index " + std::to_string(x) +
                                 " outside [1, " +
                                 std::to_string(spec.node_count()) + "]");
  MixedRadixIndex out;
  out.digits.resize(spec.dimension_count());
  long long t = x - 1;
  for (int d = 0; d < spec.dimension_count(); ++d) {
    out.digits[d] = static_cast<int>(t % spec.dims()[d]);
    t /= spec.dims()[d];
  }
  return out;
}

inline long long tuple_to_index(const LatticeSpec& spec,
                                const MixedRadixIndex& tuple) {
  if (static_cast<int>(tuple.digits.size()) != spec.dimension_count())
    throw invalid_argument_error("digit tuple has wrong length");
  long long x = 0;
  long long stride = 1;
  for (int d = 0; d < spec.dimension_count(); ++d) {
    int b = tuple.digits[d];
    if (b < 0 || b >= spec.dims()[d])
      throw invalid_argument_error("digit " + std::to_string(b) +
                                   " outside radix " +
                                   std::to_string(spec.dims()[d]));
    x += b * stride;
    stride *= spec.dims()[d];
  }
  return x + 1;
}

inline bool are_adjacent(const LatticeSpec& spec, long long i, long long j) {
  if (i == j) return false;
  MixedRadixIndex a = index_to_tuple(spec, i);
  MixedRadixIndex b = index_to_tuple(spec, j);
  int differing = 0;
  for (int d = 0; d < spec.dimension_count(); ++d)
    if (a.digits[d] != b.digits[d]) ++differing;
  return differing == 1;
}

// Dense 0/1 adjacency.  Built in O(N * gamma) by walking, for every node,
// the complete graph along each dimension.
inline Eigen::MatrixXd adjacency_dense(const LatticeSpec& spec,
                                       long long max_nodes = kDefaultDenseCap) {
  const long long n = spec.node_count();
  if (n > max_nodes)
    throw resource_error("dense adjacency for N=" + std::to_string(n) +
                         " exceeds the cap of " + std::to_string(max_nodes) +
                         " nodes");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> digits(spec.dimension_count(), 0);
  for (long long x = 0; x < n; ++x) {
    long long stride = 1;
    for (int d = 0; d < spec.dimension_count(); ++d) {
      const int m = spec.dims()[d];
      const long long base = x - digits[d] * stride;
      for (int v = 0; v < m; ++v) {
        const long long y = base + v * stride;
        if (y != x) a(x, y) = 1.0;
      }
      stride *= m;
    }
    // advance mixed-radix digit counter
    for (int d = 0; d < spec.dimension_count(); ++d) {
      if (++digits[d] < spec.dims()[d]) break;
      digits[d] = 0;
    }
  }
  return a;
}

// One closed-form eigenvalue of the lattice adjacency.
struct SpectralLine {
  std::vector<int> bits;   // j in {0,1}^D; bits[0] = j_1
  double eigenvalue;       // sum_d (M_d - 1 if j_d = 0 else -1)
  long long multiplicity;  // prod_d (1 if j_d = 0 else M_d - 1)
};

// All 2^D spectral lines, ordered lexicographically in j with j_1 most
// significant, i.e. j = (0,...,0) first and j = (1,...,1) last.  Coincident
// eigenvalues across different j are reported per-index, not merged.
inline std::vector<SpectralLine> deterministic_spectrum(
    const LatticeSpec& spec) {
  const int d_count = spec.dimension_count();
  const long long entries = 1LL << d_count;
  std::vector<SpectralLine> out;
  out.reserve(entries);
  for (long long k = 0; k < entries; ++k) {
    SpectralLine line;
    line.bits.resize(d_count);
    double lambda = 0.0;
    long long mult = 1;
    for (int d = 0; d < d_count; ++d) {
      const int bit = static_cast<int>((k >> (d_count - 1 - d)) & 1);
      line.bits[d] = bit;
      if (bit == 0) {
        lambda += spec.dims()[d] - 1;
      } else {
        lambda -= 1.0;
        mult *= spec.dims()[d] - 1;
      }
    }
    line.eigenvalue = lambda;
    line.multiplicity = mult;
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace latspec
