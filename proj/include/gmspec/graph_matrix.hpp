#pragma once

// Multi-Z shapes, G(n,1/2) edge-sign graphs, dense graph matrices indexed by
// tuples of distinct vertices, and their empirical singular-value statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gmspec/combinatorics.hpp"

namespace gmspec::graph {

using Vertex = std::uint32_t;
using Tuple = std::vector<Vertex>;

/// Bipartite shape with ordered boundary tuples. Vertex ids index `labels`.
struct Shape {
  std::uint32_t layers = 0;
  std::vector<std::string> labels;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> u_tuple;
  std::vector<std::uint32_t> v_tuple;
  std::uint32_t min_separator = 0;
};

/// The m-layer Z shape: edges {u_i,v_i} for i in [m] and {u_{i+1},v_i} for
/// i in [m-1]. m = 1 gives the line shape.
Shape make_multi_z_shape(std::uint32_t m);

/// Symmetric +-1 assignment on unordered pairs of distinct vertices.
class RandomGraph {
 public:
  /// Pair {i,j} (i<j) with lexicographic pair index p gets sign
  /// +1 iff the top bit of splitmix64_at(seed, p) is set.
  static RandomGraph sample(std::uint32_t n, std::uint64_t seed);
  /// Bit p of `pattern` selects sign of pair p (1 -> +1). Requires n(n-1)/2 <= 64.
  static RandomGraph from_pattern(std::uint32_t n, std::uint64_t pattern);
  static RandomGraph constant(std::uint32_t n, int sign);

  std::uint32_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t pair_count() const { return signs_.size(); }

  /// e(i,j); throws InvalidArgument for i == j or out-of-range vertices.
  int edge(Vertex i, Vertex j) const;
  /// Same as edge() without validation.
  int edge_unchecked(Vertex i, Vertex j) const { return signs_[pair_index(i, j)]; }

  static std::size_t pair_index(std::uint32_t n, Vertex i, Vertex j);

 private:
  RandomGraph(std::uint32_t n, std::uint64_t seed) : n_(n), seed_(seed) {}
  std::size_t pair_index(Vertex i, Vertex j) const { return pair_index(n_, i, j); }

  std::uint32_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::int8_t> signs_;
};

/// Same as RandomGraph::sample; rejects n < 2.
RandomGraph sample_graph(std::uint32_t n, std::uint64_t seed);

/// r(n,m) = n!/(n-m)!, the matrix dimension; 0 when m > n.
std::uint64_t matrix_dimension(std::uint32_t n, std::uint32_t m);

/// Ordered m-tuples of distinct vertices in lexicographic order.
std::vector<Tuple> distinct_tuples(std::uint32_t n, std::uint32_t m);

/// M(A,B): 0 when A and B share a vertex, otherwise the product of edge
/// signs over the shape edges under u_i -> A_i, v_i -> B_i.
int matrix_entry(const Shape& shape, const RandomGraph& g, std::span<const Vertex> row,
                 std::span<const Vertex> col);

using SignMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense graph matrix in lexicographic tuple order.
SignMatrix build_matrix(const Shape& shape, const RandomGraph& g);

/// Singular values of scale * M, sorted descending.
std::vector<double> singular_values(const SignMatrix& m, double scale);

struct TraceMoments {
  /// moments[q-1] = average over replicates of (1/r) sum_i sigma_i^{2q},
  /// sigma the singular values of M / n^{m/2}.
  std::vector<double> moments;
  std::optional<std::string> warning;
};

TraceMoments empirical_trace_moments(std::uint32_t m, std::uint32_t n, std::uint32_t q_max,
                                     std::uint32_t reps, std::uint64_t seed,
                                     unsigned threads = 0);

/// q = 1 is answered from the exact integer sum of squared entries of each
/// sampled matrix; q >= 2 goes through empirical_trace_moments.
double empirical_trace_moment(std::uint32_t m, std::uint32_t q, std::uint32_t n,
                              std::uint32_t reps, std::uint64_t seed, unsigned threads = 0);

/// tr((M M^T)^q) by repeated integer matrix products. Small matrices only.
combinatorics::BigInt trace_power_exact(const SignMatrix& m, std::uint32_t q);

/// E[tr((M M^T)^q)] over all 2^{n(n-1)/2} graphs on n vertices, exact.
/// Requires n(n-1)/2 <= 24.
combinatorics::BigRational exact_expected_trace_bruteforce(std::uint32_t m, std::uint32_t q,
                                                           std::uint32_t n);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::uint64_t> counts;
  std::vector<double> densities;

  std::size_t bins() const { return counts.size(); }
  double integral() const;
};

/// Equal-width bins over [0, max(values)], densities normalised to unit area.
Histogram make_histogram(std::span<const double> values, std::uint32_t bins);

struct SpectrumSample {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> replicates;  // each sorted descending
  Histogram histogram;
  std::optional<std::string> warning;

  /// All singular values pooled, sorted ascending.
  std::vector<double> pooled_ascending() const;
};

SpectrumSample empirical_spectrum(std::uint32_t m, std::uint32_t n, std::uint32_t reps,
                                  std::uint32_t bins, std::uint64_t seed, unsigned threads = 0);

}  // namespace gmspec::graph
