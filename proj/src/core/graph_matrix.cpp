#include "gmspec/graph_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "gmspec/error.hpp"
#include "gmspec/parallel.hpp"
#include "gmspec/random.hpp"

namespace gmspec::graph {

Shape make_multi_z_shape(std::uint32_t m) {
  if (m == 0) throw InvalidArgument("make_multi_z_shape: m must be >= 1");
  Shape s;
  s.layers = m;
  // ids 0..m-1 are u_1..u_m, ids m..2m-1 are v_1..v_m
  for (std::uint32_t i = 1; i <= m; ++i) s.labels.push_back("u" + std::to_string(i));
  for (std::uint32_t i = 1; i <= m; ++i) s.labels.push_back("v" + std::to_string(i));
  for (std::uint32_t i = 0; i < m; ++i) {
    s.u_tuple.push_back(i);
    s.v_tuple.push_back(m + i);
  }
  for (std::uint32_t i = 0; i < m; ++i) s.edges.emplace_back(i, m + i);
  for (std::uint32_t i = 0; i + 1 < m; ++i) s.edges.emplace_back(i + 1, m + i);
  s.min_separator = m;
  return s;
}

std::size_t RandomGraph::pair_index(std::uint32_t n, Vertex i, Vertex j) {
  if (i > j) std::swap(i, j);
  // pairs (0,1),(0,2),...,(0,n-1),(1,2),...
  const std::size_t ii = i;
  return ii * (2 * static_cast<std::size_t>(n) - ii - 1) / 2 + (j - i - 1);
}

RandomGraph RandomGraph::sample(std::uint32_t n, std::uint64_t seed) {
  RandomGraph g(n, seed);
  const std::size_t pairs = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  g.signs_.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    g.signs_[p] = (splitmix64_at(seed, p) >> 63) ? 1 : -1;
  }
  return g;
}

RandomGraph RandomGraph::from_pattern(std::uint32_t n, std::uint64_t pattern) {
  RandomGraph g(n, pattern);
  const std::size_t pairs = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (pairs > 64) throw InvalidArgument("from_pattern: at most 64 vertex pairs");
  g.signs_.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) g.signs_[p] = ((pattern >> p) & 1U) ? 1 : -1;
  return g;
}

RandomGraph RandomGraph::constant(std::uint32_t n, int sign) {
  if (sign != 1 && sign != -1) throw InvalidArgument("constant graph sign must be +1 or -1");
  RandomGraph g(n, 0);
  g.signs_.assign(static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2,
                  static_cast<std::int8_t>(sign));
  return g;
}

int RandomGraph::edge(Vertex i, Vertex j) const {
  if (i >= n_ || j >= n_) throw InvalidArgument("edge: vertex out of range");
  if (i == j) throw InvalidArgument("edge: self-pairs carry no edge variable");
  return edge_unchecked(i, j);
}

RandomGraph sample_graph(std::uint32_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("sample_graph: n must be >= 2");
  return RandomGraph::sample(n, seed);
}

std::uint64_t matrix_dimension(std::uint32_t n, std::uint32_t m) {
  if (m > n) return 0;
  std::uint64_t r = 1;
  for (std::uint32_t j = 0; j < m; ++j) r *= (n - j);
  return r;
}

std::vector<Tuple> distinct_tuples(std::uint32_t n, std::uint32_t m) {
  std::vector<Tuple> out;
  if (m > n) return out;
  out.reserve(matrix_dimension(n, m));
  Tuple cur;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (Vertex v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      cur.push_back(v);
      self(self);
      cur.pop_back();
      used[v] = false;
    }
  };
  rec(rec);
  return out;
}

namespace {

bool has_repeat(std::span<const Vertex> t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (t[i] == t[j]) return true;
  return false;
}

bool overlaps(std::span<const Vertex> a, std::span<const Vertex> b) {
  for (auto x : a)
    for (auto y : b)
      if (x == y) return true;
  return false;
}

// Caller guarantees disjoint, repeat-free tuples of the right length.
int entry_unchecked(const Shape& shape, const RandomGraph& g, std::span<const Vertex> row,
                    std::span<const Vertex> col, std::vector<Vertex>& sigma) {
  for (std::size_t i = 0; i < shape.u_tuple.size(); ++i) sigma[shape.u_tuple[i]] = row[i];
  for (std::size_t i = 0; i < shape.v_tuple.size(); ++i) sigma[shape.v_tuple[i]] = col[i];
  int prod = 1;
  for (const auto& [x, y] : shape.edges) prod *= g.edge_unchecked(sigma[x], sigma[y]);
  return prod;
}

}  // namespace

int matrix_entry(const Shape& shape, const RandomGraph& g, std::span<const Vertex> row,
                 std::span<const Vertex> col) {
  if (row.size() != shape.u_tuple.size() || col.size() != shape.v_tuple.size())
    throw InvalidArgument("matrix_entry: tuple length does not match the shape");
  for (auto v : row)
    if (v >= g.n()) throw InvalidArgument("matrix_entry: vertex out of range");
  for (auto v : col)
    if (v >= g.n()) throw InvalidArgument("matrix_entry: vertex out of range");
  if (has_repeat(row) || has_repeat(col))
    throw InvalidArgument("matrix_entry: tuple with repeated vertex");
  if (overlaps(row, col)) return 0;
  std::vector<Vertex> sigma(shape.labels.size());
  return entry_unchecked(shape, g, row, col, sigma);
}

SignMatrix build_matrix(const Shape& shape, const RandomGraph& g) {
  const auto rows = distinct_tuples(g.n(), static_cast<std::uint32_t>(shape.u_tuple.size()));
  const auto cols = distinct_tuples(g.n(), static_cast<std::uint32_t>(shape.v_tuple.size()));
  SignMatrix m = SignMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                  static_cast<Eigen::Index>(cols.size()));
  std::vector<Vertex> sigma(shape.labels.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (overlaps(rows[r], cols[c])) continue;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          static_cast<std::int8_t>(entry_unchecked(shape, g, rows[r], cols[c], sigma));
    }
  }
  return m;
}

std::vector<double> singular_values(const SignMatrix& m, double scale) {
  if (m.size() == 0) return {};
  const Eigen::MatrixXd dense = m.cast<double>() * scale;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const auto& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace {

std::optional<std::string> degenerate_warning(std::uint32_t m, std::uint32_t n) {
  if (n >= 2 * m) return std::nullopt;
  return "n = " + std::to_string(n) + " < 2m = " + std::to_string(2 * m) +
         ": every row and column tuple overlap, the matrix is identically zero";
}

std::vector<std::vector<double>> replicate_spectra(std::uint32_t m, std::uint32_t n,
                                                   std::uint32_t reps, std::uint64_t seed,
                                                   unsigned threads) {
  const Shape shape = make_multi_z_shape(m);
  const double scale = std::pow(static_cast<double>(n), -0.5 * m);
  std::vector<std::vector<double>> out(reps);
  parallel_for(reps, threads, [&](std::size_t k) {
    const RandomGraph g = sample_graph(n, derive_stream_seed(seed, k));
    out[k] = singular_values(build_matrix(shape, g), scale);
  });
  return out;
}

}  // namespace

TraceMoments empirical_trace_moments(std::uint32_t m, std::uint32_t n, std::uint32_t q_max,
                                     std::uint32_t reps, std::uint64_t seed, unsigned threads) {
  if (m == 0) throw InvalidArgument("empirical_trace_moments: m must be >= 1");
  if (q_max == 0) throw InvalidArgument("empirical_trace_moments: q must be >= 1");
  if (reps == 0) throw InvalidArgument("empirical_trace_moments: reps must be >= 1");
  TraceMoments result;
  result.moments.assign(q_max, 0.0);
  result.warning = degenerate_warning(m, n);
  if (result.warning) return result;

  const auto spectra = replicate_spectra(m, n, reps, seed, threads);
  const double r = static_cast<double>(matrix_dimension(n, m));
  // replicate order is fixed, so the floating-point sum is reproducible
  for (const auto& sv : spectra) {
    for (std::uint32_t q = 1; q <= q_max; ++q) {
      double tr = 0.0;
      for (double s : sv) tr += std::pow(s * s, q);
      result.moments[q - 1] += tr / r;
    }
  }
  for (double& v : result.moments) v /= reps;
  return result;
}

double empirical_trace_moment(std::uint32_t m, std::uint32_t q, std::uint32_t n,
                              std::uint32_t reps, std::uint64_t seed, unsigned threads) {
  if (q == 0) throw InvalidArgument("empirical_trace_moment: q must be >= 1");
  if (q > 1) return empirical_trace_moments(m, n, q, reps, seed, threads).moments[q - 1];

  if (m == 0) throw InvalidArgument("empirical_trace_moment: m must be >= 1");
  if (reps == 0) throw InvalidArgument("empirical_trace_moment: reps must be >= 1");
  if (degenerate_warning(m, n)) return 0.0;
  // tr(M M^T) is the sum of squared entries; accumulate it exactly
  const Shape shape = make_multi_z_shape(m);
  std::vector<std::int64_t> sums(reps, 0);
  parallel_for(reps, threads, [&](std::size_t k) {
    const SignMatrix mat = build_matrix(shape, sample_graph(n, derive_stream_seed(seed, k)));
    sums[k] = mat.cast<std::int64_t>().cwiseAbs2().sum();
  });
  combinatorics::BigRational total = 0;
  for (auto s : sums) total += s;
  combinatorics::BigInt denom = combinatorics::BigInt(matrix_dimension(n, m)) * reps;
  for (std::uint32_t j = 0; j < m; ++j) denom *= n;
  return static_cast<double>(total / denom);
}

combinatorics::BigInt trace_power_exact(const SignMatrix& m, std::uint32_t q) {
  using Big = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
  if (q == 0) throw InvalidArgument("trace_power_exact: q must be >= 1");
  const Big a = m.cast<std::int64_t>();
  const Big g = a * a.transpose();
  // |entries of g^k| <= (r * cols)^k; keep the products inside int64
  const double bound = std::pow(static_cast<double>(std::max<Eigen::Index>(1, m.rows())) *
                                    static_cast<double>(std::max<Eigen::Index>(1, m.cols())),
                                q);
  if (bound > 9.0e18) throw InvalidArgument("trace_power_exact: matrix too large for int64");
  Big p = g;
  for (std::uint32_t k = 1; k < q; ++k) p = p * g;
  return combinatorics::BigInt(p.trace());
}

combinatorics::BigRational exact_expected_trace_bruteforce(std::uint32_t m, std::uint32_t q,
                                                           std::uint32_t n) {
  const std::size_t pairs = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (n < 2) throw InvalidArgument("exact_expected_trace_bruteforce: n must be >= 2");
  if (pairs > 24) throw InvalidArgument("exact_expected_trace_bruteforce: n(n-1)/2 must be <= 24");
  const Shape shape = make_multi_z_shape(m);
  combinatorics::BigInt total = 0;
  const std::uint64_t graphs = std::uint64_t{1} << pairs;
  for (std::uint64_t pattern = 0; pattern < graphs; ++pattern)
    total += trace_power_exact(build_matrix(shape, RandomGraph::from_pattern(n, pattern)), q);
  return combinatorics::BigRational(total, combinatorics::BigInt(graphs));
}

double Histogram::integral() const {
  double total = 0.0;
  for (std::size_t b = 0; b < counts.size(); ++b) total += densities[b] * (edges[b + 1] - edges[b]);
  return total;
}

Histogram make_histogram(std::span<const double> values, std::uint32_t bins) {
  if (bins == 0) throw InvalidArgument("make_histogram: bins must be >= 1");
  if (values.empty()) throw InvalidArgument("make_histogram: no values");
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > 0.0)) hi = 1.0;
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::uint32_t b = 0; b <= bins; ++b) h.edges[b] = hi * b / bins;
  h.edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(v / hi * bins);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  const double total = static_cast<double>(values.size());
  h.densities.resize(bins);
  for (std::uint32_t b = 0; b < bins; ++b)
    h.densities[b] = static_cast<double>(h.counts[b]) / (total * (h.edges[b + 1] - h.edges[b]));
  return h;
}

std::vector<double> SpectrumSample::pooled_ascending() const {
  std::vector<double> all;
  for (const auto& r : replicates) all.insert(all.end(), r.begin(), r.end());
  std::sort(all.begin(), all.end());
  return all;
}

SpectrumSample empirical_spectrum(std::uint32_t m, std::uint32_t n, std::uint32_t reps,
                                  std::uint32_t bins, std::uint64_t seed, unsigned threads) {
  if (m == 0) throw InvalidArgument("empirical_spectrum: m must be >= 1");
  if (reps == 0) throw InvalidArgument("empirical_spectrum: reps must be >= 1");
  if (bins < 10) throw InvalidArgument("empirical_spectrum: bins must be >= 10");
  SpectrumSample s;
  s.m = m;
  s.n = n;
  s.reps = reps;
  s.seed = seed;
  s.warning = degenerate_warning(m, n);
  if (s.warning) {
    const std::size_t dim = matrix_dimension(n, m);
    s.replicates.assign(reps, std::vector<double>(dim, 0.0));
  } else {
    s.replicates = replicate_spectra(m, n, reps, seed, threads);
  }
  const auto pooled = s.pooled_ascending();
  if (pooled.empty()) throw InvalidArgument("empirical_spectrum: matrix has no rows (m > n)");
  s.histogram = make_histogram(pooled, bins);
  return s;
}

}  // namespace gmspec::graph
