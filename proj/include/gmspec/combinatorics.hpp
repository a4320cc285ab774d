#pragma once

// Exact counting for the multi-Z family: generalized Catalan numbers
// D(m,n) = binomial((m+1)n, n) / (mn+1), their successive ratios, the
// (m+1)-fold convolution recurrence, and a lattice-path counting oracle.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gmspec::combinatorics {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Nonnegative exact count.
using CountValue = BigInt;

/// Reduced fraction with positive denominator.
struct RatioValue {
  BigInt numerator;
  BigInt denominator;

  static RatioValue reduced(BigInt num, BigInt den);
  BigRational as_rational() const { return BigRational(numerator, denominator); }
  double to_double() const;
  std::string str() const;
  friend bool operator==(const RatioValue&, const RatioValue&) = default;
};

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// D(m,n). Requires m >= 1.
CountValue generalized_catalan(std::uint32_t m, std::uint32_t n);

/// D(m,k)/D(m,k-1) from the closed-form products, for m in {2,3} and k >= 1.
/// Throws Unsupported for any other m.
RatioValue moment_ratio(std::uint32_t m, std::uint32_t k);

struct RecurrenceRow {
  std::uint32_t n;
  CountValue lhs;  // D(m, n+1)
  CountValue rhs;  // sum over compositions of n into m+1 parts
  bool equal;
};

/// Checks D(m,n+1) = sum_{i_0+...+i_m = n} prod_j D(m,i_j) for n = 0..n_max.
std::vector<RecurrenceRow> recurrence_check(std::uint32_t m, std::uint32_t n_max);

namespace detail {
template <typename Visit>
void compositions_from(std::vector<std::uint32_t>& parts, std::size_t pos, std::uint32_t remaining,
                       Visit& visit) {
  if (pos + 1 == parts.size()) {
    parts[pos] = remaining;
    visit(static_cast<const std::vector<std::uint32_t>&>(parts));
    return;
  }
  for (std::uint32_t v = 0; v <= remaining; ++v) {
    parts[pos] = v;
    compositions_from(parts, pos + 1, remaining - v, visit);
  }
}
}  // namespace detail

/// Calls visit(parts) for every composition of n into k >= 1 nonnegative
/// parts, in lexicographic order.
template <typename Visit>
void for_each_composition(std::uint32_t n, std::uint32_t k, Visit&& visit) {
  if (k == 0) return;
  std::vector<std::uint32_t> parts(k, 0);
  detail::compositions_from(parts, 0, n, visit);
}

/// Monotone unit-step paths from (0,0) to (n, m*n) staying weakly below
/// y = m*x at every visited point. Dynamic program over the grid.
CountValue gridwalk_count(std::uint32_t m, std::uint32_t n);

std::string to_string(const BigInt& v);

}  // namespace gmspec::combinatorics
