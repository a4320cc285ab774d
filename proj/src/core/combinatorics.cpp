#include "gmspec/combinatorics.hpp"

#include <sstream>

#include "gmspec/error.hpp"

namespace gmspec::combinatorics {

RatioValue RatioValue::reduced(BigInt num, BigInt den) {
  if (den == 0) throw InvalidArgument("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return RatioValue{std::move(num), std::move(den)};
}

double RatioValue::to_double() const { return as_rational().convert_to<double>(); }

std::string RatioValue::str() const { return to_string(numerator) + "/" + to_string(denominator); }

std::string to_string(const BigInt& v) { return v.str(); }

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  // result stays integral: after step i it equals binomial(n-k+i, i).
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;
  }
  return result;
}

CountValue generalized_catalan(std::uint32_t m, std::uint32_t n) {
  if (m == 0) throw InvalidArgument("generalized_catalan: m must be >= 1");
  const std::uint64_t mm = m;
  const std::uint64_t nn = n;
  BigInt c = binomial((mm + 1) * nn, nn);
  const BigInt denom = mm * nn + 1;
  BigInt q, r;
  boost::multiprecision::divide_qr(c, denom, q, r);
  if (r != 0) throw Error("generalized_catalan: closed form did not divide exactly");
  return q;
}

RatioValue moment_ratio(std::uint32_t m, std::uint32_t k) {
  if (k == 0) throw InvalidArgument("moment_ratio: k must be >= 1");
  const BigInt kk = k;
  switch (m) {
    case 2:
      return RatioValue::reduced(3 * (3 * kk - 1) * (3 * kk - 2), 2 * kk * (2 * kk + 1));
    case 3:
      return RatioValue::reduced(4 * (4 * kk - 3) * (4 * kk - 2) * (4 * kk - 1),
                                 (3 * kk + 1) * (3 * kk) * (3 * kk - 1));
    default:
      throw Unsupported("ratio formula only stated for m ∈ {2,3}");
  }
}

std::vector<RecurrenceRow> recurrence_check(std::uint32_t m, std::uint32_t n_max) {
  if (m == 0) throw InvalidArgument("recurrence_check: m must be >= 1");
  std::vector<CountValue> table;
  table.reserve(n_max + 2);
  for (std::uint32_t i = 0; i <= n_max + 1; ++i) table.push_back(generalized_catalan(m, i));

  std::vector<RecurrenceRow> rows;
  rows.reserve(n_max + 1);
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    CountValue sum = 0;
    for_each_composition(n, m + 1, [&](const std::vector<std::uint32_t>& parts) {
      CountValue prod = 1;
      for (auto p : parts) prod *= table[p];
      sum += prod;
    });
    const CountValue& lhs = table[n + 1];
    rows.push_back(RecurrenceRow{n, lhs, sum, lhs == sum});
  }
  return rows;
}

CountValue gridwalk_count(std::uint32_t m, std::uint32_t n) {
  if (m == 0) throw InvalidArgument("gridwalk_count: m must be >= 1");
  const std::size_t width = static_cast<std::size_t>(n) + 1;
  const std::size_t height = static_cast<std::size_t>(m) * n + 1;
  // column-by-column DP; ways[y] holds the count for the current x.
  std::vector<CountValue> ways(height, 0);
  ways[0] = 1;
  for (std::size_t x = 0; x < width; ++x) {
    const std::size_t y_cap = std::min(height - 1, static_cast<std::size_t>(m) * x);
    for (std::size_t y = 0; y < height; ++y) {
      if (y > y_cap) {
        ways[y] = 0;
        continue;
      }
      // ways[y] already holds the contribution from (x-1, y) (a right step).
      if (y > 0) ways[y] += ways[y - 1];
    }
  }
  return ways[height - 1];
}

}  // namespace gmspec::combinatorics
