// Acceptance run: one PASS/FAIL line per criterion, through the C API only.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gmspec/gmspec.h"

namespace {

struct Failure {
  std::string what;
};

void ok(gmspec_status s) {
  if (s != GMSPEC_OK) throw Failure{std::string(gmspec_status_name(s)) + ": " + gmspec_last_error()};
}

std::string take(char* s) {
  std::string out = s;
  gmspec_string_free(s);
  return out;
}

std::string catalan(uint32_t m, uint32_t n) {
  char* s = nullptr;
  ok(gmspec_generalized_catalan(m, n, &s));
  return take(s);
}

unsigned __int128 to_u128(const std::string& s) {
  unsigned __int128 v = 0;
  for (char c : s) v = v * 10 + static_cast<unsigned>(c - '0');
  return v;
}

double to_double(const std::string& s) { return static_cast<double>(to_u128(s)); }

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int failures = 0;

// body fills detail and returns pass/fail; budget_s <= 0 means no runtime bound.
void criterion(int id, const char* title, double budget_s,
               const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  bool pass = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    pass = body(detail);
  } catch (const Failure& f) {
    detail << "error: " << f.what;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    pass = false;
    detail << " (over the " << budget_s << " s budget)";
  }
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", id, title, detail.str().c_str(), secs);
  std::fflush(stdout);
}

}  // namespace

int main() {
  std::uint64_t seed = 20240611;
  if (const char* env = std::getenv("GMSPEC_SEED")) seed = std::strtoull(env, nullptr, 10);
  std::printf("acceptance run, seed %" PRIu64 "\n", seed);

  criterion(1, "dominant counts equal D(m,q)", 120, [](std::ostringstream& d) {
    const struct {
      uint32_t m, q;
      uint64_t want;
    } cases[] = {{1, 1, 1}, {1, 2, 2}, {1, 3, 5}, {1, 4, 14}, {1, 5, 42},
                 {2, 1, 1}, {2, 2, 3}, {2, 3, 12}, {3, 2, 4}};
    bool pass = true;
    for (const auto& c : cases) {
      gmspec_dominance* dom = nullptr;
      ok(gmspec_enumerate_dominant(c.m, c.q, nullptr, &dom));
      const uint64_t got = gmspec_dominance_count(dom);
      gmspec_dominance_free(dom);
      pass = pass && got == c.want && std::to_string(got) == catalan(c.m, c.q);
      d << "(" << c.m << "," << c.q << ")=" << got << " ";
    }
    return pass;
  });

  criterion(2, "grid walks equal D(m,n), m<=4, n<=10", 1, [](std::ostringstream& d) {
    int mismatches = 0;
    for (uint32_t m = 1; m <= 4; ++m)
      for (uint32_t n = 0; n <= 10; ++n) {
        char* s = nullptr;
        ok(gmspec_gridwalk_count(m, n, &s));
        mismatches += take(s) != catalan(m, n);
      }
    d << "44 pairs, " << mismatches << " mismatches; D(4,10) = " << catalan(4, 10);
    return mismatches == 0;
  });

  criterion(3, "recurrence m<=4, n<=8 and ratio products k<=10", 1, [](std::ostringstream& d) {
    bool pass = true;
    for (uint32_t m = 1; m <= 4; ++m) {
      int all = 0;
      ok(gmspec_recurrence_check(m, 8, &all));
      pass = pass && all == 1;
    }
    int bad_products = 0;
    for (uint32_t m : {2u, 3u}) {
      // prod_{j<=k} num_j / den_j == D(m,k), checked as cross-multiplied 128-bit integers.
      unsigned __int128 num = 1, den = 1;
      for (uint32_t k = 1; k <= 10; ++k) {
        char *a = nullptr, *b = nullptr;
        ok(gmspec_moment_ratio(m, k, &a, &b));
        num *= to_u128(take(a));
        den *= to_u128(take(b));
        if (num != to_u128(catalan(m, k)) * den) ++bad_products;
      }
    }
    d << "recurrence " << (pass ? "exact" : "BROKEN") << ", " << bad_products << " product mismatches";
    return pass && bad_products == 0;
  });

  criterion(4, "tiny-n exact trace identity (m=1, q=2, n=4)", 1, [](std::ostringstream& d) {
    char *a = nullptr, *b = nullptr;
    ok(gmspec_exact_expected_trace(1, 2, 4, &a));
    ok(gmspec_expected_trace_from_partitions(1, 2, 4, &b));
    const std::string lhs = take(a), rhs = take(b);
    d << "average over 64 graphs " << lhs << ", sum_C N(C) val(C) " << rhs;
    return lhs == rhs;
  });

  criterion(5, "deterministic q=1 moment", 0, [seed](std::ostringstream& d) {
    double worst = 0;
    for (uint32_t m = 1; m <= 3; ++m)
      for (uint32_t n : {10u, 20u}) {
        double want = 1;
        for (uint32_t j = m; j <= 2 * m - 1; ++j) want *= static_cast<double>(n - j) / n;
        double got = 0;
        ok(gmspec_empirical_trace_moment(m, 1, n, 3, seed, 0, &got));
        worst = std::max(worst, std::abs(got - want));
      }
    d << "max |error| " << g(worst) << " (tol 1e-12)";
    return worst < 1e-12;
  });

  criterion(6, "density moments k=0..6", 5, [](std::ostringstream& d) {
    double worst = 0;
    for (int k = 0; k <= 6; ++k) {
      double mk = 0;
      ok(gmspec_density_z_moment(k, 0.1, &mk));
      const double want = to_double(catalan(2, static_cast<uint32_t>(k)));
      worst = std::max(worst, std::abs(mk - want) / want);
    }
    d << "max relative error " << g(worst) << " (tol 1e-4)";
    return worst < 1e-4;
  });

  criterion(7, "closed-form ODE residual on [0.05a, 0.95a]", 1, [](std::ostringstream& d) {
    double a = 0, worst = 0;
    ok(gmspec_edge_constant(2, &a));
    for (int i = 0; i <= 1000; ++i) {
      const double x = a * (0.05 + 0.9 * i / 1000.0);
      double r = 0;
      ok(gmspec_z_ode_relative_residual(x, 1e-5 * x, &r));
      worst = std::max(worst, r);
    }
    d << "max relative residual " << g(worst) << " (tol 1e-6)";
    return worst < 1e-6;
  });

  criterion(8, "ODE solution converges to the closed form", 30, [](std::ostringstream& d) {
    double a = 0;
    ok(gmspec_edge_constant(2, &a));
    std::vector<double> sup;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      gmspec_density_table* t = nullptr;
      ok(gmspec_solve_ode(2, eps, GMSPEC_TAIL_SQRT, 0, &t));
      double s = 0;
      const gmspec_status st = gmspec_density_table_sup_distance_z(t, 0.1, a - 0.01, &s);
      gmspec_density_table_free(t);
      ok(st);
      sup.push_back(s);
    }
    d << "sup distances " << g(sup[0]) << ", " << g(sup[1]) << ", " << g(sup[2]);
    return sup[1] < sup[0] && sup[2] < sup[1] && sup[2] < 1e-2;
  });

  criterion(9, "3-layer solved density", 30, [](std::ostringstream& d) {
    gmspec_density_table* t = nullptr;
    ok(gmspec_solve_ode(3, 1e-2, GMSPEC_TAIL_FROBENIUS_TWO_TERM, 0, &t));
    double k0 = 0, k1 = 0, k2 = 0, slope = 0;
    gmspec_status st = gmspec_density_table_moment(t, 0, &k0);
    if (st == GMSPEC_OK) st = gmspec_density_table_moment(t, 1, &k1);
    if (st == GMSPEC_OK) st = gmspec_density_table_moment(t, 2, &k2);
    if (st == GMSPEC_OK) st = gmspec_density_table_exponent(t, GMSPEC_ENDPOINT_EDGE, 1e-2, 0.1, &slope);
    gmspec_density_table_free(t);
    ok(st);
    d << "k0 " << g(k0) << ", k1 " << g(k1) << ", k2 " << g(k2) << ", edge exponent " << g(slope);
    return std::abs(k0 - 1) < 1e-8 && std::abs(k1 - 1) < 0.03 && std::abs(k2 - 4) < 0.05 * 4 &&
           std::abs(slope - 0.5) < 0.05;
  });

  criterion(10, "Monte Carlo spectrum converges (m=2, reps=30)", 600, [seed](std::ostringstream& d) {
    std::vector<double> ks;
    for (uint32_t n : {20u, 30u, 40u}) {
      gmspec_spectrum_sample* s = nullptr;
      ok(gmspec_spectrum_sample_create(2, n, 30, 50, seed, 0, &s));
      double v = 0;
      const gmspec_status st = gmspec_spectrum_sample_ks_z(s, &v);
      gmspec_spectrum_sample_free(s);
      ok(st);
      ks.push_back(v);
    }
    d << "sup-CDF distance n=20 " << g(ks[0]) << ", n=30 " << g(ks[1]) << ", n=40 " << g(ks[2])
      << " (seed " << seed << ")";
    return ks[1] < ks[0] && ks[2] < ks[1] && ks[2] < 0.08;
  });

  criterion(11, "structure predicates on every dominant graph", 120, [](std::ostringstream& d) {
    const uint32_t sizes[][2] = {{1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5},
                                 {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}};
    gmspec_enumeration_options o;
    gmspec_enumeration_options_init(&o);
    o.check_structure = 1;
    uint64_t graphs = 0;
    size_t violations = 0;
    for (const auto& sz : sizes) {
      gmspec_dominance* dom = nullptr;
      ok(gmspec_enumerate_dominant(sz[0], sz[1], &o, &dom));
      graphs += gmspec_dominance_count(dom);
      violations += gmspec_dominance_violation_count(dom);
      for (size_t i = 0; i < gmspec_dominance_violation_count(dom) && i < 3; ++i) {
        char* s = nullptr;
        if (gmspec_dominance_violation_json(dom, i, &s) == GMSPEC_OK) d << take(s) << " ";
      }
      gmspec_dominance_free(dom);
    }
    d << graphs << " dominant graphs over 10 sizes, " << violations << " violations";
    return violations == 0;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
