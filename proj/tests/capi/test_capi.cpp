// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "gmspec/gmspec.h"

namespace {

std::string take(char* s) {
  std::string out = s;
  gmspec_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(gmspec_version()) == "0.1.0");
  CHECK(std::string(gmspec_status_name(GMSPEC_OK)) == "ok");
  CHECK(std::string(gmspec_status_name(GMSPEC_ERR_INFEASIBLE)) == "infeasible");
  gmspec_string_free(nullptr);
  gmspec_graph_free(nullptr);
  gmspec_dominance_free(nullptr);
  gmspec_density_table_free(nullptr);
  gmspec_spectrum_sample_free(nullptr);
}

TEST_CASE("counts as decimal strings") {
  char* s = nullptr;
  REQUIRE(gmspec_generalized_catalan(2, 3, &s) == GMSPEC_OK);
  CHECK(take(s) == "12");
  REQUIRE(gmspec_gridwalk_count(3, 2, &s) == GMSPEC_OK);
  CHECK(take(s) == "4");
  char *num = nullptr, *den = nullptr;
  REQUIRE(gmspec_moment_ratio(2, 4, &num, &den) == GMSPEC_OK);
  CHECK(take(num) == "55");
  CHECK(take(den) == "12");
  int all = 0;
  REQUIRE(gmspec_recurrence_check(3, 5, &all) == GMSPEC_OK);
  CHECK(all == 1);
}

TEST_CASE("errors map to status codes with a message") {
  char *num = nullptr, *den = nullptr;
  CHECK(gmspec_moment_ratio(5, 1, &num, &den) == GMSPEC_ERR_UNSUPPORTED);
  CHECK(std::string(gmspec_last_error()).find("ratio formula") != std::string::npos);
  CHECK(num == nullptr);

  char* s = nullptr;
  CHECK(gmspec_generalized_catalan(0, 1, &s) == GMSPEC_ERR_INVALID_ARGUMENT);
  CHECK(gmspec_generalized_catalan(1, 1, nullptr) == GMSPEC_ERR_INVALID_ARGUMENT);

  gmspec_dominance* d = nullptr;
  CHECK(gmspec_enumerate_dominant(2, 4, nullptr, &d) == GMSPEC_ERR_INFEASIBLE);
  CHECK(d == nullptr);
  CHECK(std::string(gmspec_last_error()).find("infeasible at desk scale") != std::string::npos);

  double v = 0;
  CHECK(gmspec_density_z(-1.0, &v) == GMSPEC_ERR_INVALID_ARGUMENT);
  CHECK(gmspec_density_z(1.0, &v) == GMSPEC_OK);
  CHECK(std::string(gmspec_last_error()).empty());

  gmspec_density_table* t = nullptr;
  CHECK(gmspec_solve_ode(3, 1e-2, GMSPEC_TAIL_FROBENIUS_TWO_TERM, 1, &t) == GMSPEC_ERR_NUMERICAL);
  CHECK(gmspec_solve_ode(4, 1e-2, GMSPEC_TAIL_SQRT, 0, &t) == GMSPEC_ERR_UNSUPPORTED);
  CHECK(t == nullptr);
}

TEST_CASE("last error is per thread") {
  char* s = nullptr;
  CHECK(gmspec_generalized_catalan(0, 1, &s) == GMSPEC_ERR_INVALID_ARGUMENT);
  std::string other;
  std::thread th([&] {
    double v = 0;
    gmspec_density_z(1.0, &v);
    other = gmspec_last_error();
  });
  th.join();
  CHECK(other.empty());
  CHECK_FALSE(std::string(gmspec_last_error()).empty());
}

TEST_CASE("graph handle") {
  gmspec_graph* g = nullptr;
  REQUIRE(gmspec_graph_sample(6, 9, &g) == GMSPEC_OK);
  CHECK(gmspec_graph_n(g) == 6);
  int e01 = 0, e10 = 0;
  REQUIRE(gmspec_graph_edge(g, 0, 1, &e01) == GMSPEC_OK);
  REQUIRE(gmspec_graph_edge(g, 1, 0, &e10) == GMSPEC_OK);
  CHECK(e01 == e10);
  int bad = 0;
  CHECK(gmspec_graph_edge(g, 2, 2, &bad) == GMSPEC_ERR_INVALID_ARGUMENT);

  const uint32_t row[] = {0, 1}, col[] = {2, 3}, overlap[] = {1, 4};
  int entry = 0, e02 = 0, e12 = 0, e13 = 0;
  REQUIRE(gmspec_matrix_entry(g, 2, row, col, &entry) == GMSPEC_OK);
  gmspec_graph_edge(g, 0, 2, &e02);
  gmspec_graph_edge(g, 1, 2, &e12);
  gmspec_graph_edge(g, 1, 3, &e13);
  CHECK(entry == e02 * e12 * e13);
  REQUIRE(gmspec_matrix_entry(g, 2, row, overlap, &entry) == GMSPEC_OK);
  CHECK(entry == 0);

  char* s = nullptr;
  REQUIRE(gmspec_trace_power_exact(g, 1, 1, &s) == GMSPEC_OK);
  CHECK(take(s) == "30");  // n(n-1)
  gmspec_graph_free(g);

  REQUIRE(gmspec_exact_expected_trace(1, 2, 4, &s) == GMSPEC_OK);
  CHECK(take(s) == "60");
  REQUIRE(gmspec_expected_trace_from_partitions(1, 2, 4, &s) == GMSPEC_OK);
  CHECK(take(s) == "60");
}

TEST_CASE("trace moments and warnings") {
  double v = 0;
  REQUIRE(gmspec_empirical_trace_moment(2, 1, 10, 2, 1, 1, &v) == GMSPEC_OK);
  CHECK(std::abs(v - 8.0 * 7 / 100) < 1e-12);
  CHECK(gmspec_last_warning() == nullptr);
  std::vector<double> out(3, -1);
  REQUIRE(gmspec_empirical_trace_moments(2, 3, 3, 1, 1, 1, out.data()) == GMSPEC_OK);
  CHECK(gmspec_last_warning() != nullptr);
  CHECK(out == std::vector<double>{0, 0, 0});
}

TEST_CASE("spectrum sample handle") {
  gmspec_spectrum_sample* s = nullptr;
  REQUIRE(gmspec_spectrum_sample_create(2, 8, 2, 12, 4, 1, &s) == GMSPEC_OK);
  CHECK(gmspec_spectrum_sample_bin_count(s) == 12);
  double area = 0;
  for (size_t i = 0; i < 12; ++i) {
    double lo, hi, dens;
    uint64_t count;
    REQUIRE(gmspec_spectrum_sample_bin(s, i, &lo, &hi, &count, &dens) == GMSPEC_OK);
    area += (hi - lo) * dens;
  }
  CHECK(std::abs(area - 1) < 1e-12);
  CHECK(gmspec_spectrum_sample_bin(s, 12, nullptr, nullptr, nullptr, nullptr) ==
        GMSPEC_ERR_INVALID_ARGUMENT);
  const size_t n = gmspec_spectrum_sample_value_count(s);
  CHECK(n == 2 * 56);
  std::vector<double> vals(n);
  REQUIRE(gmspec_spectrum_sample_values(s, vals.data(), n) == GMSPEC_OK);
  CHECK(std::is_sorted(vals.begin(), vals.end()));
  CHECK(gmspec_spectrum_sample_values(s, vals.data(), n - 1) == GMSPEC_ERR_INVALID_ARGUMENT);
  double ks = 0;
  REQUIRE(gmspec_spectrum_sample_ks_z(s, &ks) == GMSPEC_OK);
  CHECK(ks > 0);
  CHECK(ks < 1);
  CHECK(gmspec_spectrum_sample_warning(s) == nullptr);
  gmspec_spectrum_sample_free(s);
}

TEST_CASE("dominance handle") {
  gmspec_enumeration_options o;
  gmspec_enumeration_options_init(&o);
  o.keep_partitions = 1;
  o.check_structure = 1;
  gmspec_dominance* d = nullptr;
  REQUIRE(gmspec_enumerate_dominant(1, 3, &o, &d) == GMSPEC_OK);
  CHECK(gmspec_dominance_count(d) == 5);
  CHECK(gmspec_dominance_partition_count(d) == 5);
  CHECK(gmspec_dominance_violation_count(d) == 0);
  CHECK(gmspec_dominance_leaves_visited(d) >= 5);
  char* s = nullptr;
  REQUIRE(gmspec_dominance_partition_json(d, 0, &s) == GMSPEC_OK);
  CHECK(take(s).rfind("[[\"a_1_1\"", 0) == 0);
  CHECK(gmspec_dominance_partition_json(d, 5, &s) == GMSPEC_ERR_INVALID_ARGUMENT);
  gmspec_dominance_free(d);
  uint32_t edges = 0;
  REQUIRE(gmspec_min_nonzero_edge_count(2, 2, &edges) == GMSPEC_OK);
  CHECK(edges == 2);
}

TEST_CASE("densities and tables") {
  double a = 0;
  REQUIRE(gmspec_edge_constant(2, &a) == GMSPEC_OK);
  CHECK(std::abs(a * a - 6.75) < 1e-14);
  double re = 0, im = 0, f = 0;
  REQUIRE(gmspec_density_z_complex(1.0, &re, &im) == GMSPEC_OK);
  REQUIRE(gmspec_density_z(1.0, &f) == GMSPEC_OK);
  CHECK(std::abs(re - f) < 1e-12);
  double m3 = 0;
  REQUIRE(gmspec_density_z_moment(3, 0.1, &m3) == GMSPEC_OK);
  CHECK(std::abs(m3 - 12) < 1e-9);
  CHECK(gmspec_density_z_moment(3, 1.0, &m3) == GMSPEC_ERR_INVALID_ARGUMENT);
  double res = 1;
  REQUIRE(gmspec_z_ode_relative_residual(1.0, 1e-5, &res) == GMSPEC_OK);
  CHECK(res < 1e-6);
  double c = 0;
  REQUIRE(gmspec_cdf_z(a, &c) == GMSPEC_OK);
  CHECK(std::abs(c - 1) < 1e-12);

  gmspec_density_table* t = nullptr;
  REQUIRE(gmspec_solve_ode(3, 1e-2, GMSPEC_TAIL_FROBENIUS_TWO_TERM, 0, &t) == GMSPEC_OK);
  double k1 = 0, slope = 0, r = 0;
  REQUIRE(gmspec_density_table_moment(t, 1, &k1) == GMSPEC_OK);
  CHECK(std::abs(k1 - 1) < 0.03);
  REQUIRE(gmspec_density_table_exponent(t, GMSPEC_ENDPOINT_EDGE, 1e-2, 0.1, &slope) == GMSPEC_OK);
  CHECK(std::abs(slope - 0.5) < 0.05);
  REQUIRE(gmspec_density_table_residual(t, 3, 1.0, 2e-3, &r) == GMSPEC_OK);
  CHECK(r < 1e-3);
  std::vector<double> xs(5), fs(5);
  REQUIRE(gmspec_density_table_sample(t, 5, xs.data(), fs.data()) == GMSPEC_OK);
  CHECK(std::is_sorted(xs.begin(), xs.end()));
  CHECK(gmspec_density_table_normalization(t) > 0);
  gmspec_density_table_free(t);

  REQUIRE(gmspec_solve_ode(2, 1e-4, GMSPEC_TAIL_SQRT, 0, &t) == GMSPEC_OK);
  double sup = 1;
  REQUIRE(gmspec_density_table_sup_distance_z(t, 0.1, a - 0.01, &sup) == GMSPEC_OK);
  CHECK(sup < 1e-2);
  CHECK(gmspec_density_table_a(t) == a);
  gmspec_density_table_free(t);
}

TEST_CASE("verify through the C API") {
  gmspec_verify_options o;
  gmspec_verify_options_init(&o);
  o.suite = "combinatorics";
  char* json = nullptr;
  int passed = 0;
  REQUIRE(gmspec_verify(&o, &json, &passed) == GMSPEC_OK);
  CHECK(passed == 1);
  CHECK(take(json).find("\"checks\"") != std::string::npos);
  o.suite = "bogus";
  CHECK(gmspec_verify(&o, &json, &passed) == GMSPEC_ERR_INVALID_ARGUMENT);
}
