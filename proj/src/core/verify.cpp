#include "gmspec/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "gmspec/combinatorics.hpp"
#include "gmspec/constraint_graphs.hpp"
#include "gmspec/error.hpp"
#include "gmspec/graph_matrix.hpp"
#include "gmspec/spectrum.hpp"

namespace gmspec::verify {

namespace comb = gmspec::combinatorics;
namespace cg = gmspec::constraints;
namespace gm = gmspec::graph;
namespace sp = gmspec::spectrum;

namespace {

// A check body returns a detail string and sets `ok`.
using Body = std::function<std::string(bool& ok)>;

class Runner {
 public:
  explicit Runner(Report& report) : report_(report) {}

  void run(const std::string& suite, const std::string& name, const Body& body) {
    Check c;
    c.suite = suite;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      bool ok = false;
      c.detail = body(ok);
      c.passed = ok;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
  }

 private:
  Report& report_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double to_double(const comb::BigInt& v) { return static_cast<double>(v); }

std::uint64_t dyck_bruteforce(std::uint32_t n) {
  std::uint64_t count = 0;
  const std::uint32_t len = 2 * n;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
    int h = 0;
    bool ok = true;
    for (std::uint32_t i = 0; i < len && ok; ++i) {
      h += ((bits >> i) & 1U) ? 1 : -1;
      ok = h >= 0;
    }
    if (ok && h == 0) ++count;
  }
  return count;
}

// ------------------------------------------------------------ combinatorics

void combinatorics_suite(Runner& r) {
  const std::string s = "combinatorics";
  r.run(s, "worked_values", [](bool& ok) {
    ok = comb::generalized_catalan(2, 0) == 1 && comb::generalized_catalan(2, 2) == 3 &&
         comb::generalized_catalan(1, 3) == 5 && comb::generalized_catalan(3, 2) == 4 &&
         comb::gridwalk_count(2, 1) == 1 && comb::gridwalk_count(2, 2) == 3 &&
         comb::gridwalk_count(2, 3) == 12;
    return std::string("D(2,0)=1, D(2,2)=3, D(1,3)=5, D(3,2)=4, walks(2,1..3)=1,3,12");
  });
  r.run(s, "gridwalk_matches_formula", [](bool& ok) {
    ok = true;
    std::string bad;
    for (std::uint32_t m = 1; m <= 4; ++m)
      for (std::uint32_t n = 0; n <= 10; ++n)
        if (comb::gridwalk_count(m, n) != comb::generalized_catalan(m, n)) {
          ok = false;
          bad += " (" + std::to_string(m) + "," + std::to_string(n) + ")";
        }
    return ok ? std::string("m<=4, n<=10 exact") : "mismatch at" + bad;
  });
  r.run(s, "recurrence_holds", [](bool& ok) {
    ok = true;
    std::size_t rows = 0;
    for (std::uint32_t m = 1; m <= 4; ++m)
      for (const auto& row : comb::recurrence_check(m, 8)) {
        ++rows;
        ok = ok && row.equal;
      }
    return std::to_string(rows) + " rows for m<=4, n<=8";
  });
  r.run(s, "ratio_products_reconstruct", [](bool& ok) {
    ok = true;
    for (std::uint32_t m : {2u, 3u}) {
      comb::BigRational acc = 1;
      for (std::uint32_t k = 1; k <= 10; ++k) {
        acc *= comb::moment_ratio(m, k).as_rational();
        ok = ok && acc == comb::BigRational(comb::generalized_catalan(m, k));
      }
    }
    return std::string("prod_{j<=k} ratio(m,j) = D(m,k) for m in {2,3}, k<=10");
  });
  r.run(s, "catalan_vs_dyck_paths", [](bool& ok) {
    ok = true;
    for (std::uint32_t n = 0; n <= 10; ++n)
      ok = ok && comb::generalized_catalan(1, n) == dyck_bruteforce(n);
    return std::string("D(1,n) equals Dyck path counts for n<=10");
  });
  r.run(s, "ratio_limit_is_edge_squared", [](bool& ok) {
    // ratio(m,k) = a^2 - c_m/k + O(1/k^2), c_2 = 81/8, c_3 = 128/9
    const double k = 1e5;
    const double g2 = comb::moment_ratio(2, 100000).to_double() - 27.0 / 4.0;
    const double g3 = comb::moment_ratio(3, 100000).to_double() - 256.0 / 27.0;
    ok = std::abs(g2) < 1e-3 && std::abs(g3) < 1e-3 && std::abs(-g2 * k - 81.0 / 8.0) < 1e-3 &&
         std::abs(-g3 * k - 128.0 / 9.0) < 1e-3;
    return "k=1e5: ratio(2,k)-27/4 = " + fmt(g2) + ", ratio(3,k)-256/27 = " + fmt(g3);
  });
}

// -------------------------------------------------------------- graph matrix

double q1_formula(std::uint32_t m, std::uint32_t n) {
  double v = 1.0;
  for (std::uint32_t j = m; j <= 2 * m - 1; ++j) v *= static_cast<double>(n - j) / n;
  return v;
}

void graph_matrix_suite(Runner& r, const Options& o) {
  const std::string s = "graph_matrix";
  r.run(s, "q1_moment_exact", [&](bool& ok) {
    ok = true;
    double worst = 0.0;
    for (std::uint32_t m : {1u, 2u, 3u})
      for (std::uint32_t n : {10u, 20u}) {
        const double e = gm::empirical_trace_moment(m, 1, n, 2, o.seed, o.threads);
        worst = std::max(worst, std::abs(e - q1_formula(m, n)));
      }
    ok = worst <= 1e-12;
    return "max |error| = " + fmt(worst) + " (seed " + std::to_string(o.seed) + ")";
  });
  r.run(s, "q1_moment_svd_route", [&](bool& ok) {
    double worst = 0.0;
    for (std::uint32_t m : {1u, 2u, 3u})
      for (std::uint32_t n : {10u, 20u}) {
        if (gm::matrix_dimension(n, m) > 2000) continue;
        const double e = gm::empirical_trace_moments(m, n, 1, 2, o.seed, o.threads).moments[0];
        worst = std::max(worst, std::abs(e - q1_formula(m, n)) / q1_formula(m, n));
      }
    ok = worst <= 1e-10;
    return "max relative error = " + fmt(worst) + " over sizes with r <= 2000";
  });
  r.run(s, "trace_svd_vs_matrix_power", [&](bool& ok) {
    double worst = 0.0;
    for (std::uint32_t m : {1u, 2u})
      for (std::uint32_t n : {6u, 8u}) {
        const auto g = gm::sample_graph(n, o.seed + n);
        const auto mat = gm::build_matrix(gm::make_multi_z_shape(m), g);
        const auto sv = gm::singular_values(mat, 1.0);
        for (std::uint32_t q = 1; q <= 3; ++q) {
          double tr = 0.0;
          for (double v : sv) tr += std::pow(v * v, q);
          const double exact = to_double(gm::trace_power_exact(mat, q));
          worst = std::max(worst, std::abs(tr - exact) / exact);
        }
      }
    ok = worst <= 1e-8;
    return "max relative difference = " + fmt(worst);
  });
  r.run(s, "svd_deterministic", [&](bool& ok) {
    const auto a = gm::empirical_spectrum(2, 10, 2, 10, o.seed, o.threads);
    const auto b = gm::empirical_spectrum(2, 10, 2, 10, o.seed, o.threads);
    ok = a.replicates == b.replicates;
    return std::string("repeat run with seed ") + std::to_string(o.seed);
  });
  r.run(s, "histogram_unit_area", [&](bool& ok) {
    const auto smp = gm::empirical_spectrum(2, 12, 3, 40, o.seed, o.threads);
    const double area = smp.histogram.integral();
    ok = std::abs(area - 1.0) <= 1e-12;
    return "area - 1 = " + fmt(area - 1.0);
  });
  r.run(s, "monte_carlo_q2_vs_exact_expectation", [&](bool& ok) {
    const std::uint32_t n = 20;
    const double emp = gm::empirical_trace_moment(2, 2, n, 40, o.seed, o.threads);
    comb::BigRational exact(cg::expected_trace_from_partitions(2, 2, n));
    exact /= comb::BigInt(gm::matrix_dimension(n, 2)) * n * n * n * n;
    const double ex = static_cast<double>(exact);
    const double rel = std::abs(emp - ex) / ex;
    ok = rel < 0.05;
    return "n=20, reps=40: empirical " + fmt(emp) + ", exact E " + fmt(ex) + ", rel " + fmt(rel) +
           " (seed " + std::to_string(o.seed) + ")";
  });
  r.run(s, "spectrum_cdf_distance_decreases", [&](bool& ok) {
    std::vector<std::uint32_t> sizes = {20, 30};
    std::uint32_t reps = 10;
    if (o.allow_slow) {
      sizes.push_back(40);
      reps = 30;
    }
    std::vector<double> d;
    for (auto n : sizes) {
      const auto smp = gm::empirical_spectrum(2, n, reps, 50, o.seed, o.threads);
      const auto pooled = smp.pooled_ascending();
      d.push_back(sp::kolmogorov_distance_z(pooled));
    }
    ok = true;
    for (std::size_t i = 1; i < d.size(); ++i) ok = ok && d[i] < d[i - 1];
    if (o.allow_slow) ok = ok && d.back() < 0.08;
    std::string detail = "sup-CDF distances";
    for (std::size_t i = 0; i < d.size(); ++i)
      detail += " n=" + std::to_string(sizes[i]) + ":" + fmt(d[i]);
    return detail + " (reps " + std::to_string(reps) + ", seed " + std::to_string(o.seed) + ")";
  });
}

// --------------------------------------------------------- constraint graphs

void constraint_suite(Runner& r, const Options& o) {
  const std::string s = "constraint_graphs";
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sizes = {
      {1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 1}, {2, 2}, {2, 3}, {3, 2}};
  if (o.allow_slow) sizes.emplace_back(2, 4);

  std::vector<cg::DominanceReport> reports;
  r.run(s, "dominant_counts_match_formula", [&](bool& ok) {
    ok = true;
    std::string detail;
    cg::EnumerationOptions eo;
    eo.threads = o.threads == 0 ? 1 : o.threads;
    eo.check_structure = true;
    eo.keep_partitions = true;
    eo.allow_slow = o.allow_slow;
    for (auto [m, q] : sizes) {
      reports.push_back(cg::enumerate_dominant(m, q, eo));
      const auto expect = comb::generalized_catalan(m, q);
      const bool eq = expect == reports.back().dominant_count;
      ok = ok && eq;
      detail += "(" + std::to_string(m) + "," + std::to_string(q) +
                ")=" + std::to_string(reports.back().dominant_count) + (eq ? " " : "! ");
    }
    return detail;
  });
  r.run(s, "dominant_structure_predicates", [&](bool& ok) {
    std::size_t graphs = 0, violations = 0;
    std::string first;
    for (const auto& rep : reports) {
      graphs += rep.partitions.size();
      violations += rep.violations.size();
      if (first.empty() && !rep.violations.empty()) first = rep.violations.front().rendered;
    }
    ok = !reports.empty() && violations == 0;
    return std::to_string(graphs) + " dominant graphs, " + std::to_string(violations) +
           " violations" + (first.empty() ? "" : "; first: " + first);
  });
  r.run(s, "dominant_isolated_vertices", [&](bool& ok) {
    ok = !reports.empty();
    for (const auto& rep : reports) {
      if (rep.q < 2) continue;
      for (const auto& p : rep.partitions) {
        std::uint32_t singletons = 0;
        for (const auto& b : p.blocks()) singletons += b.size() == 1;
        ok = ok && singletons >= 2 * rep.m;
      }
    }
    return std::string("every dominant graph with q >= 2 has >= 2m singleton blocks");
  });
  r.run(s, "minimum_nonzero_edge_count", [&](bool& ok) {
    ok = true;
    std::string detail;
    for (auto [m, q] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}, {3, 2}}) {
      const auto e = cg::min_nonzero_edge_count(m, q);
      ok = ok && e == m * (q - 1);
      detail += "(" + std::to_string(m) + "," + std::to_string(q) + ")=" + std::to_string(e) + " ";
    }
    return detail;
  });
  r.run(s, "tiny_trace_identity", [](bool& ok) {
    const auto brute = gm::exact_expected_trace_bruteforce(1, 2, 4);
    const auto sum = cg::expected_trace_from_partitions(1, 2, 4);
    ok = brute == comb::BigRational(sum);
    std::ostringstream os;
    os << "m=1, q=2, n=4: average over 64 graphs " << brute << ", sum_C N(C) val(C) " << sum;
    return os.str();
  });
}

// ------------------------------------------------------------------ spectrum

void spectrum_suite(Runner& r, const Options& o) {
  const std::string s = "spectrum";
  const double a = sp::kEdgeZ;
  sp::QuadratureOptions qo;
  qo.split_fraction = o.split_fraction;

  r.run(s, "edge_constants", [](bool& ok) {
    const auto e2 = sp::edge_constants(2), e3 = sp::edge_constants(3);
    const double d2 = std::abs(e2.a * e2.a - 27.0 / 4.0), d3 = std::abs(e3.a * e3.a - 256.0 / 27.0);
    ok = d2 < 1e-14 && d3 < 1e-14;
    return "|a2^2-27/4| = " + fmt(d2) + ", |a3^2-256/27| = " + fmt(d3);
  });
  std::vector<double> moments;
  r.run(s, "z_density_moments", [&](bool& ok) {
    double worst = 0.0;
    for (int k = 0; k <= 6; ++k) {
      moments.push_back(sp::moment_of_density(sp::density_z, a, k, qo));
      const double d = to_double(comb::generalized_catalan(2, static_cast<std::uint32_t>(k)));
      worst = std::max(worst, std::abs(moments.back() - d) / d);
    }
    ok = worst < 1e-4;
    return "k=0..6, max relative error " + fmt(worst) + " (split " + fmt(o.split_fraction) + "a)";
  });
  r.run(s, "z_moment_recurrence", [&](bool& ok) {
    ok = moments.size() == 7;
    double worst = 0.0;
    for (int k = 0; ok && k <= 5; ++k) {
      const double lhs = (2.0 * k + 3) * (2.0 * k + 2) * moments[k + 1];
      const double rhs = 3.0 * (3.0 * k + 2) * (3.0 * k + 1) * moments[k];
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    ok = ok && worst < 1e-3;
    return "max relative defect " + fmt(worst);
  });
  r.run(s, "z_dual_form_agreement", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = 0.01 + (a - 0.02) * i / 999.0;
      const auto c = sp::density_z_complex(x);
      worst = std::max({worst, std::abs(c.real() - sp::density_z(x)), std::abs(c.imag())});
    }
    ok = worst < 1e-12;
    return "max |complex - real| = " + fmt(worst);
  });
  r.run(s, "z_density_nonnegative", [&](bool& ok) {
    ok = true;
    for (int i = 0; i < 1000; ++i) ok = ok && sp::density_z(0.001 + (a - 0.001) * i / 1000.0) >= 0.0;
    return std::string("1000 points on (0.001, a)");
  });
  r.run(s, "z_ode_residual", [&](bool& ok) {
    const auto sys = sp::ode_system_z();
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = a * (0.05 + 0.9 * i / 200.0);
      const double h = 1e-5 * x;
      const double f2 = (sp::density_z_derivative(x + h) - sp::density_z_derivative(x - h)) / (2 * h);
      const double d[] = {sp::density_z(x), sp::density_z_derivative(x), f2};
      worst = std::max(worst, std::abs(sp::ode_residual(sys, d, x)) / sp::ode_residual_scale(sys, d, x));
    }
    ok = worst < 1e-6;
    return "max relative residual on [0.05a, 0.95a] = " + fmt(worst);
  });
  r.run(s, "z_ode_solution_converges", [&](bool& ok) {
    std::vector<double> d;
    for (double eps : {1e-2, 1e-3, 1e-4})
      d.push_back(sp::sup_distance_to_z(sp::solve_ode_z(eps), 0.1, a - 0.01));
    ok = d[1] < d[0] && d[2] < d[1] && d[2] < 1e-2;
    return "sup distance on [0.1, a-0.01]: " + fmt(d[0]) + ", " + fmt(d[1]) + ", " + fmt(d[2]);
  });
  r.run(s, "z_ode_solution_moments", [&](bool& ok) {
    const auto t = sp::solve_ode_z(1e-3);
    double worst = 0.0;
    for (int k = 0; k <= 2; ++k) {
      const double d = to_double(comb::generalized_catalan(2, static_cast<std::uint32_t>(k)));
      worst = std::max(worst, std::abs(t.moment(k) - d));
    }
    ok = worst < 1e-2;
    return "eps=1e-3, max |moment - D_k| for k<=2 = " + fmt(worst);
  });

  const sp::OdeSystem z3 = o.mutate_z3_fprime ? sp::ode_system_z3_mutated() : sp::ode_system_z3();
  r.run(s, "z3_ode_solution_moments", [&](bool& ok) {
    const auto t = sp::solve_ode(z3, 1e-2, sp::TailModel::kFrobeniusTwoTerm);
    const double m0 = t.moment(0), m1 = t.moment(1), m2 = t.moment(2);
    const double mq = sp::moment_of_density([&](double x) { return t.eval(x); }, z3.a, 1, qo);
    ok = std::abs(m0 - 1.0) < 1e-8 && std::abs(m1 - 1.0) < 0.03 && std::abs(m2 - 4.0) / 4.0 < 0.05 &&
         std::abs(mq - m1) < 1e-6;
    return z3.name + ", eps=1e-2: k=0 " + fmt(m0) + ", k=1 " + fmt(m1) + ", k=2 " + fmt(m2) +
           ", k=1 by split quadrature " + fmt(mq);
  });
  r.run(s, "z3_edge_exponent", [&](bool& ok) {
    const auto t = sp::solve_ode(z3, 1e-2, sp::TailModel::kFrobeniusTwoTerm);
    const double e = sp::local_exponent(t, sp::Endpoint::kEdge, {1e-2, 0.1});
    ok = std::abs(e - 0.5) <= 0.05;
    return "log-log slope on (a-0.1, a-eps) = " + fmt(e);
  });
  r.run(s, "z3_table_residual", [&](bool& ok) {
    const auto t = sp::solve_ode(z3, 1e-2, sp::TailModel::kFrobeniusTwoTerm);
    double worst = 0.0;
    for (int i = 0; i <= 50; ++i)
      worst = std::max(worst, sp::table_relative_residual(t, z3, z3.a * (0.1 + 0.8 * i / 50.0), 2e-3));
    ok = worst < 1e-3;
    return "finite-difference relative residual on [0.1a, 0.9a] = " + fmt(worst);
  });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"combinatorics", "graph_matrix",
                                                 "constraint_graphs", "spectrum", "all"};
  return names;
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = options.suite;
  j["seed"] = options.seed;
  j["allow_slow"] = options.allow_slow;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["suite"] = c.suite;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["detail"] = c.detail;
    e["seconds"] = c.seconds;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2);
}

Report verify_all(const Options& options) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), options.suite) == names.end())
    throw InvalidArgument("unknown verify suite '" + options.suite + "'");
  if (!(options.split_fraction > 0.0 && options.split_fraction < 1.0))
    throw InvalidArgument("split fraction must lie in (0, 1)");
  Report report;
  report.options = options;
  Runner runner(report);
  const bool all = options.suite == "all";
  if (all || options.suite == "combinatorics") combinatorics_suite(runner);
  if (all || options.suite == "graph_matrix") graph_matrix_suite(runner, options);
  if (all || options.suite == "constraint_graphs") constraint_suite(runner, options);
  if (all || options.suite == "spectrum") spectrum_suite(runner, options);
  return report;
}

}  // namespace gmspec::verify
