// gmspec command-line front end. Talks to the library only through gmspec.h.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmspec/gmspec.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 20240611;

// Thrown on a library error; carries the exit code.
struct Abort {
  int code;
};

int exit_code_for(gmspec_status s) {
  switch (s) {
    case GMSPEC_OK:
      return kExitOk;
    case GMSPEC_ERR_INVALID_ARGUMENT:
    case GMSPEC_ERR_UNSUPPORTED:
    case GMSPEC_ERR_INFEASIBLE:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

void check(gmspec_status s) {
  if (s == GMSPEC_OK) {
    if (const char* w = gmspec_last_warning()) std::cerr << "warning: " << w << '\n';
    return;
  }
  std::cerr << "error (" << gmspec_status_name(s) << "): " << gmspec_last_error() << '\n';
  throw Abort{exit_code_for(s)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  gmspec_string_free(s);
  return out;
}

// Shortest round-trip decimal form; independent of the C and C++ locales.
std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
  double v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

template <typename T>
using Handle = std::unique_ptr<T, void (*)(T*)>;

// Output sink: a file path, or "-" for stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) {
      std::cerr << "error: cannot open '" << path << "' for writing\n";
      throw Abort{kExitFailure};
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) {
      std::cerr << "error: write failed\n";
      throw Abort{kExitFailure};
    }
  }

 private:
  std::ofstream file_;
};

struct Common {
  unsigned threads = 0;
  std::uint64_t seed = kDefaultSeed;
};

void add_seed(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed (default: $GMSPEC_SEED, else 20240611)")
      ->envname("GMSPEC_SEED");
}

void print_seed(const Common& c) { std::cerr << "seed: " << c.seed << '\n'; }

// ---- subcommands

int run_count_formula(std::uint32_t m, std::uint32_t n) {
  char* s = nullptr;
  check(gmspec_generalized_catalan(m, n, &s));
  std::cout << take(s) << '\n';
  return kExitOk;
}

int run_gridwalks(std::uint32_t m, std::uint32_t n, bool compare) {
  char* s = nullptr;
  check(gmspec_gridwalk_count(m, n, &s));
  const std::string walks = take(s);
  std::cout << walks << '\n';
  if (!compare) return kExitOk;
  check(gmspec_generalized_catalan(m, n, &s));
  const std::string formula = take(s);
  if (walks == formula) return kExitOk;
  std::cerr << "mismatch: gridwalks " << walks << " vs formula " << formula << '\n';
  return kExitFailure;
}

struct DominantArgs {
  std::uint32_t m = 0;
  std::uint32_t q = 0;
  bool check_structure = false;
  bool allow_slow = false;
  std::string list;
};

int run_count_dominant(const DominantArgs& a, const Common& c) {
  gmspec_enumeration_options o;
  gmspec_enumeration_options_init(&o);
  o.threads = c.threads;
  o.check_structure = a.check_structure;
  o.keep_partitions = !a.list.empty();
  o.allow_slow = a.allow_slow;
  gmspec_dominance* raw = nullptr;
  check(gmspec_enumerate_dominant(a.m, a.q, &o, &raw));
  Handle<gmspec_dominance> d(raw, gmspec_dominance_free);

  std::cout << gmspec_dominance_count(d.get()) << '\n';
  if (!a.list.empty()) {
    Output out(a.list);
    for (std::size_t i = 0; i < gmspec_dominance_partition_count(d.get()); ++i) {
      char* s = nullptr;
      check(gmspec_dominance_partition_json(d.get(), i, &s));
      out.stream() << take(s) << '\n';
    }
    out.finish();
  }
  if (!a.check_structure) return kExitOk;
  const std::size_t bad = gmspec_dominance_violation_count(d.get());
  for (std::size_t i = 0; i < bad; ++i) {
    char* s = nullptr;
    check(gmspec_dominance_violation_json(d.get(), i, &s));
    std::cerr << "violation: " << take(s) << '\n';
  }
  std::cerr << "structure: " << gmspec_dominance_count(d.get()) << " dominant graphs, " << bad
            << " violations\n";
  return bad == 0 ? kExitOk : kExitFailure;
}

struct TraceArgs {
  std::uint32_t m = 2;
  std::uint32_t n = 0;
  std::uint32_t q_max = 4;
  std::uint32_t reps = 10;
  std::string out = "-";
};

int run_trace_moments(const TraceArgs& a, const Common& c) {
  print_seed(c);
  std::vector<double> emp(a.q_max);
  check(gmspec_empirical_trace_moments(a.m, a.n, a.q_max, a.reps, c.seed, c.threads, emp.data()));
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::uint32_t q = 1; q <= a.q_max; ++q) {
    char* s = nullptr;
    check(gmspec_generalized_catalan(a.m, q, &s));
    const double theory = to_double(take(s));
    nlohmann::ordered_json e;
    e["q"] = q;
    e["empirical"] = emp[q - 1];
    e["theoretical"] = theory;
    e["rel_err"] = std::abs(emp[q - 1] - theory) / theory;
    arr.push_back(std::move(e));
  }
  Output out(a.out);
  out.stream() << arr.dump(2) << '\n';
  out.finish();
  return kExitOk;
}

struct SampleArgs {
  std::uint32_t m = 2;
  std::uint32_t n = 0;
  std::uint32_t reps = 10;
  std::uint32_t bins = 50;
  std::string out = "-";
};

int run_sample(const SampleArgs& a, const Common& c) {
  print_seed(c);
  gmspec_spectrum_sample* raw = nullptr;
  check(gmspec_spectrum_sample_create(a.m, a.n, a.reps, a.bins, c.seed, c.threads, &raw));
  Handle<gmspec_spectrum_sample> s(raw, gmspec_spectrum_sample_free);
  Output out(a.out);
  auto& os = out.stream();
  os << "bin_lo,bin_hi,count,density\n";
  for (std::size_t i = 0; i < gmspec_spectrum_sample_bin_count(s.get()); ++i) {
    double lo = 0, hi = 0, dens = 0;
    std::uint64_t count = 0;
    check(gmspec_spectrum_sample_bin(s.get(), i, &lo, &hi, &count, &dens));
    os << num(lo) << ',' << num(hi) << ',' << count << ',' << num(dens) << '\n';
  }
  out.finish();
  if (a.m == 2 && gmspec_spectrum_sample_value_count(s.get()) > 0) {
    double ks = 0;
    check(gmspec_spectrum_sample_ks_z(s.get(), &ks));
    std::cerr << "sup-CDF distance to the m = 2 limit: " << num(ks) << '\n';
  }
  return kExitOk;
}

struct DensityArgs {
  std::string family;
  bool closed_form = false;
  bool ode = false;
  double eps = 1e-4;
  std::string tail = "frobenius2";
  std::uint32_t grid = 200;
  std::string out = "-";
};

gmspec_tail_model parse_tail(const std::string& t) {
  if (t == "sqrt") return GMSPEC_TAIL_SQRT;
  if (t == "two-term-209") return GMSPEC_TAIL_LEADING_ORDER_TWO_TERM;
  return GMSPEC_TAIL_FROBENIUS_TWO_TERM;
}

std::uint32_t family_m(const std::string& family) { return family == "z" ? 2 : 3; }

int run_density(const DensityArgs& a) {
  const std::uint32_t m = family_m(a.family);
  const bool use_ode = a.ode || (!a.closed_form && m == 3);
  if (!use_ode && m == 3) {
    std::cerr << "error: no closed form is known for --family z3; use --ode\n";
    return kExitUsage;
  }
  std::vector<double> xs(a.grid), fs(a.grid);
  if (use_ode) {
    gmspec_density_table* raw = nullptr;
    check(gmspec_solve_ode(m, a.eps, parse_tail(a.tail), 0, &raw));
    Handle<gmspec_density_table> t(raw, gmspec_density_table_free);
    check(gmspec_density_table_sample(t.get(), a.grid, xs.data(), fs.data()));
  } else {
    double edge = 0;
    check(gmspec_edge_constant(m, &edge));
    for (std::uint32_t i = 0; i < a.grid; ++i) {
      xs[i] = edge * (i + 1) / (a.grid + 1.0);
      check(gmspec_density_z(xs[i], &fs[i]));
    }
  }
  Output out(a.out);
  out.stream() << "x,f\n";
  for (std::uint32_t i = 0; i < a.grid; ++i) out.stream() << num(xs[i]) << ',' << num(fs[i]) << '\n';
  out.finish();
  return kExitOk;
}

struct MomentsArgs {
  std::string family = "z";
  std::uint32_t k_max = 6;
  double tol = 1e-4;
  double split = 0.1;
  double eps = 1e-2;
};

int run_moments_check(const MomentsArgs& a) {
  const std::uint32_t m = family_m(a.family);
  Handle<gmspec_density_table> table(nullptr, gmspec_density_table_free);
  if (m == 3) {
    gmspec_density_table* raw = nullptr;
    check(gmspec_solve_ode(3, a.eps, GMSPEC_TAIL_FROBENIUS_TWO_TERM, 0, &raw));
    table.reset(raw);
  }
  bool ok = true;
  std::cout << "k,moment,expected,rel_err\n";
  for (std::uint32_t k = 0; k <= a.k_max; ++k) {
    char* s = nullptr;
    check(gmspec_generalized_catalan(m, k, &s));
    const double expected = to_double(take(s));
    double got = 0;
    if (m == 2)
      check(gmspec_density_z_moment(static_cast<int>(k), a.split, &got));
    else
      check(gmspec_density_table_moment(table.get(), static_cast<int>(k), &got));
    const double rel = std::abs(got - expected) / expected;
    if (!(rel < a.tol)) ok = false;
    std::cout << k << ',' << num(got) << ',' << num(expected) << ',' << num(rel) << '\n';
  }
  if (!ok) std::cerr << "moment check failed: relative error above " << num(a.tol) << '\n';
  return ok ? kExitOk : kExitFailure;
}

struct VerifyArgs {
  std::string suite = "all";
  bool allow_slow = false;
  bool mutate = false;
  double split = 0.1;
  std::string report;
};

int run_verify(const VerifyArgs& a, const Common& c) {
  print_seed(c);
  gmspec_verify_options o;
  gmspec_verify_options_init(&o);
  o.suite = a.suite.c_str();
  o.allow_slow = a.allow_slow;
  o.mutate_z3_fprime = a.mutate;
  o.split_fraction = a.split;
  o.threads = c.threads;
  o.seed = c.seed;
  char* s = nullptr;
  int passed = 0;
  check(gmspec_verify(&o, &s, &passed));
  const std::string json = take(s);
  const auto report = nlohmann::json::parse(json);
  for (const auto& chk : report["checks"]) {
    std::cout << (chk["passed"].get<bool>() ? "PASS " : "FAIL ")
              << chk["suite"].get<std::string>() << '/' << chk["name"].get<std::string>() << ": "
              << chk["detail"].get<std::string>() << '\n';
  }
  std::cout << (passed ? "all checks passed" : "some checks FAILED") << '\n';
  if (!a.report.empty()) {
    Output out(a.report);
    out.stream() << json << '\n';
    out.finish();
  }
  return passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::cout.imbue(std::locale::classic());
  std::cerr.imbue(std::locale::classic());

  CLI::App app{"Graph-matrix counting, spectra and density ODE toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", gmspec_version());
  Common common;
  app.add_option("--threads", common.threads, "Worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);

  auto positive = CLI::Range(1u, 1u << 30).description("INT>=1");
  auto fraction = CLI::Range(0.0, 1.0);
  std::function<int()> action;

  std::uint32_t cf_m = 0, cf_n = 0;
  auto* cf = app.add_subcommand("count-formula", "Print D(m,n) = binomial((m+1)n, n)/(mn+1)");
  cf->add_option("--m", cf_m, "Layer count m >= 1")->required()->check(positive);
  cf->add_option("--n", cf_n, "n >= 0")->required()->check(CLI::NonNegativeNumber);
  cf->callback([&] { action = [&] { return run_count_formula(cf_m, cf_n); }; });

  std::uint32_t gw_m = 0, gw_n = 0;
  bool gw_compare = false;
  auto* gw = app.add_subcommand("gridwalks", "Count lattice paths (0,0)->(n,mn) weakly below y = mx");
  gw->add_option("--m", gw_m, "m >= 1")->required()->check(positive);
  gw->add_option("--n", gw_n, "n >= 0")->required()->check(CLI::NonNegativeNumber);
  gw->add_flag("--compare", gw_compare, "Exit 1 unless the count equals D(m,n)");
  gw->callback([&] { action = [&] { return run_gridwalks(gw_m, gw_n, gw_compare); }; });

  DominantArgs da;
  auto* cd = app.add_subcommand("count-dominant", "Enumerate dominant constraint graphs");
  cd->add_option("--m", da.m, "m >= 1")->required()->check(positive);
  cd->add_option("--q", da.q, "q >= 1")->required()->check(positive);
  cd->add_flag("--check-structure", da.check_structure,
               "Evaluate structural predicates on every dominant graph; exit 1 on a violation");
  cd->add_option("--list", da.list, "Write partitions as JSON lines ('-' for stdout)");
  cd->add_flag("--allow-slow", da.allow_slow, "Raise the vertex limit from 12 to 16");
  cd->callback([&] { action = [&] { return run_count_dominant(da, common); }; });

  TraceArgs ta;
  auto* tm = app.add_subcommand("trace-moments", "Empirical normalised trace moments vs D(m,q)");
  tm->add_option("--m", ta.m, "m >= 1")->capture_default_str()->check(positive);
  tm->add_option("--n", ta.n, "Vertices")->required()->check(positive);
  tm->add_option("--q-max", ta.q_max, "Largest q")->capture_default_str()->check(positive);
  tm->add_option("--reps", ta.reps, "Replicates")->capture_default_str()->check(positive);
  tm->add_option("--out", ta.out, "JSON output ('-' for stdout)")->capture_default_str();
  add_seed(tm, common);
  tm->callback([&] { action = [&] { return run_trace_moments(ta, common); }; });

  SampleArgs sa;
  auto* sm = app.add_subcommand("sample", "Histogram of pooled singular values of M / n^{m/2}");
  sm->add_option("--m", sa.m, "m >= 1")->capture_default_str()->check(positive);
  sm->add_option("--n", sa.n, "Vertices")->required()->check(positive);
  sm->add_option("--reps", sa.reps, "Replicates")->capture_default_str()->check(positive);
  sm->add_option("--bins", sa.bins, "Histogram bins >= 10")
      ->capture_default_str()
      ->check(CLI::Range(10u, 1000000u));
  sm->add_option("--out", sa.out, "CSV output ('-' for stdout)")->capture_default_str();
  add_seed(sm, common);
  sm->callback([&] { action = [&] { return run_sample(sa, common); }; });

  DensityArgs dn;
  auto* de = app.add_subcommand("density", "Tabulate a limiting density as CSV x,f");
  de->add_option("--family", dn.family, "z (m = 2) or z3 (m = 3)")
      ->required()
      ->check(CLI::IsMember({"z", "z3"}));
  auto* cf_flag = de->add_flag("--closed-form", dn.closed_form, "Closed form (z only; default for z)");
  auto* ode_flag = de->add_flag("--ode", dn.ode, "Numerical ODE solution (default for z3)");
  cf_flag->excludes(ode_flag);
  de->add_option("--eps", dn.eps, "Distance from the edge where integration starts")
      ->capture_default_str()
      ->check(CLI::Range(1e-12, 0.5));
  de->add_option("--tail", dn.tail, "Edge model for z3: sqrt, frobenius2 or two-term-209")
      ->capture_default_str()
      ->check(CLI::IsMember({"sqrt", "frobenius2", "two-term-209"}));
  de->add_option("--grid", dn.grid, "Points x_i = a i/(N+1)")->capture_default_str()->check(positive);
  de->add_option("--out", dn.out, "CSV output ('-' for stdout)")->capture_default_str();
  de->callback([&] { action = [&] { return run_density(dn); }; });

  MomentsArgs ma;
  auto* mc = app.add_subcommand("moments-check", "Compare density moments with D(m,k)");
  mc->add_option("--family", ma.family, "z or z3")
      ->capture_default_str()
      ->check(CLI::IsMember({"z", "z3"}));
  mc->add_option("--k-max", ma.k_max, "Largest k")->capture_default_str()->check(CLI::Range(0u, 40u));
  mc->add_option("--tol", ma.tol, "Relative tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  mc->add_option("--split", ma.split, "Quadrature split as a fraction of a (z)")
      ->capture_default_str()
      ->check(fraction);
  mc->add_option("--eps", ma.eps, "ODE start offset from the edge (z3)")
      ->capture_default_str()
      ->check(CLI::Range(1e-12, 0.5));
  mc->callback([&] { action = [&] { return run_moments_check(ma); }; });

  VerifyArgs va;
  auto* ve = app.add_subcommand("verify", "Run the self-check suites");
  ve->add_option("--suite", va.suite, "combinatorics, graph_matrix, constraint_graphs, spectrum or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"combinatorics", "graph_matrix", "constraint_graphs", "spectrum", "all"}));
  ve->add_flag("--allow-slow", va.allow_slow, "Include long-running enumerations and samples");
  ve->add_flag("--mutate-z3-fprime", va.mutate, "Use 177x^2 - 192x as the m = 3 f' coefficient");
  ve->add_option("--split-fraction", va.split, "Quadrature split as a fraction of a")
      ->capture_default_str()
      ->check(fraction);
  ve->add_option("--report", va.report, "Write the JSON report ('-' for stdout)");
  add_seed(ve, common);
  ve->callback([&] { action = [&] { return run_verify(va, common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    std::cerr << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Abort& a) {
    return a.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
