#include "gmspec/gmspec.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmspec/combinatorics.hpp"
#include "gmspec/constraint_graphs.hpp"
#include "gmspec/error.hpp"
#include "gmspec/graph_matrix.hpp"
#include "gmspec/spectrum.hpp"
#include "gmspec/verify.hpp"

namespace cb = gmspec::combinatorics;
namespace gm = gmspec::graph;
namespace cg = gmspec::constraints;
namespace sp = gmspec::spectrum;

struct gmspec_graph {
  gm::RandomGraph graph;
};

struct gmspec_spectrum_sample {
  gm::SpectrumSample sample;
  std::vector<double> pooled;
};

struct gmspec_dominance {
  cg::HGraph h;
  cg::DominanceReport report;
};

struct gmspec_density_table {
  sp::DensityTable table;
};

namespace {

thread_local std::string t_error;
thread_local std::optional<std::string> t_warning;

gmspec_status fail(gmspec_status status, const char* what) {
  t_error = what;
  return status;
}

// Runs body, mapping exceptions to status codes. body returns void.
template <typename Body>
gmspec_status guard(Body&& body) {
  t_warning.reset();
  try {
    body();
    t_error.clear();
    return GMSPEC_OK;
  } catch (const gmspec::InvalidArgument& e) {
    return fail(GMSPEC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const gmspec::Unsupported& e) {
    return fail(GMSPEC_ERR_UNSUPPORTED, e.what());
  } catch (const gmspec::Infeasible& e) {
    return fail(GMSPEC_ERR_INFEASIBLE, e.what());
  } catch (const gmspec::NumericalFailure& e) {
    return fail(GMSPEC_ERR_NUMERICAL, e.what());
  } catch (const gmspec::VerificationFailure& e) {
    return fail(GMSPEC_ERR_VERIFICATION, e.what());
  } catch (const gmspec::Error& e) {
    return fail(GMSPEC_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GMSPEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GMSPEC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GMSPEC_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw gmspec::InvalidArgument(what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sp::TailModel tail_from(gmspec_tail_model tail) {
  switch (tail) {
    case GMSPEC_TAIL_SQRT:
      return sp::TailModel::kSquareRoot;
    case GMSPEC_TAIL_FROBENIUS_TWO_TERM:
      return sp::TailModel::kFrobeniusTwoTerm;
    case GMSPEC_TAIL_LEADING_ORDER_TWO_TERM:
      return sp::TailModel::kLeadingOrderTwoTerm;
  }
  throw gmspec::InvalidArgument("unknown tail model");
}

sp::OdeSystem system_for(std::uint32_t m, bool mutate) {
  if (m == 2) return sp::ode_system_z();
  if (m == 3) return mutate ? sp::ode_system_z3_mutated() : sp::ode_system_z3();
  throw gmspec::Unsupported("no ODE is known for m = " + std::to_string(m));
}

nlohmann::json blocks_json(const cg::HGraph& h, const cg::ConstraintPartition& c) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& block : c.blocks()) {
    nlohmann::json b = nlohmann::json::array();
    for (auto v : block) b.push_back(h.label(v));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

extern "C" {

const char* gmspec_version(void) { return "0.1.0"; }

const char* gmspec_status_name(gmspec_status status) {
  switch (status) {
    case GMSPEC_OK:
      return "ok";
    case GMSPEC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case GMSPEC_ERR_UNSUPPORTED:
      return "unsupported";
    case GMSPEC_ERR_INFEASIBLE:
      return "infeasible";
    case GMSPEC_ERR_NUMERICAL:
      return "numerical failure";
    case GMSPEC_ERR_VERIFICATION:
      return "verification failure";
    case GMSPEC_ERR_IO:
      return "i/o error";
    case GMSPEC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* gmspec_last_error(void) { return t_error.c_str(); }

const char* gmspec_last_warning(void) { return t_warning ? t_warning->c_str() : nullptr; }

void gmspec_string_free(char* s) { std::free(s); }

// ---- combinatorics

gmspec_status gmspec_generalized_catalan(uint32_t m, uint32_t n, char** out_decimal) {
  return guard([&] {
    require(out_decimal, "null output pointer");
    *out_decimal = dup(cb::to_string(cb::generalized_catalan(m, n)));
  });
}

gmspec_status gmspec_gridwalk_count(uint32_t m, uint32_t n, char** out_decimal) {
  return guard([&] {
    require(out_decimal, "null output pointer");
    *out_decimal = dup(cb::to_string(cb::gridwalk_count(m, n)));
  });
}

gmspec_status gmspec_moment_ratio(uint32_t m, uint32_t k, char** out_numerator,
                                  char** out_denominator) {
  return guard([&] {
    require(out_numerator && out_denominator, "null output pointer");
    const auto r = cb::moment_ratio(m, k);
    char* num = dup(cb::to_string(r.numerator));
    try {
      *out_denominator = dup(cb::to_string(r.denominator));
    } catch (...) {
      std::free(num);
      throw;
    }
    *out_numerator = num;
  });
}

gmspec_status gmspec_recurrence_check(uint32_t m, uint32_t n_max, int* out_all_equal) {
  return guard([&] {
    require(out_all_equal, "null output pointer");
    bool all = true;
    for (const auto& row : cb::recurrence_check(m, n_max)) all = all && row.equal;
    *out_all_equal = all ? 1 : 0;
  });
}

// ---- graphs

gmspec_status gmspec_graph_sample(uint32_t n, uint64_t seed, gmspec_graph** out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = new gmspec_graph{gm::sample_graph(n, seed)};
  });
}

gmspec_status gmspec_graph_from_pattern(uint32_t n, uint64_t pattern, gmspec_graph** out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = new gmspec_graph{gm::RandomGraph::from_pattern(n, pattern)};
  });
}

void gmspec_graph_free(gmspec_graph* g) { delete g; }

uint32_t gmspec_graph_n(const gmspec_graph* g) { return g ? g->graph.n() : 0; }

gmspec_status gmspec_graph_edge(const gmspec_graph* g, uint32_t i, uint32_t j, int* out) {
  return guard([&] {
    require(g && out, "null pointer argument");
    *out = g->graph.edge(i, j);
  });
}

gmspec_status gmspec_matrix_entry(const gmspec_graph* g, uint32_t m, const uint32_t* row,
                                  const uint32_t* col, int* out) {
  return guard([&] {
    require(g && row && col && out, "null pointer argument");
    require(m >= 1, "m must be at least 1");
    const auto shape = gm::make_multi_z_shape(m);
    *out = gm::matrix_entry(shape, g->graph, {row, m}, {col, m});
  });
}

gmspec_status gmspec_trace_power_exact(const gmspec_graph* g, uint32_t m, uint32_t q,
                                       char** out_decimal) {
  return guard([&] {
    require(g && out_decimal, "null pointer argument");
    require(m >= 1 && q >= 1, "m and q must be at least 1");
    const auto mat = gm::build_matrix(gm::make_multi_z_shape(m), g->graph);
    *out_decimal = dup(cb::to_string(gm::trace_power_exact(mat, q)));
  });
}

gmspec_status gmspec_exact_expected_trace(uint32_t m, uint32_t q, uint32_t n,
                                          char** out_rational) {
  return guard([&] {
    require(out_rational, "null output pointer");
    *out_rational = dup(gm::exact_expected_trace_bruteforce(m, q, n).str());
  });
}

gmspec_status gmspec_empirical_trace_moment(uint32_t m, uint32_t q, uint32_t n, uint32_t reps,
                                            uint64_t seed, uint32_t threads, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = gm::empirical_trace_moment(m, q, n, reps, seed, threads);
    if (n < 2 * m) t_warning = "n < 2m: every matrix entry is 0";
  });
}

gmspec_status gmspec_empirical_trace_moments(uint32_t m, uint32_t n, uint32_t q_max, uint32_t reps,
                                             uint64_t seed, uint32_t threads, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    auto tm = gm::empirical_trace_moments(m, n, q_max, reps, seed, threads);
    for (std::size_t i = 0; i < tm.moments.size(); ++i) out[i] = tm.moments[i];
    t_warning = std::move(tm.warning);
  });
}

gmspec_status gmspec_spectrum_sample_create(uint32_t m, uint32_t n, uint32_t reps, uint32_t bins,
                                            uint64_t seed, uint32_t threads,
                                            gmspec_spectrum_sample** out) {
  return guard([&] {
    require(out, "null output pointer");
    auto s = gm::empirical_spectrum(m, n, reps, bins, seed, threads);
    auto pooled = s.pooled_ascending();
    t_warning = s.warning;
    *out = new gmspec_spectrum_sample{std::move(s), std::move(pooled)};
  });
}

void gmspec_spectrum_sample_free(gmspec_spectrum_sample* s) { delete s; }

size_t gmspec_spectrum_sample_bin_count(const gmspec_spectrum_sample* s) {
  return s ? s->sample.histogram.bins() : 0;
}

gmspec_status gmspec_spectrum_sample_bin(const gmspec_spectrum_sample* s, size_t i, double* lo,
                                         double* hi, uint64_t* count, double* density) {
  return guard([&] {
    require(s, "null sample");
    const auto& hist = s->sample.histogram;
    require(i < hist.bins(), "bin index out of range");
    if (lo) *lo = hist.edges[i];
    if (hi) *hi = hist.edges[i + 1];
    if (count) *count = hist.counts[i];
    if (density) *density = hist.densities[i];
  });
}

size_t gmspec_spectrum_sample_value_count(const gmspec_spectrum_sample* s) {
  return s ? s->pooled.size() : 0;
}

gmspec_status gmspec_spectrum_sample_values(const gmspec_spectrum_sample* s, double* out,
                                            size_t capacity) {
  return guard([&] {
    require(s && out, "null pointer argument");
    require(capacity >= s->pooled.size(), "output buffer too small");
    std::copy(s->pooled.begin(), s->pooled.end(), out);
  });
}

gmspec_status gmspec_spectrum_sample_ks_z(const gmspec_spectrum_sample* s, double* out) {
  return guard([&] {
    require(s && out, "null pointer argument");
    require(!s->pooled.empty(), "empty sample");
    *out = sp::kolmogorov_distance_z(s->pooled);
  });
}

const char* gmspec_spectrum_sample_warning(const gmspec_spectrum_sample* s) {
  return s && s->sample.warning ? s->sample.warning->c_str() : nullptr;
}

// ---- constraint graphs

void gmspec_enumeration_options_init(gmspec_enumeration_options* options) {
  if (!options) return;
  options->threads = 0;
  options->check_structure = 0;
  options->keep_partitions = 0;
  options->allow_slow = 0;
}

gmspec_status gmspec_enumerate_dominant(uint32_t m, uint32_t q,
                                        const gmspec_enumeration_options* options,
                                        gmspec_dominance** out) {
  return guard([&] {
    require(out, "null output pointer");
    gmspec_enumeration_options o;
    gmspec_enumeration_options_init(&o);
    if (options) o = *options;
    cg::EnumerationOptions eo;
    eo.threads = o.threads;
    eo.check_structure = o.check_structure != 0;
    eo.keep_partitions = o.keep_partitions != 0;
    eo.allow_slow = o.allow_slow != 0;
    auto report = cg::enumerate_dominant(m, q, eo);
    *out = new gmspec_dominance{cg::build_H(m, q), std::move(report)};
  });
}

void gmspec_dominance_free(gmspec_dominance* d) { delete d; }

uint64_t gmspec_dominance_count(const gmspec_dominance* d) {
  return d ? d->report.dominant_count : 0;
}

uint64_t gmspec_dominance_leaves_visited(const gmspec_dominance* d) {
  return d ? d->report.leaves_visited : 0;
}

size_t gmspec_dominance_partition_count(const gmspec_dominance* d) {
  return d ? d->report.partitions.size() : 0;
}

gmspec_status gmspec_dominance_partition_json(const gmspec_dominance* d, size_t i,
                                              char** out_json) {
  return guard([&] {
    require(d && out_json, "null pointer argument");
    require(i < d->report.partitions.size(), "partition index out of range");
    *out_json = dup(blocks_json(d->h, d->report.partitions[i]).dump());
  });
}

size_t gmspec_dominance_violation_count(const gmspec_dominance* d) {
  return d ? d->report.violations.size() : 0;
}

gmspec_status gmspec_dominance_violation_json(const gmspec_dominance* d, size_t i,
                                              char** out_json) {
  return guard([&] {
    require(d && out_json, "null pointer argument");
    require(i < d->report.violations.size(), "violation index out of range");
    const auto& v = d->report.violations[i];
    nlohmann::ordered_json j;
    j["predicates"] = v.predicates;
    j["partition"] = blocks_json(d->h, v.partition);
    *out_json = dup(j.dump());
  });
}

gmspec_status gmspec_min_nonzero_edge_count(uint32_t m, uint32_t q, uint32_t* out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = cg::min_nonzero_edge_count(m, q);
  });
}

gmspec_status gmspec_expected_trace_from_partitions(uint32_t m, uint32_t q, uint32_t n,
                                                    char** out_decimal) {
  return guard([&] {
    require(out_decimal, "null output pointer");
    *out_decimal = dup(cb::to_string(cg::expected_trace_from_partitions(m, q, n)));
  });
}

// ---- densities

gmspec_status gmspec_edge_constant(uint32_t m, double* out_a) {
  return guard([&] {
    require(out_a, "null output pointer");
    *out_a = sp::edge_constants(m).a;
  });
}

gmspec_status gmspec_density_z(double x, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    require(std::isfinite(x), "x must be finite");
    *out = sp::density_z(x);
  });
}

gmspec_status gmspec_density_z_complex(double x, double* out_re, double* out_im) {
  return guard([&] {
    require(out_re && out_im, "null output pointer");
    require(std::isfinite(x), "x must be finite");
    const auto v = sp::density_z_complex(x);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

gmspec_status gmspec_cdf_z(double x, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    require(std::isfinite(x), "x must be finite");
    *out = sp::cdf_z(x);
  });
}

gmspec_status gmspec_density_z_moment(int k, double split_fraction, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    require(k >= 0, "k must be nonnegative");
    require(split_fraction > 0.0 && split_fraction < 1.0, "split fraction must lie in (0, 1)");
    sp::QuadratureOptions q;
    q.split_fraction = split_fraction;
    *out = sp::moment_of_density([](double x) { return sp::density_z(x); }, sp::kEdgeZ, k, q);
  });
}

gmspec_status gmspec_z_ode_relative_residual(double x, double h, double* out) {
  return guard([&] {
    require(out, "null output pointer");
    require(h > 0.0 && x - h > 0.0 && x + h < sp::kEdgeZ, "need 0 < x - h < x + h < a");
    const auto sys = sp::ode_system_z();
    const double f2 = (sp::density_z_derivative(x + h) - sp::density_z_derivative(x - h)) / (2 * h);
    const double d[] = {sp::density_z(x), sp::density_z_derivative(x), f2};
    *out = std::abs(sp::ode_residual(sys, d, x)) / sp::ode_residual_scale(sys, d, x);
  });
}

gmspec_status gmspec_solve_ode(uint32_t m, double epsilon, gmspec_tail_model tail,
                               int mutate_fprime, gmspec_density_table** out) {
  return guard([&] {
    require(out, "null output pointer");
    const auto sys = system_for(m, mutate_fprime != 0);
    const auto model = m == 2 ? sp::TailModel::kSquareRoot : tail_from(tail);
    *out = new gmspec_density_table{sp::solve_ode(sys, epsilon, model)};
  });
}

void gmspec_density_table_free(gmspec_density_table* t) { delete t; }

double gmspec_density_table_a(const gmspec_density_table* t) { return t ? t->table.a() : 0.0; }

double gmspec_density_table_normalization(const gmspec_density_table* t) {
  return t ? t->table.normalization() : 0.0;
}

gmspec_status gmspec_density_table_eval(const gmspec_density_table* t, double x, double* out) {
  return guard([&] {
    require(t && out, "null pointer argument");
    *out = t->table.eval(x);
  });
}

gmspec_status gmspec_density_table_moment(const gmspec_density_table* t, int k, double* out) {
  return guard([&] {
    require(t && out, "null pointer argument");
    require(k >= 0, "k must be nonnegative");
    *out = t->table.moment(k);
  });
}

gmspec_status gmspec_density_table_sample(const gmspec_density_table* t, size_t points,
                                          double* out_x, double* out_f) {
  return guard([&] {
    require(t && out_x && out_f, "null pointer argument");
    const auto s = t->table.sample(points);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out_x[i] = s[i].first;
      out_f[i] = s[i].second;
    }
  });
}

gmspec_status gmspec_density_table_exponent(const gmspec_density_table* t, gmspec_endpoint end,
                                            double lo, double hi, double* out) {
  return guard([&] {
    require(t && out, "null pointer argument");
    const auto e = end == GMSPEC_ENDPOINT_ORIGIN ? sp::Endpoint::kOrigin : sp::Endpoint::kEdge;
    *out = sp::local_exponent(t->table, e, {lo, hi});
  });
}

gmspec_status gmspec_density_table_sup_distance_z(const gmspec_density_table* t, double lo,
                                                  double hi, double* out) {
  return guard([&] {
    require(t && out, "null pointer argument");
    *out = sp::sup_distance_to_z(t->table, lo, hi);
  });
}

gmspec_status gmspec_density_table_residual(const gmspec_density_table* t, uint32_t m, double x,
                                            double h, double* out) {
  return guard([&] {
    require(t && out, "null pointer argument");
    *out = sp::table_relative_residual(t->table, system_for(m, false), x, h);
  });
}

// ---- verify

void gmspec_verify_options_init(gmspec_verify_options* options) {
  if (!options) return;
  const gmspec::verify::Options d;
  options->suite = "all";
  options->allow_slow = d.allow_slow ? 1 : 0;
  options->mutate_z3_fprime = d.mutate_z3_fprime ? 1 : 0;
  options->split_fraction = d.split_fraction;
  options->threads = d.threads;
  options->seed = d.seed;
}

gmspec_status gmspec_verify(const gmspec_verify_options* options, char** out_report_json,
                            int* out_passed) {
  return guard([&] {
    require(out_report_json && out_passed, "null output pointer");
    gmspec::verify::Options o;
    if (options) {
      if (options->suite) o.suite = options->suite;
      o.allow_slow = options->allow_slow != 0;
      o.mutate_z3_fprime = options->mutate_z3_fprime != 0;
      o.split_fraction = options->split_fraction;
      o.threads = options->threads;
      o.seed = options->seed;
    }
    const auto report = gmspec::verify::verify_all(o);
    *out_report_json = dup(report.to_json());
    *out_passed = report.passed() ? 1 : 0;
  });
}

}  // extern "C"
