#pragma once

// Limiting singular-value densities of multi-Z graph matrices: the explicit
// m = 2 density, moment quadrature, the linear ODEs satisfied by the m = 2 and
// m = 3 densities, and numerical solutions of those ODEs.

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace gmspec::spectrum {

struct EdgeConstants {
  std::uint32_t m = 0;
  double a = 0.0;
  double a_squared = 0.0;  // exact rational: 27/4 or 256/27
};

/// m in {2, 3}; anything else throws Unsupported.
EdgeConstants edge_constants(std::uint32_t m);

inline constexpr double kEdgeZ = 1.5 * std::numbers::sqrt3;           // 3*sqrt(3)/2
inline constexpr double kEdgeZ3 = 16.0 / (3.0 * std::numbers::sqrt3);  // 16/(3*sqrt(3))

/// Explicit density of the m = 2 limit, real algebraic form. 0 for x >= a.
double density_z(double x);
/// The complex-trigonometric form; the imaginary part is rounding noise.
std::complex<double> density_z_complex(double x);
/// Closed-form derivative on (0, a).
double density_z_derivative(double x);
/// Integral of density_z over (0, x].
double cdf_z(double x);
/// cdf_z at every point of an ascending sequence, accumulated segment by
/// segment.
std::vector<double> cdf_z_ascending(std::span<const double> ascending);

/// Linear ODE sum_k coeffs[k](x) f^(k)(x) = 0 with polynomial coefficients,
/// coeffs[k][l] multiplying x^l.
struct OdeSystem {
  std::string name;
  std::uint32_t order = 0;
  double a = 0.0;
  std::vector<std::vector<double>> coeffs;

  double coefficient(std::uint32_t k, double x) const;
};

OdeSystem ode_system_z();
/// f' coefficient 177x^2 - 192.
OdeSystem ode_system_z3();
/// Same with f' coefficient 177x^2 - 192x; used for mutation checks.
OdeSystem ode_system_z3_mutated();

/// sum_k coeffs[k](x) * derivs[k]; derivs = (f, f', ..., f^(order)).
double ode_residual(const OdeSystem& sys, std::span<const double> derivs, double x);
/// max_k |coeffs[k](x) * derivs[k]|, the scale for relative residuals.
double ode_residual_scale(const OdeSystem& sys, std::span<const double> derivs, double x);

enum class Endpoint { kOrigin, kEdge };

/// Real roots of the indicial polynomial at x = 0 or x = a, ascending.
/// Local variable is x at the origin and a - x at the edge.
std::vector<double> indicial_roots(const OdeSystem& sys, Endpoint end);

/// Coefficients c_0 = 1, c_1, ... of the local solution sum_j c_j t^{rho+j},
/// t = x (origin) or a - x (edge). Throws NumericalFailure on a resonance
/// that would need a logarithmic term.
std::vector<double> frobenius_coefficients(const OdeSystem& sys, Endpoint end, double rho,
                                           std::size_t terms);

struct QuadratureOptions {
  double split_fraction = 0.1;  // split point as a fraction of a
  double tolerance = 1e-13;     // relative, per piece
};

/// Integral of x^{2k} f(x) over (0, a). (0, split] uses x = s^3, [split, a)
/// uses x = a sin(theta).
double moment_of_density(const std::function<double(double)>& f, double a, int k,
                         const QuadratureOptions& options = {});

/// Local model t^{rho} sum_j c_j t^j with t the distance to an endpoint.
struct LocalSeries {
  double rho = 0.0;
  std::vector<double> coeffs;

  /// d^order/dt^order at t > 0.
  double eval(double t, std::uint32_t order = 0) const;
  /// Integral of x^{2k} times the series over t in (0, t1], for the origin.
  double origin_moment(double t1, int k) const;
};

enum class TailModel {
  kSquareRoot,        // sqrt(a - x)
  kFrobeniusTwoTerm,  // exact two-term local solution at the edge
  kLeadingOrderTwoTerm,  // (a-x)^{1/2} + 209/(64*3*sqrt3) (a-x)^{3/2}
};

std::string to_string(TailModel tail);

/// Tabulated density on (0, a). Between body_x.front() and body_x.back() the
/// density is a cubic Hermite interpolant of the stored nodes; below it a
/// fitted combination of origin branches; above it an edge tail model.
/// Tables built from bare samples have no models and interpolate linearly.
class DensityTable {
 public:
  static DensityTable from_samples(double a, std::vector<double> x, std::vector<double> f);

  double a() const { return a_; }
  double epsilon() const { return epsilon_; }
  double x_min() const { return body_x_.empty() ? 0.0 : body_x_.front(); }
  double normalization() const { return normalization_; }
  TailModel tail_model() const { return tail_; }
  const std::vector<double>& origin_exponents() const { return origin_exponents_; }
  const std::vector<double>& origin_weights() const { return origin_weights_; }
  const LocalSeries& edge_series() const { return edge_; }
  std::size_t rejected_steps() const { return rejected_; }

  /// Grid: origin-model samples, body nodes, tail samples; ascending.
  const std::vector<double>& x() const { return grid_x_; }
  const std::vector<double>& f() const { return grid_f_; }
  const std::vector<double>& body_x() const { return body_x_; }
  const std::vector<double>& body_f() const { return body_f_; }
  const std::vector<double>& body_df() const { return body_df_; }

  double eval(double x) const;
  /// Integral of x^{2k} f over (0, a) using the table's own pieces.
  double moment(int k) const;
  /// f at x_i = a*i/(points+1), i = 1..points.
  std::vector<std::pair<double, double>> sample(std::size_t points) const;

 private:
  friend DensityTable solve_ode(const OdeSystem&, double, TailModel);

  double eval_unscaled(double x) const;
  double moment_unscaled(int k) const;
  void build_grid();

  double a_ = 0.0;
  double epsilon_ = 0.0;
  double normalization_ = 1.0;  // multiplies the raw solution
  TailModel tail_ = TailModel::kSquareRoot;
  bool has_models_ = false;
  std::vector<double> origin_exponents_;
  std::vector<double> origin_weights_;
  LocalSeries edge_;
  std::vector<double> body_x_;
  std::vector<double> body_f_;
  std::vector<double> body_df_;
  std::vector<double> grid_x_;
  std::vector<double> grid_f_;
  std::size_t rejected_ = 0;
};

/// Backward integration from a - epsilon to 1e-3 a, seeded by the tail
/// model, closed off at the origin by a fit of the indicial branches and
/// normalised to unit mass.
DensityTable solve_ode(const OdeSystem& sys, double epsilon, TailModel tail);
/// m = 2: tail sqrt(a - x).
DensityTable solve_ode_z(double epsilon);
/// m = 3: tail defaults to the exact two-term local solution.
DensityTable solve_ode_3z(double epsilon, TailModel tail = TailModel::kFrobeniusTwoTerm);

/// Samples an explicit density on `points` log-spaced points towards each end
/// plus a uniform interior grid.
DensityTable tabulate(const std::function<double(double)>& f, double a, std::size_t points);

struct FitWindow {
  double lo = 0.0;  // distance to the endpoint
  double hi = 0.0;
};

/// Least-squares slope of log f against log(distance to the endpoint) over
/// the table's grid points whose distance lies in the window. Needs at least
/// three positive points.
double local_exponent(const DensityTable& table, Endpoint end, FitWindow window);

/// |residual| / scale at x with derivatives of the table taken by central
/// differences of step h.
double table_relative_residual(const DensityTable& table, const OdeSystem& sys, double x, double h);

/// sup over x in [lo, hi] of |table(x) - density_z(x)| on `points` points.
double sup_distance_to_z(const DensityTable& table, double lo, double hi,
                         std::size_t points = 2000);

/// sup_x |F_n(x) - F(x)| for ascending samples against a continuous CDF.
double kolmogorov_distance(std::span<const double> ascending,
                           const std::function<double(double)>& cdf);
/// Same against cdf_z, using cdf_z_ascending.
double kolmogorov_distance_z(std::span<const double> ascending);

}  // namespace gmspec::spectrum
