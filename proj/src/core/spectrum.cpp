#include "gmspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gmspec/error.hpp"
#include "gmspec/ode.hpp"

namespace gmspec::spectrum {

namespace {

constexpr double kPi = std::numbers::pi;

double falling(double r, std::uint32_t k) {
  double p = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) p *= r - i;
  return p;
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

template <typename F>
double gk(F&& f, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 10, tol, &err);
}

}  // namespace

EdgeConstants edge_constants(std::uint32_t m) {
  switch (m) {
    case 2:
      return {2, kEdgeZ, 27.0 / 4.0};
    case 3:
      return {3, kEdgeZ3, 256.0 / 27.0};
    default:
      throw Unsupported("spectral edge only known for m in {2,3}");
  }
}

// ---------------------------------------------------------------- density

namespace {

// s = sqrt(9 - 4x^2/3); z = (3 - s)/(3 + s) written without cancellation.
double z_aux(double x, double& s) {
  s = std::sqrt(std::max(0.0, 9.0 - 4.0 * x * x / 3.0));
  return 4.0 * x * x / (3.0 * (3.0 + s) * (3.0 + s));
}

}  // namespace

double density_z(double x) {
  if (!(x > 0.0)) throw InvalidArgument("density_z: x must be > 0");
  if (x >= kEdgeZ) return 0.0;
  double s = 0.0;
  const double z = z_aux(x, s);
  const double r = std::cbrt(std::sqrt(z));  // z^{1/6}
  return (1.0 / r - r) / kPi;
}

std::complex<double> density_z_complex(double x) {
  if (!(x > 0.0)) throw InvalidArgument("density_z_complex: x must be > 0");
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  // arctan(3/sqrt(4x^2/3 - 9)) with an imaginary argument i*w,
  // arctan(i w) = (i/2) ln((1 + w)/(1 - w))
  const C root = std::sqrt(C(4.0 * x * x / 3.0 - 9.0, 0.0));
  const C ir = i * root;  // w = 3 / ir
  // 1 + w = (ir + 3)/ir, and (ir + 3)(3 - ir) = 9 + root^2 = 4x^2/3
  const C one_plus_w = C(4.0 * x * x / 3.0, 0.0) / ((3.0 - ir) * ir);
  const C one_minus_w = (ir - 3.0) / ir;
  C ratio = one_plus_w / one_minus_w;
  // negative real for x < a; take the upper side of the log branch cut
  ratio = C(ratio.real(), std::abs(ratio.imag()));
  const C atan = 0.5 * i * std::log(ratio);
  const C g = atan / 3.0;
  return i / kPi * (std::sqrt(3.0) * std::sin(g) + std::cos(g));
}

double density_z_derivative(double x) {
  if (!(x > 0.0) || !(x < kEdgeZ))
    throw InvalidArgument("density_z_derivative: x must lie in (0, a)");
  double s = 0.0;
  const double z = z_aux(x, s);
  const double r = std::cbrt(std::sqrt(z));
  return -(r + 1.0 / r) / (kPi * x * s);
}

double cdf_z(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x >= kEdgeZ) return 1.0;
  const double a = kEdgeZ;
  const double split = 0.1 * a;
  const double tol = 1e-13;
  auto lower = [](double s) {
    if (s <= 0.0) return 0.0;
    return density_z(s * s * s) * 3.0 * s * s;
  };
  double total = gk(lower, 0.0, std::cbrt(std::min(x, split)), tol);
  if (x > split) {
    auto upper = [a](double th) {
      const double y = a * std::sin(th);
      return y > 0.0 ? density_z(y) * a * std::cos(th) : 0.0;
    };
    total += gk(upper, std::asin(split / a), std::asin(x / a), tol);
  }
  return total;
}

std::vector<double> cdf_z_ascending(std::span<const double> ascending) {
  using GL = boost::math::quadrature::gauss<double, 15>;
  const double a = kEdgeZ;
  const double split = 0.1 * a;
  auto lower = [](double s) { return density_z(s * s * s) * 3.0 * s * s; };
  auto upper = [a](double th) {
    const double y = a * std::sin(th);
    return y < a ? density_z(y) * a * std::cos(th) : 0.0;
  };
  // mass of (lo, hi] with 0 <= lo <= hi <= a
  auto segment = [&](double lo, double hi) {
    double m = 0.0;
    if (lo < split) m += GL::integrate(lower, std::cbrt(lo), std::cbrt(std::min(hi, split)));
    if (hi > split)
      m += GL::integrate(upper, std::asin(std::max(lo, split) / a), std::asin(hi / a));
    return m;
  };
  std::vector<double> out;
  out.reserve(ascending.size());
  double prev = 0.0, acc = 0.0;
  for (double x : ascending) {
    if (x < prev) throw InvalidArgument("cdf_z_ascending: points must be ascending");
    const double xc = std::clamp(x, 0.0, a);
    if (xc > prev) {
      acc += segment(prev, xc);
      prev = xc;
    }
    out.push_back(x >= a ? 1.0 : acc);
  }
  return out;
}

// ------------------------------------------------------------------- ODEs

double OdeSystem::coefficient(std::uint32_t k, double x) const { return poly_eval(coeffs.at(k), x); }

OdeSystem ode_system_z() {
  // (4x^4 - 27x^2) f'' + (8x^3 - 27x) f' + 3 f = 0
  return {"z", 2, kEdgeZ, {{3.0}, {0.0, -27.0, 0.0, 8.0}, {0.0, 0.0, -27.0, 0.0, 4.0}}};
}

OdeSystem ode_system_z3() {
  // (27x^4 - 256x^2) f''' + (162x^3 - 768x) f'' + (177x^2 - 192) f' + 15x f = 0
  return {"z3",
          3,
          kEdgeZ3,
          {{0.0, 15.0},
           {-192.0, 0.0, 177.0},
           {0.0, -768.0, 0.0, 162.0},
           {0.0, 0.0, -256.0, 0.0, 27.0}}};
}

OdeSystem ode_system_z3_mutated() {
  OdeSystem s = ode_system_z3();
  s.name = "z3-mutated";
  s.coeffs[1] = {0.0, -192.0, 177.0};
  return s;
}

double ode_residual(const OdeSystem& sys, std::span<const double> derivs, double x) {
  if (derivs.size() != sys.order + 1)
    throw InvalidArgument("ode_residual: expected " + std::to_string(sys.order + 1) +
                          " derivative values, got " + std::to_string(derivs.size()));
  double r = 0.0;
  for (std::uint32_t k = 0; k <= sys.order; ++k) r += sys.coefficient(k, x) * derivs[k];
  return r;
}

double ode_residual_scale(const OdeSystem& sys, std::span<const double> derivs, double x) {
  if (derivs.size() != sys.order + 1)
    throw InvalidArgument("ode_residual_scale: derivative arity does not match the ODE order");
  double s = 0.0;
  for (std::uint32_t k = 0; k <= sys.order; ++k)
    s = std::max(s, std::abs(sys.coefficient(k, x) * derivs[k]));
  return s;
}

// ---------------------------------------------------------- local analysis

namespace {

// Coefficients Q_k(t) = sigma^k P_k(p + sigma t) of the ODE in the local
// variable, with entries below a relative threshold set to exactly zero.
struct LocalForm {
  std::vector<std::vector<double>> q;
  int shift = 0;  // min over nonzero q[k][l] of l - k
};

LocalForm local_form(const OdeSystem& sys, Endpoint end) {
  const double p = end == Endpoint::kOrigin ? 0.0 : sys.a;
  const double sigma = end == Endpoint::kOrigin ? 1.0 : -1.0;
  LocalForm lf;
  double scale = 0.0;
  for (std::uint32_t k = 0; k <= sys.order; ++k) {
    const auto& c = sys.coeffs[k];
    std::vector<double> q(c.size(), 0.0);
    for (std::size_t l = 0; l < c.size(); ++l) {
      double v = 0.0;
      double binom = 1.0;  // C(i, l)
      for (std::size_t i = l; i < c.size(); ++i) {
        v += c[i] * binom * std::pow(p, static_cast<double>(i - l));
        binom = binom * static_cast<double>(i + 1) / static_cast<double>(i + 1 - l);
      }
      q[l] = v * std::pow(sigma, static_cast<double>(l + k));
      scale = std::max(scale, std::abs(q[l]));
    }
    lf.q.push_back(std::move(q));
  }
  lf.shift = 1 << 20;
  for (std::uint32_t k = 0; k <= sys.order; ++k)
    for (std::size_t l = 0; l < lf.q[k].size(); ++l) {
      if (std::abs(lf.q[k][l]) <= 1e-11 * scale) lf.q[k][l] = 0.0;
      if (lf.q[k][l] != 0.0) lf.shift = std::min(lf.shift, static_cast<int>(l) - static_cast<int>(k));
    }
  return lf;
}

double q_at(const LocalForm& lf, std::uint32_t k, int l) {
  if (l < 0 || static_cast<std::size_t>(l) >= lf.q[k].size()) return 0.0;
  return lf.q[k][static_cast<std::size_t>(l)];
}

// Coefficient of t^{r + shift + d} produced by t^r.
double local_term(const LocalForm& lf, double r, int d) {
  double v = 0.0;
  for (std::uint32_t k = 0; k < lf.q.size(); ++k)
    v += q_at(lf, k, static_cast<int>(k) + lf.shift + d) * falling(r, k);
  return v;
}

double local_scale(const LocalForm& lf) {
  double s = 0.0;
  for (const auto& q : lf.q)
    for (double v : q) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

std::vector<double> indicial_roots(const OdeSystem& sys, Endpoint end) {
  const LocalForm lf = local_form(sys, end);
  // Expand I(r) = sum_k q_k falling(r, k) into monomials.
  std::vector<double> poly(sys.order + 1, 0.0);
  for (std::uint32_t k = 0; k <= sys.order; ++k) {
    const double c = q_at(lf, k, static_cast<int>(k) + lf.shift);
    if (c == 0.0) continue;
    std::vector<double> f{1.0};
    for (std::uint32_t i = 0; i < k; ++i) {
      std::vector<double> g(f.size() + 1, 0.0);
      for (std::size_t j = 0; j < f.size(); ++j) {
        g[j + 1] += f[j];
        g[j] -= static_cast<double>(i) * f[j];
      }
      f = std::move(g);
    }
    for (std::size_t j = 0; j < f.size(); ++j) poly[j] += c * f[j];
  }
  while (poly.size() > 1 && poly.back() == 0.0) poly.pop_back();
  const std::size_t deg = poly.size() - 1;
  if (deg == 0) throw NumericalFailure("indicial polynomial is constant");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg),
                                                    static_cast<Eigen::Index>(deg));
  for (std::size_t i = 0; i < deg; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) = -poly[deg - 1 - i] / poly[deg];
    if (i + 1 < deg) companion(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) > 1e-9) throw NumericalFailure("complex indicial root");
    roots.push_back(std::abs(ev.real()) < 1e-13 ? 0.0 : ev.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> frobenius_coefficients(const OdeSystem& sys, Endpoint end, double rho,
                                           std::size_t terms) {
  const LocalForm lf = local_form(sys, end);
  const double scale = local_scale(lf);
  if (std::abs(local_term(lf, rho, 0)) > 1e-9 * scale * std::max(1.0, std::abs(rho) * sys.order))
    throw NumericalFailure("exponent " + std::to_string(rho) + " is not an indicial root");
  std::vector<double> c{1.0};
  for (std::size_t n = 1; n < terms; ++n) {
    double rhs = 0.0;
    for (std::size_t d = 1; d <= n; ++d)
      rhs -= c[n - d] * local_term(lf, rho + static_cast<double>(n - d), static_cast<int>(d));
    const double ind = local_term(lf, rho + static_cast<double>(n), 0);
    if (std::abs(ind) <= 1e-12 * scale) {
      if (std::abs(rhs) > 1e-10 * scale) throw NumericalFailure("resonant Frobenius series");
      c.push_back(0.0);
    } else {
      c.push_back(rhs / ind);
    }
  }
  return c;
}

double LocalSeries::eval(double t, std::uint32_t order) const {
  double v = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double e = rho + static_cast<double>(j);
    v += coeffs[j] * falling(e, order) * std::pow(t, e - order);
  }
  return v;
}

double LocalSeries::origin_moment(double t1, int k) const {
  double v = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double e = 2.0 * k + rho + static_cast<double>(j) + 1.0;
    v += coeffs[j] * std::pow(t1, e) / e;
  }
  return v;
}

// -------------------------------------------------------------- quadrature

double moment_of_density(const std::function<double(double)>& f, double a, int k,
                         const QuadratureOptions& options) {
  if (k < 0) throw InvalidArgument("moment_of_density: k must be >= 0");
  if (!(a > 0.0)) throw InvalidArgument("moment_of_density: a must be > 0");
  if (!(options.split_fraction > 0.0 && options.split_fraction < 1.0))
    throw InvalidArgument("moment_of_density: split fraction must lie in (0, 1)");
  const double split = options.split_fraction * a;
  auto lower = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double x = s * s * s;
    return std::pow(x, 2 * k) * f(x) * 3.0 * s * s;
  };
  auto upper = [&](double th) {
    const double x = a * std::sin(th);
    if (x >= a) return 0.0;
    return std::pow(x, 2 * k) * f(x) * a * std::cos(th);
  };
  return gk(lower, 0.0, std::cbrt(split), options.tolerance) +
         gk(upper, std::asin(options.split_fraction), kPi / 2, options.tolerance);
}

// ------------------------------------------------------------ DensityTable

std::string to_string(TailModel tail) {
  switch (tail) {
    case TailModel::kSquareRoot:
      return "sqrt";
    case TailModel::kFrobeniusTwoTerm:
      return "frobenius2";
    case TailModel::kLeadingOrderTwoTerm:
      return "two-term-209";
  }
  return "unknown";
}

DensityTable DensityTable::from_samples(double a, std::vector<double> x, std::vector<double> f) {
  if (x.size() != f.size()) throw InvalidArgument("from_samples: x and f differ in length");
  if (x.size() < 2) throw InvalidArgument("from_samples: need at least two samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && x[i] < a)) throw InvalidArgument("from_samples: abscissa outside (0, a)");
    if (i && !(x[i] > x[i - 1])) throw InvalidArgument("from_samples: abscissae must increase");
  }
  DensityTable t;
  t.a_ = a;
  t.grid_x_ = std::move(x);
  t.grid_f_ = std::move(f);
  return t;
}

double DensityTable::eval_unscaled(double x) const {
  if (!has_models_) {
    if (x < grid_x_.front() || x > grid_x_.back()) return 0.0;
    auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
    if (it == grid_x_.end()) return grid_f_.back();
    const auto i = static_cast<std::size_t>(it - grid_x_.begin());
    const double w = (x - grid_x_[i - 1]) / (grid_x_[i] - grid_x_[i - 1]);
    return grid_f_[i - 1] + w * (grid_f_[i] - grid_f_[i - 1]);
  }
  if (x < body_x_.front()) {
    double v = 0.0;
    for (std::size_t b = 0; b < origin_exponents_.size(); ++b)
      v += origin_weights_[b] * std::pow(x, origin_exponents_[b]);
    return v;
  }
  if (x > body_x_.back()) return edge_.eval(a_ - x);
  auto it = std::upper_bound(body_x_.begin(), body_x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - body_x_.begin());
  if (i >= body_x_.size()) i = body_x_.size() - 1;
  const double x0 = body_x_[i - 1], x1 = body_x_[i];
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * body_f_[i - 1] + (t3 - 2 * t2 + t) * h * body_df_[i - 1] +
         (-2 * t3 + 3 * t2) * body_f_[i] + (t3 - t2) * h * body_df_[i];
}

double DensityTable::eval(double x) const {
  if (!(x > 0.0)) throw InvalidArgument("DensityTable::eval: x must be > 0");
  if (x >= a_) return 0.0;
  return normalization_ * eval_unscaled(x);
}

double DensityTable::moment_unscaled(int k) const {
  using GL = boost::math::quadrature::gauss<double, 10>;
  auto weight = [k](double x) { return std::pow(x, 2 * k); };
  double total = 0.0;
  if (!has_models_) {
    for (std::size_t i = 1; i < grid_x_.size(); ++i)
      total += GL::integrate([&](double x) { return weight(x) * eval_unscaled(x); }, grid_x_[i - 1],
                             grid_x_[i]);
    return total;
  }
  const double x0 = body_x_.front();
  for (std::size_t b = 0; b < origin_exponents_.size(); ++b) {
    const double e = 2.0 * k + origin_exponents_[b] + 1.0;
    total += origin_weights_[b] * std::pow(x0, e) / e;
  }
  for (std::size_t i = 1; i < body_x_.size(); ++i)
    total += GL::integrate([&](double x) { return weight(x) * eval_unscaled(x); }, body_x_[i - 1],
                           body_x_[i]);
  // tail: x = a - t^2
  const double t1 = std::sqrt(a_ - body_x_.back());
  total += boost::math::quadrature::gauss<double, 30>::integrate(
      [&](double t) { return weight(a_ - t * t) * edge_.eval(t * t) * 2.0 * t; }, 0.0, t1);
  return total;
}

double DensityTable::moment(int k) const {
  if (k < 0) throw InvalidArgument("DensityTable::moment: k must be >= 0");
  return normalization_ * moment_unscaled(k);
}

std::vector<std::pair<double, double>> DensityTable::sample(std::size_t points) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(points);
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = a_ * static_cast<double>(i) / static_cast<double>(points + 1);
    out.emplace_back(x, eval(x));
  }
  return out;
}

void DensityTable::build_grid() {
  grid_x_.clear();
  grid_f_.clear();
  constexpr int kModelPoints = 40;
  const double x0 = body_x_.front();
  for (int i = 0; i < kModelPoints; ++i)
    grid_x_.push_back(x0 * std::pow(10.0, -3.0 + 3.0 * i / kModelPoints));
  grid_x_.insert(grid_x_.end(), body_x_.begin(), body_x_.end());
  const double eps = a_ - body_x_.back();
  for (int i = kModelPoints - 1; i >= 0; --i)
    grid_x_.push_back(a_ - eps * std::pow(10.0, -4.0 + 4.0 * i / kModelPoints));
  for (double x : grid_x_) grid_f_.push_back(eval(x));
}

namespace {

template <std::size_t N>
void integrate_body(const OdeSystem& sys, double x_start, const LocalSeries& edge, double x_stop,
                    std::vector<double>& xs, std::vector<std::array<double, N>>& ys,
                    std::size_t& rejected) {
  ode::State<N> y0{};
  const double u0 = sys.a - x_start;
  for (std::size_t i = 0; i < N; ++i)
    y0[i] = ((i % 2) ? -1.0 : 1.0) * edge.eval(u0, static_cast<std::uint32_t>(i));
  auto rhs = [&sys](double x, const ode::State<N>& y) {
    ode::State<N> d{};
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) acc += sys.coefficient(static_cast<std::uint32_t>(k), x) * y[k];
    for (std::size_t k = 0; k + 1 < N; ++k) d[k] = y[k + 1];
    d[N - 1] = -acc / sys.coefficient(static_cast<std::uint32_t>(N), x);
    return d;
  };
  ode::Options opt;
  opt.max_step = sys.a / 2000.0;
  auto traj = ode::integrate<N>(rhs, x_start, y0, x_stop, opt);
  rejected = traj.rejected;
  xs.assign(traj.x.rbegin(), traj.x.rend());
  ys.assign(traj.y.rbegin(), traj.y.rend());
}

}  // namespace

DensityTable solve_ode(const OdeSystem& sys, double epsilon, TailModel tail) {
  if (!(epsilon > 0.0 && epsilon < sys.a / 10.0))
    throw InvalidArgument("solve_ode: epsilon must lie in (0, a/10)");
  if (sys.order != 2 && sys.order != 3)
    throw Unsupported("solve_ode: only second- and third-order ODEs are supported");

  DensityTable t;
  t.a_ = sys.a;
  t.epsilon_ = epsilon;
  t.tail_ = tail;
  t.has_models_ = true;
  t.edge_.rho = 0.5;
  switch (tail) {
    case TailModel::kSquareRoot:
      t.edge_.coeffs = {1.0};
      break;
    case TailModel::kFrobeniusTwoTerm:
      t.edge_.coeffs = frobenius_coefficients(sys, Endpoint::kEdge, 0.5, 2);
      break;
    case TailModel::kLeadingOrderTwoTerm:
      t.edge_.coeffs = {1.0, 209.0 / (64.0 * 3.0 * std::numbers::sqrt3)};
      break;
  }

  const double x_start = sys.a - epsilon;
  const double x_min = 1e-3 * sys.a;
  std::vector<double> state_at_min;
  if (sys.order == 2) {
    std::vector<std::array<double, 2>> ys;
    integrate_body<2>(sys, x_start, t.edge_, x_min, t.body_x_, ys, t.rejected_);
    for (const auto& y : ys) {
      t.body_f_.push_back(y[0]);
      t.body_df_.push_back(y[1]);
    }
    state_at_min.assign(ys.front().begin(), ys.front().end());
  } else {
    std::vector<std::array<double, 3>> ys;
    integrate_body<3>(sys, x_start, t.edge_, x_min, t.body_x_, ys, t.rejected_);
    for (const auto& y : ys) {
      t.body_f_.push_back(y[0]);
      t.body_df_.push_back(y[1]);
    }
    state_at_min.assign(ys.front().begin(), ys.front().end());
  }

  // Match f, f', ... at x_min with a combination of the origin branches.
  t.origin_exponents_ = indicial_roots(sys, Endpoint::kOrigin);
  const auto n = static_cast<Eigen::Index>(sys.order);
  if (static_cast<Eigen::Index>(t.origin_exponents_.size()) != n)
    throw NumericalFailure("solve_ode: indicial polynomial at the origin has the wrong degree");
  Eigen::MatrixXd basis(n, n);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    target(i) = state_at_min[static_cast<std::size_t>(i)];
    for (Eigen::Index b = 0; b < n; ++b) {
      const double e = t.origin_exponents_[static_cast<std::size_t>(b)];
      basis(i, b) = falling(e, static_cast<std::uint32_t>(i)) * std::pow(x_min, e - static_cast<double>(i));
    }
  }
  const Eigen::VectorXd w = basis.colPivHouseholderQr().solve(target);
  t.origin_weights_.assign(w.data(), w.data() + w.size());

  const double mass = t.moment_unscaled(0);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw NumericalFailure("solve_ode: solution has non-positive total mass");
  t.normalization_ = 1.0 / mass;
  t.build_grid();
  return t;
}

DensityTable solve_ode_z(double epsilon) {
  return solve_ode(ode_system_z(), epsilon, TailModel::kSquareRoot);
}

DensityTable solve_ode_3z(double epsilon, TailModel tail) {
  return solve_ode(ode_system_z3(), epsilon, tail);
}

DensityTable tabulate(const std::function<double(double)>& f, double a, std::size_t points) {
  if (points < 2) throw InvalidArgument("tabulate: need at least two points per region");
  std::vector<double> x;
  const double np = static_cast<double>(points);
  for (std::size_t i = 0; i < points; ++i) x.push_back(a * std::pow(10.0, -6.0 + 4.0 * i / np));
  for (std::size_t i = 0; i < points; ++i) x.push_back(a * (0.01 + 0.98 * i / np));
  for (std::size_t i = 0; i <= points; ++i) x.push_back(a - a * std::pow(10.0, -2.0 - 4.0 * i / np));
  std::vector<double> fx;
  for (double v : x) fx.push_back(f(v));
  return DensityTable::from_samples(a, std::move(x), std::move(fx));
}

double local_exponent(const DensityTable& table, Endpoint end, FitWindow window) {
  if (!(window.lo > 0.0 && window.hi > window.lo))
    throw InvalidArgument("local_exponent: window must satisfy 0 < lo < hi");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  const auto& xs = table.x();
  const auto& fs = table.f();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = end == Endpoint::kOrigin ? xs[i] : table.a() - xs[i];
    if (d < window.lo || d > window.hi || !(fs[i] > 0.0)) continue;
    const double lx = std::log(d), ly = std::log(fs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 3) {
    std::ostringstream os;
    os << "local_exponent: only " << count << " table points in the window [" << window.lo << ", "
       << window.hi << "]";
    throw InvalidArgument(os.str());
  }
  const double c = static_cast<double>(count);
  const double denom = c * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw NumericalFailure("local_exponent: degenerate window");
  return (c * sxy - sx * sy) / denom;
}

double table_relative_residual(const DensityTable& table, const OdeSystem& sys, double x,
                               double h) {
  if (!(h > 0.0) || !(x - 2 * h > 0.0) || !(x + 2 * h < table.a()))
    throw InvalidArgument("table_relative_residual: stencil leaves (0, a)");
  const double fm2 = table.eval(x - 2 * h), fm1 = table.eval(x - h), f0 = table.eval(x);
  const double fp1 = table.eval(x + h), fp2 = table.eval(x + 2 * h);
  std::vector<double> d{f0, (fp1 - fm1) / (2 * h), (fp1 - 2 * f0 + fm1) / (h * h),
                        (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h)};
  d.resize(sys.order + 1);
  const double scale = ode_residual_scale(sys, d, x);
  return scale > 0.0 ? std::abs(ode_residual(sys, d, x)) / scale : 0.0;
}

double sup_distance_to_z(const DensityTable& table, double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo) || !(lo > 0.0))
    throw InvalidArgument("sup_distance_to_z: bad interval");
  double sup = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    sup = std::max(sup, std::abs(table.eval(x) - density_z(x)));
  }
  return sup;
}

double kolmogorov_distance(std::span<const double> ascending,
                           const std::function<double(double)>& cdf) {
  if (ascending.empty()) throw InvalidArgument("kolmogorov_distance: no samples");
  const double n = static_cast<double>(ascending.size());
  double d = 0.0;
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    if (i && ascending[i] < ascending[i - 1])
      throw InvalidArgument("kolmogorov_distance: samples must be ascending");
    const double f = cdf(ascending[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_distance_z(std::span<const double> ascending) {
  if (ascending.empty()) throw InvalidArgument("kolmogorov_distance_z: no samples");
  const auto f = cdf_z_ascending(ascending);
  const double n = static_cast<double>(ascending.size());
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    d = std::max({d, static_cast<double>(i + 1) / n - f[i], f[i] - static_cast<double>(i) / n});
  return d;
}

}  // namespace gmspec::spectrum
