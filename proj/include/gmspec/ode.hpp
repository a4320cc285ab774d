#pragma once

// Adaptive Dormand-Prince 5(4) integrator for first-order systems with a
// fixed state size. Integrates in either direction and records every
// accepted step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "gmspec/error.hpp"

namespace gmspec::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-14;
  double initial_step = 0.0;  // 0 picks |x1 - x0| * 1e-4
  double max_step = 0.0;      // 0 means unbounded
  double min_step = 1e-14;
  std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> x;
  std::vector<State<N>> y;
  std::vector<State<N>> dy;
  std::size_t rejected = 0;
};

/// Integrates y' = rhs(x, y) from x0 to x1 (x1 < x0 allowed). rhs must be
/// callable as State<N> rhs(double, const State<N>&). Throws NumericalFailure
/// naming the abscissa when the step size underflows or the state turns
/// non-finite.
template <std::size_t N, typename Rhs>
Trajectory<N> integrate(Rhs&& rhs, double x0, const State<N>& y0, double x1,
                        const Options& opt = {}) {
  // Dormand-Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto fail = [](const char* what, double x) {
    std::ostringstream os;
    os.precision(17);
    os << "ODE integration failed at x = " << x << ": " << what;
    throw NumericalFailure(os.str());
  };
  auto finite = [](const State<N>& s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
  };

  Trajectory<N> out;
  const double span = x1 - x0;
  const double dir = span < 0 ? -1.0 : 1.0;
  double h = opt.initial_step > 0 ? opt.initial_step : std::abs(span) * 1e-4;
  if (opt.max_step > 0) h = std::min(h, opt.max_step);

  double x = x0;
  State<N> y = y0;
  State<N> k1 = rhs(x, y);
  if (!finite(y) || !finite(k1)) fail("non-finite initial state", x);
  out.x.push_back(x);
  out.y.push_back(y);
  out.dy.push_back(k1);

  State<N> k2, k3, k4, k5, k6, k7, tmp, ynew;
  std::size_t steps = 0;
  while (dir * (x1 - x) > 0) {
    if (++steps > opt.max_steps) fail("step limit exceeded", x);
    bool last = false;
    if (h >= std::abs(x1 - x)) {
      h = std::abs(x1 - x);
      last = true;
    }
    const double s = dir * h;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + s * a21 * k1[i];
    k2 = rhs(x + c2 * s, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + s * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(x + c3 * s, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + s * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(x + c4 * s, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + s * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(x + c5 * s, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + s * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(x + s, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + s * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double xnew = last ? x1 : x + s;
    k7 = rhs(xnew, ynew);

    double err = 0.0;
    bool ok = finite(ynew) && finite(k7);
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) {
        const double e =
            s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err = std::max(err, std::abs(e) / sc);
      }
    }
    if (ok && err <= 1.0) {
      x = xnew;
      y = ynew;
      k1 = k7;
      out.x.push_back(x);
      out.y.push_back(y);
      out.dy.push_back(k1);
      const double grow = err > 0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
      h *= grow;
    } else {
      ++out.rejected;
      h *= ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      if (h < opt.min_step) fail(ok ? "step size underflow" : "non-finite state", x);
    }
    if (opt.max_step > 0) h = std::min(h, opt.max_step);
  }
  return out;
}

}  // namespace gmspec::ode
