#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lindcd/types.hpp"

namespace lindcd::num {

struct StepperError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;      // 0 disables the cap
  double initial_step = 0.0;  // 0 picks a fraction of the interval
  long max_steps = 2'000'000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long evals = 0;
};

// Dormand-Prince 5(4) with PI-free step control (classic 0.9 err^(-1/5)
// factor clamped to [0.2, 5]). Integrates y in place from s0 to s1 > s0,
// landing exactly on s1. `rhs(s, y, dy)` fills dy. `h_inout`, when given,
// carries the step size across consecutive calls.
template <class Rhs>
StepStats integrate_to(Rhs&& rhs, double s0, double s1, Vector& y,
                       const StepControl& ctl = {}, double* h_inout = nullptr) {
  if (!(s1 > s0))
    throw std::invalid_argument("integrate_to: requires s1 > s0");

  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Eigen::Index n = y.size();
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  StepStats stats;
  double s = s0;
  double h = (h_inout && *h_inout > 0.0) ? *h_inout : ctl.initial_step;
  if (h <= 0.0)
    h = (s1 - s0) * 1e-4;
  if (ctl.max_step > 0.0)
    h = std::min(h, ctl.max_step);

  // k1 always holds the derivative at the current (s, y): seeded here, then
  // maintained by the first-same-as-last property on acceptance and left
  // untouched on rejection.
  rhs(s, y, k1);
  ++stats.evals;

  while (s < s1) {
    if (stats.accepted + stats.rejected >= ctl.max_steps)
      throw StepperError("integrate_to: step budget exhausted");
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(s), 1.0);
    if (h < h_floor)
      throw StepperError("integrate_to: step size underflow at s = " + std::to_string(s));
    h = std::min(h, s1 - s);

    ytmp = y + h * (a21 * k1);
    rhs(s + h / 5.0, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(s + 3.0 * h / 10.0, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(s + 4.0 * h / 5.0, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(s + 8.0 * h / 9.0, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(s + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(s + h, ynew, k7);
    stats.evals += 6;

    double err_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex ei = h * (e1 * k1(i) + e3 * k3(i) + e4 * k4(i) +
                              e5 * k5(i) + e6 * k6(i) + e7 * k7(i));
      const double sc = ctl.abs_tol +
                        ctl.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      err_sq += std::norm(ei / sc);
    }
    const double err = std::sqrt(err_sq / static_cast<double>(n));

    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    if (err <= 1.0) {
      s += h;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
      ++stats.accepted;
      h *= fac;
    } else {
      ++stats.rejected;
      h *= std::min(fac, 0.9);
    }
    if (ctl.max_step > 0.0)
      h = std::min(h, ctl.max_step);
  }

  if (h_inout)
    *h_inout = h;
  return stats;
}

}  // namespace lindcd::num
