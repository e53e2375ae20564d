#pragma once

#include <functional>
#include <stdexcept>

namespace lindcd::num {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_depth = 48;
};

// Adaptive Gauss-Kronrod 15(7) on [a, b]. Throws QuadratureError with the
// residual error estimate in the message if the tolerance cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

// Cauchy principal value of integral_a^b g(t) / (x0 - t) dt for a pole x0
// strictly inside (a, b). The symmetric window (x0 - delta, x0 + delta) is
// handled as integral_0^delta (g(x0-u) - g(x0+u))/u du, whose integrand has a
// finite limit -2 g'(x0) at u -> 0; the remainder is integrated directly.
double principal_value(const std::function<double(double)>& g, double a,
                       double b, double x0, double window = 0.5,
                       const QuadratureOptions& opt = {});

}  // namespace lindcd::num
