#pragma once

#include <functional>
#include <limits>

namespace eeopt::numerics {

using RealFunction = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances for adaptive quadrature. An infinite upper limit is handled by
/// the change of variables t = lo + u / (1 - u), so no tail truncation is needed.
struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  unsigned max_subdivisions = 1u << 15;

  void validate() const;
};

/// Interval [lo, hi] on which f changes sign.
struct RootBracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;

  /// Evaluates f at both endpoints and checks lo < hi and a sign change.
  static RootBracket make(const RealFunction& f, double lo, double hi);
  void validate() const;
};

/// Principal branch W0 of the Lambert W function, x >= -1/e.
double lambert_w0(double x);

/// Generalized exponential integral E_n(x) = int_1^inf t^-n e^(-x t) dt, x > 0.
/// E_0 uses the closed form e^-x / x.
double exp_int(int n, double x);

/// Adaptive Gauss-Kronrod quadrature of f over (lo, hi); hi may be +inf.
/// Throws QuadratureError carrying the best estimate when the subdivision
/// budget is exhausted before the tolerance is met.
double integrate(const RealFunction& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

/// Bracketed root of f. Stops when the bracket is narrower than tol or
/// |f(x)| <= tol.
double find_root(const RealFunction& f, const RootBracket& bracket, double tol);

}  // namespace eeopt::numerics
