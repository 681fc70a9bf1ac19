#include "eeopt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "eeopt/error.hpp"

namespace eeopt::numerics {

namespace {

constexpr double kBranchPoint = -1.0 / std::numbers::e;

double lambert_w0_initial_guess(double x) {
  if (x < -0.32) {
    // Series in p = sqrt(2 (1 + e x)) about the branch point.
    const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + std::numbers::e * x)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x < 3.0) return std::log1p(x);
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// E_n(x) for n >= 1. Power series for x <= 1, modified Lentz continued
// fraction otherwise.
double exp_int_positive_order(int n, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const int nm1 = n - 1;

  if (x > 1.0) {
    double b = x + n;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
      const double a = -static_cast<double>(i) * (nm1 + i);
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const double del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < kEps) return h * std::exp(-x);
    }
    throw NumericalError("exp_int: continued fraction did not converge");
  }

  double ans = nm1 != 0 ? 1.0 / nm1 : -std::log(x) - std::numbers::egamma;
  double fact = 1.0;
  for (int i = 1; i <= kMaxIter; ++i) {
    fact *= -x / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -std::numbers::egamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(x) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * kEps) return ans;
  }
  throw NumericalError("exp_int: series did not converge");
}

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod_panel(const RealFunction& g, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  static const auto& nodes = Rule::abscissa();
  static const auto& kronrod = Rule::weights();
  static const auto& gauss = boost::math::quadrature::gauss<double, 7>::weights();

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = g(mid);
  double k_sum = kronrod[0] * f0;
  // Gauss nodes are the even-indexed Kronrod nodes; gauss[0] is the centre.
  double g_sum = gauss[0] * f0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    const double fsum = g(mid - dx) + g(mid + dx);
    k_sum += kronrod[i] * fsum;
    if (i % 2 == 0) g_sum += gauss[i / 2] * fsum;
  }
  const double value = half * k_sum;
  const double error = std::abs(half * (k_sum - g_sum));
  return {a, b, value, error};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("QuadratureSpec: tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  }
}

RootBracket RootBracket::make(const RealFunction& f, double lo, double hi) {
  RootBracket bracket{lo, hi, f(lo), f(hi)};
  bracket.validate();
  return bracket;
}

void RootBracket::validate() const {
  if (!(lo < hi)) throw DomainError("RootBracket: requires lo < hi");
  if (std::isnan(f_lo) || std::isnan(f_hi)) {
    throw DomainError("RootBracket: function is NaN at an endpoint");
  }
  if ((f_lo > 0.0 && f_hi > 0.0) || (f_lo < 0.0 && f_hi < 0.0)) {
    std::ostringstream os;
    os << "RootBracket: no sign change on [" << lo << ", " << hi << "] (f = " << f_lo
       << ", " << f_hi << ")";
    throw DomainError(os.str());
  }
}

double lambert_w0(double x) {
  if (std::isnan(x) || x < kBranchPoint) {
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x == kBranchPoint) return -1.0;
  if (std::isinf(x)) return x;

  double w = lambert_w0_initial_guess(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 <= 0.0) {
      // Rounding pushed the iterate past the branch point.
      w = -1.0 + 1e-12;
      continue;
    }
    // Halley step.
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
      break;
    }
  }
  return std::max(w, -1.0);
}

double exp_int(int n, double x) {
  if (n < 0) throw DomainError("exp_int: order must be >= 0");
  if (!(x > 0.0)) throw DomainError("exp_int: argument must be > 0");
  if (std::isinf(x)) return 0.0;
  if (n == 0) return std::exp(-x) / x;
  return exp_int_positive_order(n, x);
}

double integrate(const RealFunction& f, double lo, double hi, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo)) {
    throw DomainError("integrate: lower limit must be finite");
  }
  if (hi == lo) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, spec);

  RealFunction g = f;
  double a = lo;
  double b = hi;
  if (std::isinf(hi)) {
    g = [&f, lo](double u) {
      const double one_minus = 1.0 - u;
      const double t = lo + u / one_minus;
      if (!std::isfinite(t)) return 0.0;
      const double value = f(t);
      return value == 0.0 ? 0.0 : value / (one_minus * one_minus);
    };
    a = 0.0;
    b = 1.0;
  }

  std::priority_queue<Panel> panels;
  Panel first = kronrod_panel(g, a, b);
  double total = first.value;
  double total_error = first.error;
  panels.push(first);
  unsigned count = 1;

  auto done = [&] { return total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (!done()) {
    if (count >= spec.max_subdivisions) {
      std::ostringstream os;
      os << "integrate: subdivision limit " << spec.max_subdivisions
         << " reached with error bound " << total_error;
      throw QuadratureError(os.str(), total, total_error);
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("integrate: interval collapsed below machine precision", total,
                            total_error);
    }
    const Panel left = kronrod_panel(g, worst.a, mid);
    const Panel right = kronrod_panel(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum to shed accumulated update drift.
  double resum = 0.0;
  while (!panels.empty()) {
    resum += panels.top().value;
    panels.pop();
  }
  return resum;
}

double find_root(const RealFunction& f, const RootBracket& bracket, double tol) {
  bracket.validate();
  if (!(tol > 0.0)) throw DomainError("find_root: tolerance must be positive");
  if (bracket.f_lo == 0.0) return bracket.lo;
  if (bracket.f_hi == 0.0) return bracket.hi;

  double best_x = bracket.lo;
  double best_f = std::abs(bracket.f_lo);
  bool small_residual = false;
  auto tracked = [&](double x) {
    const double value = f(x);
    if (std::abs(value) < best_f) {
      best_f = std::abs(value);
      best_x = x;
    }
    if (std::abs(value) <= tol) small_residual = true;
    return value;
  };
  auto stop = [&](double a, double b) { return small_residual || std::abs(b - a) <= tol; };

  std::uintmax_t max_iter = 400;
  const auto [a, b] = boost::math::tools::toms748_solve(tracked, bracket.lo, bracket.hi,
                                                        bracket.f_lo, bracket.f_hi, stop, max_iter);
  if (small_residual) return best_x;
  if (std::abs(b - a) > tol) throw NumericalError("find_root: iteration limit reached");
  return 0.5 * (a + b);
}

}  // namespace eeopt::numerics
