#include "eeopt/fracprog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eeopt/error.hpp"

namespace eeopt::fracprog {

void LambdaBounds::validate() const {
  if (std::isnan(min) || std::isnan(max) || min < 0.0) {
    throw DomainError("LambdaBounds: bounds must be non-negative numbers");
  }
  if (min > max) {
    std::ostringstream os;
    os << "infeasible constraints: lambda_min = " << min << " exceeds lambda_max = " << max;
    throw InfeasibleError(os.str());
  }
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Converged:
      return "converged";
    case Status::ClampedMin:
      return "clamped-min";
    case Status::ClampedMax:
      return "clamped-max";
    case Status::MaxIter:
      return "max-iter";
  }
  return "unknown";
}

DinkelbachTrace dinkelbach(const ParametricSubproblem& sub, const DinkelbachOptions& options) {
  if (!(options.tolerance > 0.0)) throw DomainError("dinkelbach: tolerance must be positive");
  if (!(options.lambda0 >= 0.0)) throw DomainError("dinkelbach: lambda0 must be >= 0");

  DinkelbachTrace trace;
  double lambda = options.lambda0;
  for (int n = 0;; ++n) {
    SubproblemPoint point = sub.solve(lambda);
    const double value = point.value();
    trace.iterates.push_back({lambda, value, point.numerator, point.denominator});
    trace.lambda = lambda;
    trace.iterations = n;

    if (std::abs(value) < options.tolerance) {
      trace.solution = std::move(point);
      trace.status = Status::Converged;
      return trace;
    }
    if (n == 0 && value < 0.0) {
      std::ostringstream os;
      os << "dinkelbach: F(lambda0) = " << value << " < 0 for lambda0 = " << lambda;
      throw DomainError(os.str());
    }
    if (n == options.max_iter) {
      trace.solution = std::move(point);
      trace.status = Status::MaxIter;
      return trace;
    }
    if (!(point.denominator > 0.0)) {
      throw NumericalError("dinkelbach: subproblem returned a non-positive denominator");
    }
    lambda = point.ratio();
  }
}

DinkelbachTrace bisection_solver(const ParametricSubproblem& sub,
                                 const numerics::RootBracket& bracket, double tol) {
  if (!(tol > 0.0)) throw DomainError("bisection_solver: tolerance must be positive");
  if (!(bracket.lo < bracket.hi) || bracket.lo < 0.0) {
    throw DomainError("bisection_solver: bracket requires 0 <= lo < hi");
  }
  if (!(bracket.f_lo >= 0.0) || !(bracket.f_hi <= 0.0)) {
    std::ostringstream os;
    os << "bisection_solver: invalid bracket, F(" << bracket.lo << ") = " << bracket.f_lo
       << ", F(" << bracket.hi << ") = " << bracket.f_hi;
    throw DomainError(os.str());
  }

  DinkelbachTrace trace;
  double lo = bracket.lo;
  double hi = bracket.hi;
  int n = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const SubproblemPoint point = sub.solve(mid);
    const double value = point.value();
    trace.iterates.push_back({mid, value, point.numerator, point.denominator});
    ++n;
    if (value == 0.0) {
      lo = hi = mid;
      break;
    }
    (value > 0.0 ? lo : hi) = mid;
  }
  trace.lambda = 0.5 * (lo + hi);
  trace.solution = sub.solve(trace.lambda);
  trace.iterations = n;
  trace.status = Status::Converged;
  return trace;
}

DinkelbachTrace bisection_solver(const ParametricSubproblem& sub, double lo, double hi,
                                 double tol) {
  const numerics::RootBracket bracket{lo, hi, sub.solve(lo).value(), sub.solve(hi).value()};
  return bisection_solver(sub, bracket, tol);
}

double clamp_to_bounds(double lambda, const LambdaBounds& bounds) {
  bounds.validate();
  return std::clamp(lambda, bounds.min, bounds.max);
}

DinkelbachTrace solve_constrained(const ParametricSubproblem& sub, const LambdaBounds& bounds,
                                  const DinkelbachOptions& options) {
  bounds.validate();
  DinkelbachTrace trace = dinkelbach(sub, options);
  if (trace.status != Status::Converged) return trace;

  const double clamped = clamp_to_bounds(trace.lambda, bounds);
  if (clamped != trace.lambda) {
    trace.status = clamped < trace.lambda ? Status::ClampedMax : Status::ClampedMin;
    trace.lambda = clamped;
    trace.solution = sub.solve(clamped);
  }
  return trace;
}

double minimize_reciprocal(const ParametricSubproblem& sub, const DinkelbachOptions& options) {
  const DinkelbachTrace trace = dinkelbach(sub, options);
  if (trace.status != Status::Converged) {
    throw NumericalError("minimize_reciprocal: Dinkelbach did not converge");
  }
  if (!(trace.lambda > 0.0) || !(trace.solution.numerator > 0.0)) {
    throw DomainError("minimize_reciprocal: numerator vanishes at the optimum");
  }
  return 1.0 / trace.lambda;
}

KktReport verify_kkt(const ParametricSubproblem& sub, double lambda, double tol) {
  const SubproblemPoint point = sub.solve(lambda);
  const std::optional<KktData> data = sub.kkt_data(point);
  if (!data) throw DomainError("verify_kkt: subproblem exposes no gradient data");

  const std::size_t n = point.allocation.size();
  if (data->grad_numerator.size() != n || data->grad_denominator.size() != n ||
      data->lower.size() != n || data->upper.size() != n) {
    throw DomainError("verify_kkt: gradient data does not match the allocation size");
  }

  KktReport report;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = point.allocation[i];
    const double g = data->grad_numerator[i] - lambda * data->grad_denominator[i];
    const double lo = data->lower[i];
    const double hi = data->upper[i];
    const bool at_lower = std::isfinite(lo) && x <= lo + 1e-12 * (1.0 + std::abs(lo));
    const bool at_upper = std::isfinite(hi) && x >= hi - 1e-12 * (1.0 + std::abs(hi));
    if (at_lower && at_upper) continue;
    if (at_lower) {
      report.slackness_residual = std::max(report.slackness_residual, g);
    } else if (at_upper) {
      report.slackness_residual = std::max(report.slackness_residual, -g);
    } else {
      report.stationarity_residual = std::max(report.stationarity_residual, std::abs(g));
    }
  }
  report.value_residual = std::abs(point.value());
  report.stationarity = report.stationarity_residual <= tol;
  report.slackness = report.slackness_residual <= tol;
  report.value = report.value_residual <= tol;
  return report;
}

}  // namespace eeopt::fracprog
