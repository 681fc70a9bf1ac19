#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "eeopt/numerics.hpp"

/// Concave-convex fractional programming: maximize f1(x) / f2(x) by locating
/// the root of F(lambda) = max_x f1(x) - lambda * f2(x).
namespace eeopt::fracprog {

/// Solution of the parametric program at one value of lambda.
struct SubproblemPoint {
  std::vector<double> allocation;
  double numerator = 0.0;    // f1(x*), rate
  double denominator = 1.0;  // f2(x*), power
  double lambda = 0.0;

  double value() const { return numerator - lambda * denominator; }
  double ratio() const { return numerator / denominator; }
};

/// Per-coordinate first-order data used by verify_kkt. Box bounds may be
/// infinite.
struct KktData {
  std::vector<double> grad_numerator;
  std::vector<double> grad_denominator;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Inner problem of the Dinkelbach method. Implementations must be safe for
/// repeated sequential evaluation; F must be strictly decreasing in lambda.
class ParametricSubproblem {
 public:
  virtual ~ParametricSubproblem() = default;

  virtual SubproblemPoint solve(double lambda) const = 0;

  /// Gradients and bounds at a solved point, if the subproblem exposes them.
  virtual std::optional<KktData> kkt_data(const SubproblemPoint& /*point*/) const {
    return std::nullopt;
  }
};

struct LambdaBounds {
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();

  /// Throws InfeasibleError when min > max.
  void validate() const;
};

enum class Status { Converged, ClampedMin, ClampedMax, MaxIter };

std::string_view to_string(Status status);

struct Iterate {
  double lambda;
  double value;  // F(lambda)
  double numerator;
  double denominator;
};

struct DinkelbachTrace {
  std::vector<Iterate> iterates;
  double lambda = 0.0;
  SubproblemPoint solution;
  int iterations = 0;
  Status status = Status::MaxIter;
};

struct DinkelbachOptions {
  double lambda0 = 0.0;
  double tolerance = 1e-8;
  int max_iter = 100;
};

/// Dinkelbach iteration lambda_{n+1} = f1(x_n*) / f2(x_n*) until
/// |F(lambda_n)| < tolerance. Requires F(lambda0) >= 0.
DinkelbachTrace dinkelbach(const ParametricSubproblem& sub, const DinkelbachOptions& options = {});

/// Bisection on F over a bracket with F(lo) >= 0 > F(hi). Independent of the
/// Dinkelbach path; used as its cross-check.
DinkelbachTrace bisection_solver(const ParametricSubproblem& sub,
                                 const numerics::RootBracket& bracket, double tol);

/// Convenience overload that evaluates F at both endpoints.
DinkelbachTrace bisection_solver(const ParametricSubproblem& sub, double lo, double hi,
                                 double tol);

/// Replaces lambda by the violated endpoint of the bounds.
double clamp_to_bounds(double lambda, const LambdaBounds& bounds);

/// Unconstrained Dinkelbach, clamp into the bounds, then re-solve the
/// subproblem at the clamped lambda.
DinkelbachTrace solve_constrained(const ParametricSubproblem& sub, const LambdaBounds& bounds,
                                  const DinkelbachOptions& options = {});

/// Minimum of f2 / f1 (energy per nat), obtained as the reciprocal of the
/// maximum of f1 / f2.
double minimize_reciprocal(const ParametricSubproblem& sub, const DinkelbachOptions& options = {});

struct KktReport {
  double stationarity_residual = 0.0;  // max |grad f1 - lambda grad f2| over interior coordinates
  double slackness_residual = 0.0;     // max sign violation of bound multipliers
  double value_residual = 0.0;         // |F(lambda)|
  bool stationarity = false;
  bool slackness = false;
  bool value = false;

  bool all() const { return stationarity && slackness && value; }
};

/// Checks first-order optimality of x*(lambda) and F(lambda) = 0.
KktReport verify_kkt(const ParametricSubproblem& sub, double lambda, double tol);

}  // namespace eeopt::fracprog
