#include "eeopt/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eeopt/error.hpp"
#include "eeopt/numerics.hpp"

namespace eeopt::waterfill {

namespace {

constexpr double kRootTol = 1e-15;

double power_at(double cnr, double lambda, double p_max) {
  if (!(cnr > lambda)) return 0.0;
  return std::min(1.0 / lambda - 1.0 / cnr, p_max);
}

double total_power(const ParallelChannel& channel, double lambda) {
  double sum = 0.0;
  for (double g : channel.cnrs) sum += power_at(g, lambda, channel.p_max);
  return sum;
}

double total_rate(const ParallelChannel& channel, double lambda) {
  double sum = 0.0;
  for (double g : channel.cnrs) sum += std::log1p(g * power_at(g, lambda, channel.p_max));
  return sum;
}

std::size_t active_count(const ParallelChannel& channel) {
  return static_cast<std::size_t>(
      std::count_if(channel.cnrs.begin(), channel.cnrs.end(), [](double g) { return g > 0.0; }));
}

// Largest lambda at which every channel with cnr > 0 is clipped at p_max.
double full_clip_lambda(const ParallelChannel& channel) {
  double lambda = std::numeric_limits<double>::infinity();
  for (double g : channel.cnrs) {
    if (g > 0.0) lambda = std::min(lambda, 1.0 / (channel.p_max + 1.0 / g));
  }
  return lambda;
}

// Solves target(lambda) = goal for a nonincreasing map on (lo, best_cnr],
// working in the normalized variable u = lambda / best_cnr.
double solve_monotone(const ParallelChannel& channel, double lo,
                      double (*map)(const ParallelChannel&, double), double goal) {
  const double scale = channel.best_cnr();
  auto f = [&](double u) { return map(channel, u * scale) / goal - 1.0; };
  const double u_lo = lo / scale;
  if (f(u_lo) <= 0.0) return lo;
  const auto bracket = numerics::RootBracket::make(f, u_lo, 1.0);
  return numerics::find_root(f, bracket, kRootTol) * scale;
}

}  // namespace

void ParallelChannel::validate() const {
  if (cnrs.empty()) throw DomainError("ParallelChannel: at least one subchannel is required");
  for (double g : cnrs) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw DomainError("ParallelChannel: CNRs must be finite and non-negative");
    }
  }
  if (!(p_max > 0.0)) throw DomainError("ParallelChannel: p_max must be positive");
}

double ParallelChannel::best_cnr() const {
  return cnrs.empty() ? 0.0 : *std::max_element(cnrs.begin(), cnrs.end());
}

void StaticEEProblem::validate() const {
  channel.validate();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("StaticEEProblem: mu must be > 0");
  if (sum_power && !(*sum_power > 0.0)) {
    throw DomainError("StaticEEProblem: sum power cap must be > 0");
  }
  if (min_rate && !(*min_rate >= 0.0)) {
    throw DomainError("StaticEEProblem: minimum rate must be >= 0");
  }
}

Allocation make_allocation(const ParallelChannel& channel, std::vector<double> powers) {
  Allocation a;
  a.powers = std::move(powers);
  a.rates.resize(a.powers.size());
  for (std::size_t i = 0; i < a.powers.size(); ++i) {
    a.rates[i] = std::log1p(channel.cnrs[i] * a.powers[i]);
    a.sum_power += a.powers[i];
    a.sum_rate += a.rates[i];
  }
  return a;
}

Allocation waterfill_allocate(const ParallelChannel& channel, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("waterfill_allocate: lambda must be > 0");
  std::vector<double> powers(channel.size());
  for (std::size_t i = 0; i < powers.size(); ++i) {
    powers[i] = power_at(channel.cnrs[i], lambda, channel.p_max);
  }
  return make_allocation(channel, std::move(powers));
}

FValue eval_F(const StaticEEProblem& problem, double lambda) {
  Allocation a = waterfill_allocate(problem.channel, lambda);
  const double value = a.sum_rate - lambda * (problem.mu + a.sum_power);
  return {value, std::move(a)};
}

StaticSubproblem::StaticSubproblem(ParallelChannel channel, double mu)
    : channel_(std::move(channel)), mu_(mu) {
  channel_.validate();
  if (!(mu_ > 0.0)) throw DomainError("StaticSubproblem: mu must be > 0");
}

fracprog::SubproblemPoint StaticSubproblem::solve(double lambda) const {
  Allocation a = waterfill_allocate(channel_, lambda);
  fracprog::SubproblemPoint point;
  point.allocation = std::move(a.powers);
  point.numerator = a.sum_rate;
  point.denominator = mu_ + a.sum_power;
  point.lambda = lambda;
  return point;
}

std::optional<fracprog::KktData> StaticSubproblem::kkt_data(
    const fracprog::SubproblemPoint& point) const {
  const std::size_t n = channel_.size();
  fracprog::KktData data;
  data.grad_numerator.resize(n);
  data.grad_denominator.assign(n, 1.0);
  data.lower.assign(n, 0.0);
  data.upper.assign(n, channel_.p_max);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = channel_.cnrs[i];
    data.grad_numerator[i] = g / (1.0 + g * point.allocation[i]);
  }
  return data;
}

double StaticSubproblem::feasible_start() const {
  const double best = channel_.best_cnr();
  if (!(best > 0.0)) return 0.0;
  const Allocation a = waterfill_allocate(channel_, 0.5 * best);
  return a.energy_efficiency(mu_);
}

double lambda_min_from_power(const ParallelChannel& channel, double sum_power) {
  channel.validate();
  if (!(sum_power > 0.0)) throw DomainError("lambda_min_from_power: P must be > 0");
  const std::size_t active = active_count(channel);
  if (active == 0) return 0.0;

  double lo;
  if (std::isfinite(channel.p_max)) {
    const double full = full_clip_lambda(channel);
    if (sum_power >= static_cast<double>(active) * channel.p_max) return full;
    lo = full;
  } else {
    lo = 1.0 / (sum_power + 1.0 / channel.best_cnr());
  }
  return solve_monotone(channel, lo, total_power, sum_power);
}

double lambda_max_from_rate(const ParallelChannel& channel, double min_rate) {
  channel.validate();
  if (!(min_rate >= 0.0)) throw DomainError("lambda_max_from_rate: R0 must be >= 0");
  if (min_rate == 0.0) return std::numeric_limits<double>::infinity();
  if (active_count(channel) == 0) {
    throw InfeasibleError("lambda_max_from_rate: no usable subchannel for a positive rate");
  }

  double lo;
  if (std::isfinite(channel.p_max)) {
    double full_rate = 0.0;
    for (double g : channel.cnrs) full_rate += std::log1p(g * channel.p_max);
    if (min_rate > full_rate * (1.0 + 1e-15)) {
      std::ostringstream os;
      os << "minimum rate " << min_rate << " exceeds the full-power rate " << full_rate;
      throw InfeasibleError(os.str());
    }
    lo = full_clip_lambda(channel);
    if (min_rate >= full_rate) return lo;
  } else {
    lo = std::max(channel.best_cnr() * std::exp(-min_rate), std::numeric_limits<double>::min());
  }
  return solve_monotone(channel, lo, total_rate, min_rate);
}

fracprog::LambdaBounds lambda_bounds(const StaticEEProblem& problem) {
  fracprog::LambdaBounds bounds;
  if (problem.sum_power) bounds.min = lambda_min_from_power(problem.channel, *problem.sum_power);
  if (problem.min_rate) bounds.max = lambda_max_from_rate(problem.channel, *problem.min_rate);
  return bounds;
}

StaticSolution solve_static(const StaticEEProblem& problem, double tolerance, int max_iter) {
  problem.validate();
  StaticSolution solution;
  solution.bounds = lambda_bounds(problem);
  solution.bounds.validate();

  const StaticSubproblem sub(problem.channel, problem.mu);
  const double start = sub.feasible_start();
  if (!(start > 0.0)) {
    // Every CNR is zero: nothing can be transmitted.
    solution.allocation = make_allocation(problem.channel,
                                          std::vector<double>(problem.channel.size(), 0.0));
    solution.trace.status = fracprog::Status::Converged;
    return solution;
  }

  fracprog::DinkelbachOptions options;
  options.lambda0 = start;
  options.tolerance = tolerance;
  options.max_iter = max_iter;
  solution.trace = fracprog::solve_constrained(sub, solution.bounds, options);
  solution.lambda = solution.trace.lambda;
  solution.allocation = waterfill_allocate(problem.channel, solution.lambda);
  solution.ee = solution.allocation.energy_efficiency(problem.mu);
  return solution;
}

ClosedForm flat_fading_closed_form(double cnr, double mu) {
  if (!(cnr > 0.0) || !(mu > 0.0)) {
    throw DomainError("flat_fading_closed_form: cnr and mu must be > 0");
  }
  const double w = numerics::lambert_w0((mu * cnr - 1.0) / std::numbers::e);
  const double lambda = cnr / std::exp(1.0 + w);
  return {lambda, std::max(0.0, 1.0 / lambda - 1.0 / cnr)};
}

ParallelChannel apply_gap(const ParallelChannel& channel, double gap) {
  if (!(gap >= 1.0) || !std::isfinite(gap)) {
    throw DomainError("apply_gap: gap must be >= 1 (0 dB)");
  }
  ParallelChannel out = channel;
  for (double& g : out.cnrs) g /= gap;
  return out;
}

}  // namespace eeopt::waterfill
