#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "eeopt/fracprog.hpp"

/// Energy-efficient power allocation over time-invariant parallel channels.
/// All quantities are per Hz: powers in W/Hz, rates in nat/s/Hz, CNRs in
/// 1/(W/Hz).
namespace eeopt::waterfill {

struct ParallelChannel {
  std::vector<double> cnrs;
  double p_max = std::numeric_limits<double>::infinity();

  void validate() const;
  std::size_t size() const { return cnrs.size(); }
  double best_cnr() const;
};

struct StaticEEProblem {
  ParallelChannel channel;
  double mu = 1.0;
  std::optional<double> sum_power;  // P
  std::optional<double> min_rate;   // R0

  void validate() const;
};

struct Allocation {
  std::vector<double> powers;
  std::vector<double> rates;
  double sum_power = 0.0;
  double sum_rate = 0.0;

  /// sum_rate / (mu + sum_power).
  double energy_efficiency(double mu) const { return sum_rate / (mu + sum_power); }
};

/// Builds an allocation from explicit powers with rates log(1 + cnr * p).
Allocation make_allocation(const ParallelChannel& channel, std::vector<double> powers);

/// p_i = clamp(1/lambda - 1/cnr_i, 0, p_max); channels with cnr_i <= lambda stay idle.
Allocation waterfill_allocate(const ParallelChannel& channel, double lambda);

struct FValue {
  double value;
  Allocation allocation;
};

/// F(lambda) = sum r_i - lambda (mu + sum p_i) at the water-filling allocation.
FValue eval_F(const StaticEEProblem& problem, double lambda);

/// The parametric program of a static problem, for use with the generic solvers.
class StaticSubproblem final : public fracprog::ParametricSubproblem {
 public:
  StaticSubproblem(ParallelChannel channel, double mu);

  fracprog::SubproblemPoint solve(double lambda) const override;
  std::optional<fracprog::KktData> kkt_data(const fracprog::SubproblemPoint& point) const override;

  /// Some lambda with F(lambda) >= 0: the efficiency of a feasible allocation.
  double feasible_start() const;

  const ParallelChannel& channel() const { return channel_; }
  double mu() const { return mu_; }

 private:
  ParallelChannel channel_;
  double mu_;
};

struct StaticSolution {
  fracprog::DinkelbachTrace trace;
  Allocation allocation;
  double lambda = 0.0;
  double ee = 0.0;
  fracprog::LambdaBounds bounds;
};

/// Dinkelbach on the water-filling subproblem, clamped into the lambda range
/// implied by the optional sum-power and sum-rate constraints.
StaticSolution solve_static(const StaticEEProblem& problem, double tolerance = 1e-8,
                            int max_iter = 100);

/// lambda at which the water-filling sum power equals P. When P exceeds the
/// fully clipped sum power, returns the largest lambda at which every usable
/// channel sits at p_max.
double lambda_min_from_power(const ParallelChannel& channel, double sum_power);

/// lambda at which the water-filling sum rate equals R0; +inf for R0 = 0.
double lambda_max_from_rate(const ParallelChannel& channel, double min_rate);

/// Both bounds for a problem; min = 0 and max = +inf when a constraint is absent.
fracprog::LambdaBounds lambda_bounds(const StaticEEProblem& problem);

struct ClosedForm {
  double lambda;
  double power;
};

/// Flat channel without power cap: lambda* = cnr / exp(1 + W0((mu cnr - 1) / e)).
ClosedForm flat_fading_closed_form(double cnr, double mu);

/// Constant SNR gap: every CNR divided by gap >= 1.
ParallelChannel apply_gap(const ParallelChannel& channel, double gap);

}  // namespace eeopt::waterfill
