#pragma once

#include <vector>

#include "eeopt/mmse.hpp"
#include "eeopt/waterfill.hpp"

/// Efficiency maximization as a one-dimensional search over t = 1/(mu + P)
/// around a sum-rate maximizer with a sum-power budget P.
namespace eeopt::nested {

struct RateMaxResult {
  std::vector<double> powers;
  double sum_power = 0.0;
  double rate = 0.0;
  /// Inner dual variable: the cutoff CNR (inverse water level) for
  /// water-filling, eta for mercury/water-filling.
  double level = 0.0;
};

class RateMaxOracle {
 public:
  virtual ~RateMaxOracle() = default;
  virtual RateMaxResult solve(double sum_power) const = 0;
  /// Largest budget the oracle can resolve; +inf when unbounded.
  virtual double max_power() const { return numerics::kInf; }
};

/// Water-filling with the level placed exactly between sorted breakpoints.
/// Per-channel caps p_max are honored.
RateMaxResult rate_max_waterfill(const waterfill::ParallelChannel& channel, double sum_power);

/// Mercury/water-filling: p_i = MMSE_i^-1(min{MMSE_i(0), eta / cnr_i}) / cnr_i
/// with eta solving sum p_i = P.
RateMaxResult rate_max_mercury(const mmse::MercuryChannel& channel, double sum_power);

/// Sum power of the mercury allocation at the smallest eta the tables
/// resolve. Budgets above it are clipped when every table is saturated.
double mercury_power_capacity(const mmse::MercuryChannel& channel);

class WaterfillOracle final : public RateMaxOracle {
 public:
  explicit WaterfillOracle(waterfill::ParallelChannel channel);
  RateMaxResult solve(double sum_power) const override;

 private:
  waterfill::ParallelChannel channel_;
};

class MercuryOracle final : public RateMaxOracle {
 public:
  explicit MercuryOracle(mmse::MercuryChannel channel);
  RateMaxResult solve(double sum_power) const override;
  double max_power() const override { return capacity_; }

 private:
  mmse::MercuryChannel channel_;
  double capacity_;
  bool saturates_;
};

struct NestedSolution {
  double t = 0.0;
  double ee = 0.0;
  double sum_power = 0.0;  // P* = 1/t* - mu
  RateMaxResult allocation;
  int iterations = 0;
  int oracle_calls = 0;
};

/// Golden-section maximization of g(t) = t * rate(1/t - mu) on (eps, 1/mu).
NestedSolution solve_nested(const RateMaxOracle& oracle, double mu, double tol = 1e-12);

}  // namespace eeopt::nested
