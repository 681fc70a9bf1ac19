#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eeopt/app/config.hpp"

namespace eeopt::app {

/// One CSV row per sweep point (and per MIMO link group).
struct ResultRow {
  std::string group;
  std::optional<double> sweep_value;
  std::optional<double> lambda;
  std::optional<double> ee;
  std::optional<double> ee_bits_per_joule;
  std::optional<double> sum_power;
  std::optional<double> sum_rate;
  std::optional<double> idle_probability;
  int iterations = 0;
  std::string status;
  std::optional<double> mc_std_error;
};

struct RunResult {
  std::vector<ResultRow> rows;
  bool any_infeasible = false;
  bool any_unconverged = false;
  std::vector<std::string> warnings;
};

RunResult run_scenario(const ScenarioConfig& config);

/// group,sweep_value,lambda,ee,ee_bits_per_joule,sum_power,sum_rate,
/// idle_probability,iterations,status,mc_std_error
std::string csv_header();
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

struct TradeoffRow {
  double lambda;
  double power_plus_mu;
  double sum_power;
  double sum_rate;
  double ee;
  bool is_optimal;
};

/// Points of the rate/power trade-off curve along a lambda sweep, sorted by
/// lambda descending, with the optimum row flagged. Static and mmse solvers.
std::vector<TradeoffRow> tradeoff_curve(const ScenarioConfig& config);

/// lambda,power_plus_mu,sum_power,sum_rate,ee,is_optimal
std::string tradeoff_header();
void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows);

/// %.17g, the number format of every CSV field.
std::string format_number(double x);

}  // namespace eeopt::app
