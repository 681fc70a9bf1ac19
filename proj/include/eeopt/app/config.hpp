#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eeopt/error.hpp"
#include "eeopt/numerics.hpp"
#include "eeopt/powermodel.hpp"

/// Scenario files for the command-line tool (JSON, schema_version 1).
namespace eeopt::app {

inline constexpr int kSchemaVersion = 1;

/// Schema violation; `where` is the JSON path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class SolverKind { Static, FlatClosedForm, ErgodicRayleigh, ErgodicParallel, Mimo, Mmse, Nested };

std::string to_string(SolverKind kind);

enum class SweepVariable { None, Mu, Pc, N };

struct SweepSpec {
  SweepVariable variable = SweepVariable::None;
  std::vector<double> values;
};

struct MimoLink {
  int n_t = 1;
  int n_r = 1;
  std::string label() const;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  SolverKind solver = SolverKind::Static;

  // Static, closed-form, mmse and nested channels.
  std::vector<double> cnrs;
  double p_max = numerics::kInf;
  // Ergodic channels.
  double mean_cnr = 0.0;
  std::vector<double> mean_cnrs;

  std::optional<double> mu;
  std::optional<powermodel::PowerModel> power_model;

  // mmse solver and the mercury oracle of the nested solver.
  std::vector<std::string> constellations;
  double rho_max = 1e4;
  int table_points = 512;
  std::string inner = "waterfill";  // nested: waterfill | mercury

  std::optional<double> sum_power;
  std::optional<double> min_rate;
  std::optional<double> avg_power_max;
  std::optional<double> avg_rate_min;

  // mimo solver. Links are row groups; with an `n` sweep the transmit count
  // follows the sweep and n_r is either fixed or equal to n.
  std::vector<MimoLink> links;
  std::optional<int> sweep_n_r;
  double noise_psd = 0.0;   // W/Hz
  double path_gain = 1.0;   // linear

  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  SweepSpec sweep;
  double tolerance = 1e-10;
  int max_iter = 100;
  int tradeoff_points = 200;

  /// Semantic checks that span several fields. Throws ConfigError.
  void validate() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace eeopt::app
