// eeopt: run energy-efficiency scenarios from JSON configs and emit CSV.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "eeopt/app/config.hpp"
#include "eeopt/app/runner.hpp"

namespace {

enum Exit { kOk = 0, kSchema = 1, kInfeasible = 2, kNumerical = 3 };

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "eeopt: cannot write " << out_path << '\n';
    return kNumerical;
  }
  return kOk;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const eeopt::app::ConfigError& e) {
    std::cerr << "eeopt: config error: " << e.what() << '\n';
    return kSchema;
  } catch (const eeopt::InfeasibleError& e) {
    std::cerr << "eeopt: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const eeopt::Error& e) {
    std::cerr << "eeopt: numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power allocation scenarios"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  auto* run = app.add_subcommand("run", "Solve every sweep point and write the result CSV");
  run->add_option("config", config_path, "Scenario file (JSON)")->required();
  run->add_option("--out", out_path, "Write the CSV here instead of standard output");
  run->add_option("--seed", seed, "Override monte_carlo.seed");
  run->add_option("--tol", tol, "Override the solver tolerance")->check(CLI::PositiveNumber);

  auto* tradeoff = app.add_subcommand("tradeoff", "Write the rate/power trade-off curve CSV");
  tradeoff->add_option("config", config_path, "Scenario file (JSON)")->required();
  tradeoff->add_option("--out", out_path, "Write the CSV here instead of standard output");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without solving");
  validate->add_option("config", config_path, "Scenario file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kSchema;
  }

  if (*validate) {
    return guarded([&] {
      eeopt::app::load_config(config_path);
      std::cout << config_path << ": ok\n";
      return kOk;
    });
  }

  if (*tradeoff) {
    return guarded([&] {
      const auto config = eeopt::app::load_config(config_path);
      std::ostringstream os;
      eeopt::app::write_tradeoff_csv(os, eeopt::app::tradeoff_curve(config));
      return emit(os.str(), out_path);
    });
  }

  return guarded([&] {
    auto config = eeopt::app::load_config(config_path);
    if (seed) config.seed = *seed;
    if (tol) config.tolerance = *tol;
    const auto result = eeopt::app::run_scenario(config);
    std::ostringstream os;
    eeopt::app::write_csv(os, result.rows);
    const int written = emit(os.str(), out_path);
    for (const auto& w : result.warnings) std::cerr << "eeopt: " << w << '\n';
    if (written != kOk) return written;
    if (result.any_infeasible) return static_cast<int>(kInfeasible);
    if (result.any_unconverged) {
      std::cerr << "eeopt: some sweep points hit the iteration limit\n";
      return static_cast<int>(kNumerical);
    }
    return static_cast<int>(kOk);
  });
}
