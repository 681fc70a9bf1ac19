#include "eeopt/app/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

#include "eeopt/ergodic.hpp"
#include "eeopt/mmse.hpp"
#include "eeopt/nested.hpp"
#include "eeopt/waterfill.hpp"

namespace eeopt::app {

namespace {

struct PointSetup {
  double mu;
  double conversion;
};

PointSetup setup_point(const ScenarioConfig& c, std::optional<double> sweep_value, int n_t) {
  if (c.sweep.variable == SweepVariable::Mu) return {*sweep_value, std::numbers::log2e};
  if (!c.power_model) return {*c.mu, std::numbers::log2e};
  powermodel::PowerModel model = *c.power_model;
  if (auto* g = std::get_if<powermodel::GenericBsModel>(&model)) {
    if (c.sweep.variable == SweepVariable::Pc) g->p_c = *sweep_value;
    if (c.solver == SolverKind::Mimo) g->n_a = n_t;
  }
  const powermodel::MuScale ms = powermodel::to_mu_scale(model);
  return {ms.mu, ms.conversion};
}

std::vector<mmse::MmseTable> build_tables(const ScenarioConfig& c) {
  std::map<std::string, mmse::MmseTable> cache;
  std::vector<mmse::MmseTable> tables;
  for (const auto& label : c.constellations) {
    auto it = cache.find(label);
    if (it == cache.end()) {
      it = cache.emplace(label, mmse::build_table(mmse::Constellation::parse(label), c.rho_max,
                                                  c.table_points))
               .first;
    }
    tables.push_back(it->second);
  }
  return tables;
}

void fill_trace(ResultRow& row, const fracprog::DinkelbachTrace& trace) {
  row.iterations = trace.iterations;
  row.status = std::string(fracprog::to_string(trace.status));
}

ResultRow from_ergodic(const ergodic::ErgodicSolution& s, const PointSetup& p) {
  ResultRow row;
  row.lambda = s.lambda;
  row.ee = s.ee;
  row.ee_bits_per_joule = s.ee * p.conversion;
  row.sum_power = s.avg_power;
  row.sum_rate = s.avg_rate;
  row.idle_probability = s.idle_probability;
  row.iterations = s.iterations;
  row.status = std::string(fracprog::to_string(s.status));
  row.mc_std_error = s.ee_std_error;
  return row;
}

ergodic::ParallelFadingOptions parallel_options(const ScenarioConfig& c) {
  ergodic::ParallelFadingOptions o;
  o.tolerance = c.tolerance;
  o.max_iter = c.max_iter;
  o.avg_power_max = c.avg_power_max;
  o.avg_rate_min = c.avg_rate_min;
  return o;
}

struct Shared {
  std::optional<ergodic::ParallelFadingScenario> parallel;
  std::map<std::pair<int, int>, ergodic::ParallelFadingScenario> mimo;
  std::vector<mmse::MmseTable> tables;
};

const ergodic::ParallelFadingScenario& mimo_for(const ScenarioConfig& c, Shared& shared, int n_t,
                                                int n_r) {
  const auto key = std::make_pair(n_t, n_r);
  auto it = shared.mimo.find(key);
  if (it == shared.mimo.end()) {
    it = shared.mimo
             .emplace(key, ergodic::mimo_scenario(n_t, n_r, c.path_gain / c.noise_psd, c.samples,
                                                  c.seed))
             .first;
  }
  return it->second;
}

ResultRow solve_point(const ScenarioConfig& c, Shared& shared, const PointSetup& p, int n_t,
                      int n_r) {
  ResultRow row;
  switch (c.solver) {
    case SolverKind::Static: {
      waterfill::StaticEEProblem problem;
      problem.channel = {c.cnrs, c.p_max};
      problem.mu = p.mu;
      problem.sum_power = c.sum_power;
      problem.min_rate = c.min_rate;
      const auto s = waterfill::solve_static(problem, c.tolerance, c.max_iter);
      row.lambda = s.lambda;
      row.ee = s.ee;
      row.sum_power = s.allocation.sum_power;
      row.sum_rate = s.allocation.sum_rate;
      fill_trace(row, s.trace);
      break;
    }
    case SolverKind::FlatClosedForm: {
      const auto cf = waterfill::flat_fading_closed_form(c.cnrs[0], p.mu);
      const double rate = std::log1p(c.cnrs[0] * cf.power);
      row.lambda = cf.lambda;
      row.ee = rate / (p.mu + cf.power);
      row.sum_power = cf.power;
      row.sum_rate = rate;
      row.status = "converged";
      break;
    }
    case SolverKind::ErgodicRayleigh: {
      ergodic::ErgodicProblem problem{ergodic::FadingModel::rayleigh(c.mean_cnr), p.mu,
                                      c.avg_power_max, c.avg_rate_min};
      row = from_ergodic(ergodic::solve_ergodic(problem, c.tolerance, c.max_iter), p);
      break;
    }
    case SolverKind::ErgodicParallel:
      row = from_ergodic(ergodic::solve_parallel_fading(*shared.parallel, p.mu, parallel_options(c)),
                         p);
      break;
    case SolverKind::Mimo:
      row = from_ergodic(
          ergodic::solve_parallel_fading(mimo_for(c, shared, n_t, n_r), p.mu, parallel_options(c)),
          p);
      break;
    case SolverKind::Mmse: {
      const mmse::MercuryChannel channel{shared.tables, c.cnrs};
      const auto s = mmse::solve_mmse_ee(channel, p.mu, c.tolerance, c.max_iter);
      row.lambda = s.lambda;
      row.ee = s.ee;
      row.sum_power = s.allocation.sum_power;
      row.sum_rate = s.allocation.sum_rate;
      fill_trace(row, s.trace);
      break;
    }
    case SolverKind::Nested: {
      nested::NestedSolution s;
      if (c.inner == "mercury") {
        s = nested::solve_nested(nested::MercuryOracle({shared.tables, c.cnrs}), p.mu, c.tolerance);
      } else {
        s = nested::solve_nested(nested::WaterfillOracle({c.cnrs, c.p_max}), p.mu, c.tolerance);
      }
      row.lambda = s.allocation.level;
      row.ee = s.ee;
      row.sum_power = s.allocation.sum_power;
      row.sum_rate = s.allocation.rate;
      row.iterations = s.iterations;
      row.status = "converged";
      break;
    }
  }
  if (row.ee) row.ee_bits_per_joule = *row.ee * p.conversion;
  return row;
}

void append(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v) line += format_number(*v);
}

std::vector<double> descending_grid(double hi, double lo, int points) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    v[static_cast<std::size_t>(k)] = hi * std::pow(lo / hi, static_cast<double>(k) / (points - 1));
  }
  v.front() = hi;
  v.back() = lo;
  return v;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunResult run_scenario(const ScenarioConfig& c) {
  c.validate();
  Shared shared;
  if (c.solver == SolverKind::ErgodicParallel) {
    shared.parallel = ergodic::rayleigh_scenario(c.mean_cnrs, c.samples, c.seed);
  }
  if (c.solver == SolverKind::Mmse || (c.solver == SolverKind::Nested && c.inner == "mercury")) {
    shared.tables = build_tables(c);
  }

  struct Group {
    std::string label;
    int n_t;
    int n_r;
  };
  std::vector<Group> groups;
  if (c.solver == SolverKind::Mimo && c.sweep.variable != SweepVariable::N) {
    for (const auto& link : c.links) groups.push_back({link.label(), link.n_t, link.n_r});
  } else if (c.solver == SolverKind::Mimo) {
    groups.push_back({c.sweep_n_r ? "n_r=" + std::to_string(*c.sweep_n_r) : "balanced", 0, 0});
  } else {
    groups.push_back({"", 1, 1});
  }

  std::vector<std::optional<double>> points;
  if (c.sweep.variable == SweepVariable::None) {
    points.push_back(std::nullopt);
  } else {
    points.assign(c.sweep.values.begin(), c.sweep.values.end());
  }

  RunResult result;
  for (const Group& group : groups) {
    for (const auto& value : points) {
      int n_t = group.n_t;
      int n_r = group.n_r;
      if (c.sweep.variable == SweepVariable::N) {
        n_t = static_cast<int>(*value);
        n_r = c.sweep_n_r.value_or(n_t);
      }
      const PointSetup setup = setup_point(c, value, n_t);
      ResultRow row;
      try {
        row = solve_point(c, shared, setup, n_t, n_r);
      } catch (const InfeasibleError& e) {
        row = ResultRow{};
        row.status = "infeasible";
        result.any_infeasible = true;
        result.warnings.push_back(e.what());
      }
      if (row.status == "max-iter") result.any_unconverged = true;
      row.group = group.label;
      row.sweep_value = value;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string csv_header() {
  return "group,sweep_value,lambda,ee,ee_bits_per_joule,sum_power,sum_rate,idle_probability,"
         "iterations,status,mc_std_error";
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) {
    std::string line = r.group;
    append(line, r.sweep_value);
    append(line, r.lambda);
    append(line, r.ee);
    append(line, r.ee_bits_per_joule);
    append(line, r.sum_power);
    append(line, r.sum_rate);
    append(line, r.idle_probability);
    line += ',' + std::to_string(r.iterations);
    line += ',' + r.status;
    append(line, r.mc_std_error);
    out << line << '\n';
  }
}

std::vector<TradeoffRow> tradeoff_curve(const ScenarioConfig& c) {
  c.validate();
  if (c.solver != SolverKind::Static && c.solver != SolverKind::Mmse) {
    throw ConfigError("solver", "tradeoff needs the static or mmse solver");
  }
  std::optional<double> first;
  if (c.sweep.variable != SweepVariable::None) first = c.sweep.values.front();
  const PointSetup p = setup_point(c, first, 1);

  struct Sample {
    double power;
    double rate;
  };
  std::function<Sample(double)> at;
  double lambda_star = 0.0;
  double hi = 0.0;
  double lo = 0.0;

  waterfill::ParallelChannel channel{c.cnrs, c.p_max};
  std::vector<mmse::MmseTable> tables;
  std::optional<mmse::MercuryChannel> mercury;
  if (c.solver == SolverKind::Static) {
    waterfill::StaticEEProblem problem{channel, p.mu, c.sum_power, c.min_rate};
    lambda_star = waterfill::solve_static(problem, c.tolerance, c.max_iter).lambda;
    at = [&](double lambda) {
      const auto a = waterfill::waterfill_allocate(channel, lambda);
      return Sample{a.sum_power, a.sum_rate};
    };
    hi = channel.best_cnr();
    lo = hi * 1e-4;
    if (std::isfinite(c.p_max)) {
      double clip = numerics::kInf;
      for (double g : c.cnrs) {
        if (g > 0.0) clip = std::min(clip, 1.0 / (c.p_max + 1.0 / g));
      }
      lo = std::max(lo, clip);
    }
  } else {
    tables = build_tables(c);
    mercury = mmse::MercuryChannel{tables, c.cnrs};
    lambda_star = mmse::solve_mmse_ee(*mercury, p.mu, c.tolerance, c.max_iter).lambda;
    at = [&](double lambda) {
      const auto a = mmse::mercury_allocate(*mercury, lambda);
      return Sample{a.sum_power, a.sum_rate};
    };
    for (std::size_t i = 0; i < mercury->size(); ++i) {
      const auto& t = mercury->table(i);
      const double g = c.cnrs[i];
      hi = std::max(hi, g * t.mmse.front());
      if (g > 0.0 && !t.zero()) lo = std::max(lo, g * t.mmse_end());
    }
    lo *= 1.0 + 1e-9;
  }
  if (!(hi > 0.0)) throw InfeasibleError("tradeoff: every subchannel has zero gain");
  if (!(lo < hi)) lo = hi * 0.5;

  std::vector<double> lambdas = descending_grid(hi, lo, c.tradeoff_points);
  const bool star_in_range = lambda_star > 0.0;
  if (star_in_range) lambdas.push_back(lambda_star);
  std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  std::vector<TradeoffRow> rows;
  for (double lambda : lambdas) {
    const Sample s = at(lambda);
    const double denom = p.mu + s.power;
    rows.push_back({lambda, denom, s.power, s.rate, s.rate / denom,
                    star_in_range && lambda == lambda_star});
  }
  return rows;
}

std::string tradeoff_header() { return "lambda,power_plus_mu,sum_power,sum_rate,ee,is_optimal"; }

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows) {
  out << tradeoff_header() << '\n';
  for (const auto& r : rows) {
    out << format_number(r.lambda) << ',' << format_number(r.power_plus_mu) << ','
        << format_number(r.sum_power) << ',' << format_number(r.sum_rate) << ','
        << format_number(r.ee) << ',' << (r.is_optimal ? 1 : 0) << '\n';
  }
}

}  // namespace eeopt::app
