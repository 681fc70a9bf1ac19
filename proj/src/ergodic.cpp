#include "eeopt/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "eeopt/error.hpp"

namespace eeopt::ergodic {

namespace {

using numerics::kInf;

constexpr double kLogRootTol = 1e-14;

// Root of a strictly decreasing positive map g(lambda) = target, searched in
// log(lambda) starting from `start`.
double solve_decreasing(const std::function<double(double)>& g, double target, double start) {
  double lo = start;
  double hi = start;
  int guard = 0;
  while (g(lo) < target) {
    lo *= 0.5;
    if (++guard > 2000 || lo == 0.0) throw NumericalError("could not bracket the lambda bound");
  }
  guard = 0;
  while (g(hi) > target) {
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi)) {
      throw NumericalError("could not bracket the lambda bound");
    }
  }
  if (lo == hi) return lo;
  auto f = [&](double s) { return g(std::exp(s)) / target - 1.0; };
  const auto bracket = numerics::RootBracket::make(f, std::log(lo), std::log(hi));
  return std::exp(numerics::find_root(f, bracket, kLogRootTol));
}

class PdfSubproblem final : public fracprog::ParametricSubproblem {
 public:
  PdfSubproblem(const FadingModel& fading, double mu, bool closed_form)
      : fading_(fading), mu_(mu), closed_form_(closed_form) {}

  PolicyAverages averages(double lambda) const {
    return closed_form_ ? averages_rayleigh(fading_.mean_cnr, lambda)
                        : averages_pdf(fading_, lambda);
  }

  fracprog::SubproblemPoint solve(double lambda) const override {
    if (!(lambda > 0.0)) throw DomainError("ergodic subproblem: lambda must be > 0");
    const PolicyAverages avg = averages(lambda);
    fracprog::SubproblemPoint point;
    point.allocation = {1.0 / lambda};  // water level
    point.numerator = avg.rate;
    point.denominator = mu_ + avg.power;
    point.lambda = lambda;
    return point;
  }

  double feasible_start() const {
    const PolicyAverages avg = averages(fading_.mean());
    return avg.rate / (mu_ + avg.power);
  }

 private:
  const FadingModel& fading_;
  double mu_;
  bool closed_form_;
};

struct SampleTotals {
  double rate = 0.0;
  double power = 0.0;
  double idle = 0.0;
};

SampleTotals sample_averages(const ParallelFadingScenario& s, double lambda) {
  SampleTotals t;
  const double inv = 1.0 / lambda;
  std::size_t idle = 0;
  for (std::size_t j = 0; j < s.samples; ++j) {
    const double* g = s.row(j);
    bool silent = true;
    for (std::size_t i = 0; i < s.subchannels; ++i) {
      if (g[i] > lambda) {
        t.rate += std::log(g[i] * inv);
        t.power += inv - 1.0 / g[i];
        silent = false;
      }
    }
    idle += silent ? 1 : 0;
  }
  const double n = static_cast<double>(s.samples);
  t.rate /= n;
  t.power /= n;
  t.idle = static_cast<double>(idle) / n;
  return t;
}

class SampledSubproblem final : public fracprog::ParametricSubproblem {
 public:
  SampledSubproblem(const ParallelFadingScenario& scenario, double mu)
      : scenario_(scenario), mu_(mu) {}

  fracprog::SubproblemPoint solve(double lambda) const override {
    if (!(lambda > 0.0)) throw DomainError("sampled subproblem: lambda must be > 0");
    const SampleTotals t = sample_averages(scenario_, lambda);
    fracprog::SubproblemPoint point;
    point.allocation = {1.0 / lambda};
    point.numerator = t.rate;
    point.denominator = mu_ + t.power;
    point.lambda = lambda;
    return point;
  }

 private:
  const ParallelFadingScenario& scenario_;
  double mu_;
};

void check_scenario_row(const double* row, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    if (!(row[i] >= 0.0) || !std::isfinite(row[i])) {
      throw DomainError("ParallelFadingScenario: CNR samples must be finite and non-negative");
    }
  }
}

}  // namespace

FadingModel FadingModel::rayleigh(double mean_cnr) {
  FadingModel m;
  m.kind = Kind::Rayleigh;
  m.mean_cnr = mean_cnr;
  m.validate();
  return m;
}

FadingModel FadingModel::tabulated(std::vector<double> grid, std::vector<double> density) {
  FadingModel m;
  m.kind = Kind::Tabulated;
  m.grid = std::move(grid);
  m.density = std::move(density);
  m.validate();
  m.mean_cnr = m.mean();
  return m;
}

void FadingModel::validate() const {
  if (kind == Kind::Rayleigh) {
    if (!(mean_cnr > 0.0) || !std::isfinite(mean_cnr)) {
      throw DomainError("FadingModel: Rayleigh mean CNR must be > 0");
    }
    return;
  }
  if (grid.size() < 2 || grid.size() != density.size()) {
    throw DomainError("FadingModel: tabulated density needs >= 2 matching grid/density points");
  }
  double mass = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0) || !(density[k] >= 0.0) || !std::isfinite(density[k])) {
      throw DomainError("FadingModel: grid and density must be non-negative");
    }
    if (k > 0) {
      if (!(grid[k] > grid[k - 1])) throw DomainError("FadingModel: grid must increase strictly");
      mass += 0.5 * (density[k] + density[k - 1]) * (grid[k] - grid[k - 1]);
    }
  }
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "FadingModel: density integrates to " << mass << ", expected 1";
    throw DomainError(os.str());
  }
}

double FadingModel::pdf(double cnr) const {
  if (kind == Kind::Rayleigh) return cnr < 0.0 ? 0.0 : std::exp(-cnr / mean_cnr) / mean_cnr;
  if (cnr < grid.front() || cnr > grid.back()) return 0.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), cnr);
  if (it == grid.end()) return density.back();
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  const double t = (cnr - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return density[k - 1] + t * (density[k] - density[k - 1]);
}

double FadingModel::mean() const {
  if (kind == Kind::Rayleigh) return mean_cnr;
  // Exact first moment of the piecewise-linear density.
  double m = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double a = grid[k - 1];
    const double b = grid[k];
    const double fa = density[k - 1];
    const double fb = density[k];
    const double h = b - a;
    m += h * (fa * (2.0 * a + b) + fb * (a + 2.0 * b)) / 6.0;
  }
  return m;
}

void ErgodicProblem::validate() const {
  fading.validate();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("ErgodicProblem: mu must be > 0");
  if (avg_power_max && !(*avg_power_max > 0.0)) {
    throw DomainError("ErgodicProblem: average power cap must be > 0");
  }
  if (avg_rate_min && !(*avg_rate_min >= 0.0)) {
    throw DomainError("ErgodicProblem: average rate floor must be >= 0");
  }
}

double policy(double lambda, double cnr) {
  if (!(lambda > 0.0)) throw DomainError("policy: lambda must be > 0");
  return cnr > lambda ? 1.0 / lambda - 1.0 / cnr : 0.0;
}

PolicyAverages averages_pdf(const FadingModel& fading, double lambda,
                            const numerics::QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("averages_pdf: lambda must be > 0");
  auto rate = [&](double g) { return g > lambda ? std::log(g / lambda) * fading.pdf(g) : 0.0; };
  auto power = [&](double g) { return g > lambda ? (1.0 / lambda - 1.0 / g) * fading.pdf(g) : 0.0; };
  auto mass = [&](double g) { return fading.pdf(g); };

  PolicyAverages avg{0.0, 0.0, 0.0};
  if (fading.kind == FadingModel::Kind::Rayleigh) {
    avg.rate = numerics::integrate(rate, lambda, kInf, spec);
    avg.power = numerics::integrate(power, lambda, kInf, spec);
    avg.active_probability = numerics::integrate(mass, lambda, kInf, spec);
    return avg;
  }
  // Piecewise over the grid so that the density kinks sit on panel edges.
  for (std::size_t k = 1; k < fading.grid.size(); ++k) {
    const double b = fading.grid[k];
    if (b <= lambda) continue;
    const double a = std::max(fading.grid[k - 1], lambda);
    avg.rate += numerics::integrate(rate, a, b, spec);
    avg.power += numerics::integrate(power, a, b, spec);
    avg.active_probability += numerics::integrate(mass, a, b, spec);
  }
  return avg;
}

PolicyAverages averages_rayleigh(double mean_cnr, double lambda) {
  if (!(lambda > 0.0) || !(mean_cnr > 0.0)) {
    throw DomainError("averages_rayleigh: lambda and mean CNR must be > 0");
  }
  const double x = lambda / mean_cnr;
  const double e1 = numerics::exp_int(1, x);
  const double e0 = numerics::exp_int(0, x);
  return {e1, (e0 - e1) / mean_cnr, std::exp(-x)};
}

double eval_F_pdf(const ErgodicProblem& problem, double lambda,
                  const numerics::QuadratureSpec& spec) {
  const PolicyAverages avg = averages_pdf(problem.fading, lambda, spec);
  return avg.rate - lambda * (problem.mu + avg.power);
}

double eval_F_rayleigh(double mean_cnr, double mu, double lambda) {
  const PolicyAverages avg = averages_rayleigh(mean_cnr, lambda);
  return avg.rate - lambda * (mu + avg.power);
}

ErgodicSolution solve_ergodic(const ErgodicProblem& problem, double tolerance, int max_iter) {
  problem.validate();
  const bool closed_form = problem.fading.kind == FadingModel::Kind::Rayleigh;
  const PdfSubproblem sub(problem.fading, problem.mu, closed_form);
  const double start_lambda = problem.fading.mean();

  fracprog::LambdaBounds bounds;
  if (problem.avg_power_max) {
    bounds.min = solve_decreasing([&](double l) { return sub.averages(l).power; },
                                  *problem.avg_power_max, start_lambda);
  }
  if (problem.avg_rate_min && *problem.avg_rate_min > 0.0) {
    bounds.max = solve_decreasing([&](double l) { return sub.averages(l).rate; },
                                  *problem.avg_rate_min, start_lambda);
  }
  bounds.validate();

  fracprog::DinkelbachOptions options;
  options.lambda0 = sub.feasible_start();
  options.tolerance = tolerance;
  options.max_iter = max_iter;

  ErgodicSolution out;
  out.trace = fracprog::solve_constrained(sub, bounds, options);
  out.lambda = out.trace.lambda;
  out.status = out.trace.status;
  out.iterations = out.trace.iterations;
  const PolicyAverages avg = sub.averages(out.lambda);
  out.avg_rate = avg.rate;
  out.avg_power = avg.power;
  out.ee = avg.rate / (problem.mu + avg.power);
  out.idle_probability = closed_form ? -std::expm1(-out.lambda / problem.fading.mean_cnr)
                                     : std::clamp(1.0 - avg.active_probability, 0.0, 1.0);
  return out;
}

double solve_ergodic_bisection(const ErgodicProblem& problem, double tol) {
  problem.validate();
  const PdfSubproblem sub(problem.fading, problem.mu, false);
  const double lo = sub.feasible_start();
  double hi = problem.fading.mean();
  while (sub.solve(hi).value() >= 0.0) hi *= 2.0;
  return fracprog::bisection_solver(sub, lo, hi, tol).lambda;
}

void ParallelFadingScenario::validate() const {
  if (subchannels < 1) throw DomainError("ParallelFadingScenario: K must be >= 1");
  if (samples < 1) throw DomainError("ParallelFadingScenario: N must be >= 1");
  if (cnrs.size() != samples * subchannels) {
    throw DomainError("ParallelFadingScenario: sample matrix has the wrong size");
  }
}

ParallelFadingScenario rayleigh_scenario(const std::vector<double>& mean_cnrs, std::size_t samples,
                                         std::uint64_t seed) {
  if (mean_cnrs.empty() || samples < 1) {
    throw DomainError("rayleigh_scenario: need K >= 1 and N >= 1");
  }
  for (double m : mean_cnrs) {
    if (!(m > 0.0)) throw DomainError("rayleigh_scenario: mean CNRs must be > 0");
  }
  ParallelFadingScenario s;
  s.subchannels = mean_cnrs.size();
  s.samples = samples;
  s.seed = seed;
  s.cnrs.resize(samples * s.subchannels);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  for (std::size_t j = 0; j < samples; ++j) {
    for (std::size_t i = 0; i < s.subchannels; ++i) {
      s.cnrs[j * s.subchannels + i] = mean_cnrs[i] * exp1(rng);
    }
  }
  return s;
}

ParallelFadingScenario deterministic_scenario(const std::vector<double>& cnrs) {
  ParallelFadingScenario s;
  s.subchannels = cnrs.size();
  s.samples = 1;
  s.cnrs = cnrs;
  s.validate();
  check_scenario_row(s.row(0), s.subchannels);
  return s;
}

ParallelFadingScenario mimo_scenario(int n_t, int n_r, double gain, std::size_t samples,
                                     std::uint64_t seed) {
  if (n_t < 1 || n_r < 1) throw DomainError("mimo_scenario: antenna counts must be >= 1");
  if (!(gain > 0.0) || samples < 1) throw DomainError("mimo_scenario: need gain > 0 and N >= 1");

  using Matrix = Eigen::MatrixXcd;
  const int k = std::min(n_t, n_r);
  ParallelFadingScenario s;
  s.subchannels = static_cast<std::size_t>(k);
  s.samples = samples;
  s.seed = seed;
  s.cnrs.resize(samples * s.subchannels);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> half_normal(0.0, std::sqrt(0.5));
  Matrix h(n_r, n_t);
  for (std::size_t j = 0; j < samples; ++j) {
    for (int c = 0; c < n_t; ++c) {
      for (int r = 0; r < n_r; ++r) {
        const double re = half_normal(rng);
        const double im = half_normal(rng);
        h(r, c) = {re, im};
      }
    }
    // Squared singular values are the eigenvalues of the smaller Gram matrix.
    const Matrix gram = n_r <= n_t ? Matrix(h * h.adjoint()) : Matrix(h.adjoint() * h);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& values = eig.eigenvalues();
    for (int i = 0; i < k; ++i) {
      // Descending order; clip rounding noise below zero.
      s.cnrs[j * s.subchannels + static_cast<std::size_t>(i)] =
          gain * std::max(0.0, values(k - 1 - i));
    }
  }
  return s;
}

double eval_F_sampled(const ParallelFadingScenario& scenario, double mu, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("eval_F_sampled: lambda must be > 0");
  const SampleTotals t = sample_averages(scenario, lambda);
  return t.rate - lambda * (mu + t.power);
}

ErgodicSolution solve_parallel_fading(const ParallelFadingScenario& scenario, double mu,
                                      const ParallelFadingOptions& options) {
  scenario.validate();
  if (!(mu > 0.0)) throw DomainError("solve_parallel_fading: mu must be > 0");

  double best = 0.0;
  double mean_best = 0.0;
  for (std::size_t j = 0; j < scenario.samples; ++j) {
    const double* g = scenario.row(j);
    check_scenario_row(g, scenario.subchannels);
    const double row_best = *std::max_element(g, g + scenario.subchannels);
    best = std::max(best, row_best);
    mean_best += row_best;
  }
  mean_best /= static_cast<double>(scenario.samples);

  ErgodicSolution out;
  if (!(best > 0.0)) {
    out.ee_std_error = 0.0;
    return out;
  }

  const SampledSubproblem sub(scenario, mu);
  // A cutoff at half the mean strongest CNR keeps some realizations active.
  const double start_lambda = 0.5 * mean_best;

  fracprog::LambdaBounds bounds;
  if (options.avg_power_max) {
    bounds.min = solve_decreasing(
        [&](double l) { return sample_averages(scenario, l).power; }, *options.avg_power_max,
        start_lambda);
  }
  if (options.avg_rate_min && *options.avg_rate_min > 0.0) {
    bounds.max = solve_decreasing(
        [&](double l) { return sample_averages(scenario, l).rate; }, *options.avg_rate_min,
        start_lambda);
  }
  bounds.validate();

  fracprog::DinkelbachOptions dk;
  dk.lambda0 = sub.solve(start_lambda).ratio();
  dk.tolerance = options.tolerance;
  dk.max_iter = options.max_iter;
  out.trace = fracprog::solve_constrained(sub, bounds, dk);
  out.lambda = out.trace.lambda;
  out.status = out.trace.status;
  out.iterations = out.trace.iterations;

  const SampleTotals t = sample_averages(scenario, out.lambda);
  out.avg_rate = t.rate;
  out.avg_power = t.power;
  out.ee = t.rate / (mu + t.power);
  out.idle_probability = t.idle;

  // Delta-method standard error of the ratio estimator.
  const std::size_t n = scenario.samples;
  double se = 0.0;
  if (n > 1) {
    const double inv = 1.0 / out.lambda;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double* g = scenario.row(j);
      double r = 0.0;
      double p = 0.0;
      for (std::size_t i = 0; i < scenario.subchannels; ++i) {
        if (g[i] > out.lambda) {
          r += std::log(g[i] * inv);
          p += inv - 1.0 / g[i];
        }
      }
      const double d = r - out.ee * p;
      sum += d;
      sum_sq += d * d;
    }
    const double nn = static_cast<double>(n);
    const double var = std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
    se = std::sqrt(var / nn) / (mu + t.power);
  }
  out.ee_std_error = se;
  out.low_sample_warning = out.ee > 0.0 && se > options.warn_relative_error * out.ee;
  return out;
}

}  // namespace eeopt::ergodic
