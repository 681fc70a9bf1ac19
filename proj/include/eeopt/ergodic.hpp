#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eeopt/fracprog.hpp"
#include "eeopt/numerics.hpp"
#include "eeopt/waterfill.hpp"

/// Time-varying channels with causal CSI: ergodic rate over average power.
namespace eeopt::ergodic {

/// Density of the instantaneous CNR. Rayleigh fading has an exponential CNR
/// density with mean `mean_cnr`; a tabulated density is linear between its
/// grid points and zero outside them.
struct FadingModel {
  enum class Kind { Rayleigh, Tabulated };

  Kind kind = Kind::Rayleigh;
  double mean_cnr = 1.0;
  std::vector<double> grid;
  std::vector<double> density;

  static FadingModel rayleigh(double mean_cnr);
  static FadingModel tabulated(std::vector<double> grid, std::vector<double> density);

  void validate() const;
  double pdf(double cnr) const;
  /// Mean CNR (analytic for Rayleigh, trapezoidal for tabulated).
  double mean() const;
};

struct ErgodicProblem {
  FadingModel fading;
  double mu = 1.0;
  std::optional<double> avg_power_max;
  std::optional<double> avg_rate_min;

  void validate() const;
};

struct ErgodicSolution {
  double lambda = 0.0;
  double avg_rate = 0.0;
  double avg_power = 0.0;
  double ee = 0.0;
  double idle_probability = 1.0;
  int iterations = 0;
  fracprog::Status status = fracprog::Status::Converged;
  fracprog::DinkelbachTrace trace;
  /// Monte Carlo standard error of ee; set by the sampled solvers only.
  std::optional<double> ee_std_error;
  /// Set when ee_std_error exceeds the relative threshold.
  bool low_sample_warning = false;
};

/// Instantaneous power [1/lambda - 1/cnr]^+.
double policy(double lambda, double cnr);

/// Average rate and power of the cutoff policy at lambda.
struct PolicyAverages {
  double rate;
  double power;
  double active_probability;
};

/// Averages by quadrature over the density (any fading kind).
PolicyAverages averages_pdf(const FadingModel& fading, double lambda,
                            const numerics::QuadratureSpec& spec = {});

/// Averages through exponential integrals (Rayleigh only).
PolicyAverages averages_rayleigh(double mean_cnr, double lambda);

/// F(lambda) by quadrature against the density.
double eval_F_pdf(const ErgodicProblem& problem, double lambda,
                  const numerics::QuadratureSpec& spec = {});

/// F(lambda) = E1(x) - lambda (mu + (E0(x) - E1(x)) / mean), x = lambda / mean.
double eval_F_rayleigh(double mean_cnr, double mu, double lambda);

/// Maximizes the ergodic efficiency. Rayleigh models use the closed form,
/// tabulated ones quadrature.
ErgodicSolution solve_ergodic(const ErgodicProblem& problem, double tolerance = 1e-10,
                              int max_iter = 100);

/// Independent check of solve_ergodic: bisection on the quadrature F.
double solve_ergodic_bisection(const ErgodicProblem& problem, double tol);

/// A fixed set of CNR vectors drawn once (common random numbers). Row j holds
/// the K subchannel CNRs of realization j.
struct ParallelFadingScenario {
  std::size_t subchannels = 1;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> cnrs;  // row-major, samples x subchannels

  void validate() const;
  const double* row(std::size_t j) const { return cnrs.data() + j * subchannels; }
};

/// Independent Rayleigh subchannels with the given mean CNRs.
ParallelFadingScenario rayleigh_scenario(const std::vector<double>& mean_cnrs, std::size_t samples,
                                         std::uint64_t seed);

/// Degenerate distribution: every realization equals `cnrs`.
ParallelFadingScenario deterministic_scenario(const std::vector<double>& cnrs);

/// i.i.d. unit-variance complex Gaussian n_r x n_t channel matrices; the
/// subchannel CNRs are the squared singular values times `gain`.
ParallelFadingScenario mimo_scenario(int n_t, int n_r, double gain, std::size_t samples,
                                     std::uint64_t seed);

struct ParallelFadingOptions {
  double tolerance = 1e-10;
  int max_iter = 100;
  /// Relative standard error of ee above which low_sample_warning is set.
  double warn_relative_error = 1e-2;
  std::optional<double> avg_power_max;
  std::optional<double> avg_rate_min;
};

/// Sample-average F(lambda) over the scenario.
double eval_F_sampled(const ParallelFadingScenario& scenario, double mu, double lambda);

/// Dinkelbach on the sample-average F. The idle probability is the fraction of
/// realizations in which every subchannel is below the cutoff.
ErgodicSolution solve_parallel_fading(const ParallelFadingScenario& scenario, double mu,
                                      const ParallelFadingOptions& options = {});

}  // namespace eeopt::ergodic
