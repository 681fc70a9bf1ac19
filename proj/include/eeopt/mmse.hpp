#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "eeopt/fracprog.hpp"

/// Rate functions of discrete constellations through the MMSE, and
/// mercury/water-filling built on tabulated MMSE and rate curves.
///
/// Conventions: complex noise of unit variance, so a real (PAM) observation
/// y = sqrt(rho) s + n has noise variance 1/2. Rates are in nat per complex
/// channel use and satisfy r'(rho) = MMSE(rho).
namespace eeopt::mmse {

struct Constellation {
  enum class Kind { Gaussian, Pam, Qam, Point };

  Kind kind = Kind::Gaussian;
  int order = 0;  // m; 0 for Gaussian
  /// PAM: the real points. QAM: the points of one quadrature branch
  /// (sqrt(m)-PAM scaled to half power). Point: {1}.
  std::vector<double> branch_points;
  std::vector<double> branch_probabilities;

  static Constellation gaussian();
  static Constellation pam(int m);
  /// Square m-QAM, m = 4, 16, 64, ...
  static Constellation qam(int m);
  /// Single known symbol: zero MMSE and zero rate at every SNR.
  static Constellation point();
  /// Parses "gaussian", "point", "<m>-pam" or "<m>-qam".
  static Constellation parse(const std::string& label);

  std::string label() const;
  void validate() const;
  /// Full complex point set with unit average power.
  std::vector<std::complex<double>> points() const;
  /// log m for discrete constellations, +inf for Gaussian.
  double max_rate() const;
};

struct MmseValue {
  double mmse;
  double derivative;  // d MMSE / d rho
};

/// MMSE and its slope at rho >= 0. Gaussian inputs use 1/(1+rho); PAM uses a
/// one-dimensional integral over the real observation; QAM evaluates one
/// branch at half the SNR.
MmseValue mmse_eval(const Constellation& constellation, double rho);
double mmse_of(const Constellation& constellation, double rho);

/// Sampled MMSE and rate curves. Rows are rho = 0 followed by a log-spaced
/// grid on [1e-3, rho_max]. Tables of discrete constellations stop at the
/// first point where the MMSE drops below `floor`; beyond that point the rate
/// is taken as saturated.
struct MmseTable {
  std::string label;
  double rho_max = 0.0;
  int n_points = 0;
  double floor = 0.0;
  double rate_cap = 0.0;   // log m, or +inf
  bool saturated = false;  // grid truncated at the MMSE floor
  std::vector<double> rho;
  std::vector<double> mmse;
  std::vector<double> dmmse;
  std::vector<double> rate;

  void validate() const;
  bool zero() const { return mmse.front() == 0.0; }
  double rho_end() const { return rho.back(); }
  double mmse_end() const { return mmse.back(); }

  /// Shape-preserving Hermite interpolation with the exact slopes: log-log
  /// coordinates on the log grid, linear coordinates on the first segment.
  double mmse_at(double rho) const;
  /// Hermite interpolation of r with slopes r' = MMSE.
  double rate_at(double rho) const;
  /// rho with MMSE(rho) = zeta. Throws TableRangeError below the table floor.
  double inverse(double zeta) const;
};

inline constexpr double kDefaultRhoMax = 1e4;
inline constexpr int kDefaultTablePoints = 512;
inline constexpr double kMmseFloor = 1e-13;

MmseTable build_table(const Constellation& constellation, double rho_max = kDefaultRhoMax,
                      int n_points = kDefaultTablePoints);

double mmse_inverse(const MmseTable& table, double zeta);

/// Plain-text table format, version 1:
///   eeopt-mmse-table 1
///   label <label>
///   rho_max <x>
///   n_points <n>
///   floor <x>
///   rate_cap <x|inf>
///   saturated <0|1>
///   rows <count>
///   <rho> <mmse> <dmmse> <rate>      (count lines, %.17g)
void save_table(const MmseTable& table, std::ostream& out);
MmseTable load_table(std::istream& in);
void save_table_file(const MmseTable& table, const std::string& path);
MmseTable load_table_file(const std::string& path);

/// A set of subchannels with one table each. A single table is shared by
/// every subchannel.
struct MercuryChannel {
  std::vector<MmseTable> tables;
  std::vector<double> cnrs;

  void validate() const;
  std::size_t size() const { return cnrs.size(); }
  const MmseTable& table(std::size_t i) const { return tables.size() == 1 ? tables[0] : tables[i]; }
};

struct MercuryAllocation {
  std::vector<double> powers;
  std::vector<double> zetas;  // lambda / cnr_i
  std::vector<double> gaps;   // 1/zeta - MMSE^-1(zeta), 1 when idle
  std::vector<double> rates;
  double sum_power = 0.0;
  double sum_rate = 0.0;

  double energy_efficiency(double mu) const { return sum_rate / (mu + sum_power); }
};

/// p_i = MMSE_i^-1(zeta_i) / cnr_i while zeta_i < MMSE_i(0), else 0.
MercuryAllocation mercury_allocate(const MercuryChannel& channel, double lambda);

/// F(lambda) = sum r_i(cnr_i p_i) - lambda (mu + sum p_i) at the mercury allocation.
double eval_F_mmse(const MercuryChannel& channel, double mu, double lambda);

class MercurySubproblem final : public fracprog::ParametricSubproblem {
 public:
  MercurySubproblem(const MercuryChannel& channel, double mu);

  fracprog::SubproblemPoint solve(double lambda) const override;
  std::optional<fracprog::KktData> kkt_data(const fracprog::SubproblemPoint& point) const override;

  /// Largest lambda at which some subchannel is active.
  double lambda_ceiling() const;
  /// Smallest lambda every table can resolve.
  double lambda_floor() const;
  double feasible_start() const;

 private:
  const MercuryChannel& channel_;
  double mu_;
};

struct MmseSolution {
  fracprog::DinkelbachTrace trace;
  MercuryAllocation allocation;
  double lambda = 0.0;
  double ee = 0.0;
};

MmseSolution solve_mmse_ee(const MercuryChannel& channel, double mu, double tolerance = 1e-10,
                           int max_iter = 100);

}  // namespace eeopt::mmse
