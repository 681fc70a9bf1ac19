#pragma once

#include <string>
#include <variant>

/// Hardware power models reduced to the solver pair (mu, scale): total
/// consumption is scale * bandwidth * (mu + p) with p the transmit power per Hz.
namespace eeopt::powermodel {

/// Point-to-point link: P_PA = (xi / eta) P_t plus the circuit power
/// P_ct = P_mix + P_syn + P_filt + P_DAC.
struct CuiLinkModel {
  double xi = 1.0;   // output backoff
  double eta = 1.0;  // drain efficiency
  double p_mix = 0.0;
  double p_syn = 0.0;
  double p_filt = 0.0;
  double p_dac = 0.0;
  double w_c = 1.0;  // bandwidth, Hz
  double t_c = 1.0;  // symbol/coherence period, s

  double p_ct() const { return p_mix + p_syn + p_filt + p_dac; }
  void validate() const;
};

/// P_tot = (P_t / eta_pa + n_a P_c + P_sta) / (eta_ps (1 - eta_c)).
struct GenericBsModel {
  int n_a = 1;
  double p_c = 0.0;
  double p_sta = 0.0;
  double eta_pa = 1.0;
  double eta_ps = 1.0;
  double eta_c = 0.0;
  double bandwidth = 1.0;

  double c() const { return eta_ps * (1.0 - eta_c); }
  void validate() const;
};

/// P_BS = N_sector N_pa (P_TX / mu_pa + P_SP)(1 + C_C)(1 + C_PSBB).
struct MacroBsModel {
  int n_sector = 1;
  int n_pa_per_sector = 1;
  double p_sp = 0.0;
  double mu_pa = 1.0;
  double c_c = 0.0;
  double c_psbb = 0.0;
  double bandwidth = 1.0;

  double c() const { return n_sector * n_pa_per_sector * (1.0 + c_c) * (1.0 + c_psbb); }
  void validate() const;
};

using PowerModel = std::variant<CuiLinkModel, GenericBsModel, MacroBsModel>;

struct MuScale {
  double mu;          // W/Hz
  double scale;       // dimensionless
  double conversion;  // bits/J per solver unit (nat/s/Hz per W/Hz)
};

MuScale to_mu_scale(const PowerModel& model);

/// Solver efficiency (nat per J-per-Hz units) to bits per Joule.
double ee_bits_per_joule(const PowerModel& model, double solver_ee);

/// Total consumption in W for transmit power p_t in W.
double total_bs_power(const PowerModel& model, double p_t);

/// Bandwidth in Hz used to turn per-Hz powers into watts.
double bandwidth(const PowerModel& model);

std::string model_name(const PowerModel& model);

}  // namespace eeopt::powermodel
