#include "eeopt/powermodel.hpp"

#include <cmath>
#include <numbers>

#include "eeopt/error.hpp"

namespace eeopt::powermodel {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool nonneg(double x) { return x >= 0.0 && std::isfinite(x); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void CuiLinkModel::validate() const {
  require(eta > 0.0 && eta <= 1.0, "CuiLinkModel: eta must lie in (0, 1]");
  require(xi >= 1.0 && std::isfinite(xi), "CuiLinkModel: xi must be >= 1");
  require(nonneg(p_mix) && nonneg(p_syn) && nonneg(p_filt) && nonneg(p_dac),
          "CuiLinkModel: circuit powers must be >= 0");
  require(w_c > 0.0 && std::isfinite(w_c), "CuiLinkModel: W_c must be > 0");
  require(t_c > 0.0 && std::isfinite(t_c), "CuiLinkModel: T_c must be > 0");
}

void GenericBsModel::validate() const {
  require(n_a >= 1, "GenericBsModel: n_a must be >= 1");
  require(nonneg(p_c) && nonneg(p_sta), "GenericBsModel: P_c and P_sta must be >= 0");
  require(eta_pa > 0.0 && eta_pa <= 1.0, "GenericBsModel: eta_PA must lie in (0, 1]");
  require(eta_ps > 0.0 && eta_ps <= 1.0, "GenericBsModel: eta_PS must lie in (0, 1]");
  require(eta_c >= 0.0 && eta_c < 1.0, "GenericBsModel: eta_C must lie in [0, 1)");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), "GenericBsModel: B must be > 0");
}

void MacroBsModel::validate() const {
  require(n_sector >= 1 && n_pa_per_sector >= 1, "MacroBsModel: counts must be >= 1");
  require(nonneg(p_sp), "MacroBsModel: P_SP must be >= 0");
  require(mu_pa > 0.0 && mu_pa <= 1.0, "MacroBsModel: mu_PA must lie in (0, 1]");
  require(nonneg(c_c) && nonneg(c_psbb), "MacroBsModel: loss factors must be >= 0");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), "MacroBsModel: B must be > 0");
}

MuScale to_mu_scale(const PowerModel& model) {
  const double log2e = std::numbers::log2e;
  return std::visit(
      Overloaded{
          [&](const CuiLinkModel& m) {
            m.validate();
            const double scale = m.xi / m.eta;
            return MuScale{m.p_ct() / (scale * m.w_c), scale, log2e / scale};
          },
          [&](const GenericBsModel& m) {
            m.validate();
            const double scale = 1.0 / (m.c() * m.eta_pa);
            return MuScale{m.eta_pa * (m.n_a * m.p_c + m.p_sta) / m.bandwidth, scale,
                           log2e / scale};
          },
          [&](const MacroBsModel& m) {
            m.validate();
            const double scale = m.c() / m.mu_pa;
            return MuScale{m.p_sp * m.mu_pa / m.bandwidth, scale, log2e / scale};
          }},
      model);
}

double ee_bits_per_joule(const PowerModel& model, double solver_ee) {
  if (!(solver_ee >= 0.0)) throw DomainError("ee_bits_per_joule: efficiency must be >= 0");
  return to_mu_scale(model).conversion * solver_ee;
}

double total_bs_power(const PowerModel& model, double p_t) {
  if (!(p_t >= 0.0)) throw DomainError("total_bs_power: transmit power must be >= 0");
  return std::visit(
      Overloaded{
          [&](const CuiLinkModel& m) {
            m.validate();
            return m.xi / m.eta * p_t + m.p_ct();
          },
          [&](const GenericBsModel& m) {
            m.validate();
            return (p_t / m.eta_pa + m.n_a * m.p_c + m.p_sta) / m.c();
          },
          [&](const MacroBsModel& m) {
            m.validate();
            return m.n_sector * m.n_pa_per_sector * (p_t / m.mu_pa + m.p_sp) * (1.0 + m.c_c) *
                   (1.0 + m.c_psbb);
          }},
      model);
}

double bandwidth(const PowerModel& model) {
  return std::visit(Overloaded{[](const CuiLinkModel& m) { return m.w_c; },
                               [](const GenericBsModel& m) { return m.bandwidth; },
                               [](const MacroBsModel& m) { return m.bandwidth; }},
                    model);
}

std::string model_name(const PowerModel& model) {
  return std::visit(Overloaded{[](const CuiLinkModel&) { return std::string("cui"); },
                               [](const GenericBsModel&) { return std::string("generic"); },
                               [](const MacroBsModel&) { return std::string("macro"); }},
                    model);
}

}  // namespace eeopt::powermodel
