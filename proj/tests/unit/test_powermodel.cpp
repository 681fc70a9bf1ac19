#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "eeopt/error.hpp"
#include "eeopt/powermodel.hpp"
#include "eeopt/waterfill.hpp"

using namespace eeopt;
using namespace eeopt::powermodel;

namespace {

GenericBsModel generic_default() {
  GenericBsModel m;
  m.n_a = 1;
  m.p_c = 0.0;
  m.p_sta = 20.0;
  m.eta_pa = 0.35;
  m.eta_ps = 0.9;
  m.eta_c = 0.95;
  m.bandwidth = 200e3;
  return m;
}

std::vector<PowerModel> sample_models() {
  CuiLinkModel cui;
  cui.xi = 2.5;
  cui.eta = 0.4;
  cui.p_mix = 0.03;
  cui.p_syn = 0.05;
  cui.p_filt = 0.002;
  cui.p_dac = 0.015;
  cui.w_c = 10e3;
  GenericBsModel gen = generic_default();
  gen.n_a = 4;
  gen.p_c = 7.5;
  MacroBsModel mac;
  mac.n_sector = 3;
  mac.n_pa_per_sector = 2;
  mac.p_sp = 58.0;
  mac.mu_pa = 0.3;
  mac.c_c = 0.29;
  mac.c_psbb = 0.11;
  mac.bandwidth = 10e6;
  return {cui, gen, mac};
}

// Raw efficiency in bit/J from rates (nat/s/Hz) and powers (W/Hz).
double raw_ee(const PowerModel& m, const std::vector<double>& g, const std::vector<double>& p) {
  const double b = bandwidth(m);
  double rate = 0.0;
  double power = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    rate += std::log1p(g[i] * p[i]);
    power += p[i];
  }
  return b * rate * std::numbers::log2e / total_bs_power(m, b * power);
}

}  // namespace

TEST_CASE("to_mu_scale examples") {
  CHECK(to_mu_scale(generic_default()).mu == doctest::Approx(3.5e-5).epsilon(1e-14));

  MacroBsModel mac;
  CHECK(mac.c() == 1.0);

  CuiLinkModel cui;
  cui.p_mix = 1.0;
  cui.w_c = 1.0;
  const auto ms = to_mu_scale(cui);
  CHECK(ms.mu == doctest::Approx(1.0));
  CHECK(ms.scale == 1.0);
}

TEST_CASE("ee_bits_per_joule") {
  CHECK(ee_bits_per_joule(generic_default(), 0.0) == 0.0);
  GenericBsModel unit;
  CHECK(ee_bits_per_joule(unit, 1.0) == doctest::Approx(1.4426950408889634).epsilon(1e-15));

  CuiLinkModel cui;
  cui.xi = 1.6;
  cui.eta = 0.5;
  cui.w_c = 2.0;
  cui.p_mix = cui.w_c * cui.xi / cui.eta;  // mu = 1
  REQUIRE(to_mu_scale(cui).mu == doctest::Approx(1.0));
  const auto cf = waterfill::flat_fading_closed_form(1.0, 1.0);
  CHECK(ee_bits_per_joule(cui, cf.lambda) ==
        doctest::Approx(std::numbers::log2e * (cui.eta / cui.xi) * std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(ee_bits_per_joule(cui, -1.0), DomainError);
}

TEST_CASE("total_bs_power") {
  CHECK(total_bs_power(generic_default(), 0.0) == doctest::Approx(20.0 / 0.045).epsilon(1e-14));
  MacroBsModel mac;
  mac.p_sp = 12.0;
  CHECK(total_bs_power(mac, 5.0) == doctest::Approx(17.0));
  for (const auto& m : sample_models()) {
    double prev = total_bs_power(m, 0.0);
    for (double p = 0.5; p < 50.0; p *= 1.5) {
      const double v = total_bs_power(m, p);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("ratio consistency for all models") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& m : sample_models()) {
    const auto ms = to_mu_scale(m);
    CHECK(ms.mu > 0.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> g(3);
      std::vector<double> p(3);
      double rate = 0.0;
      double power = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        g[i] = std::pow(10.0, 2.0 + 4.0 * u(rng));
        p[i] = std::pow(10.0, -7.0 + 3.0 * u(rng));
        rate += std::log1p(g[i] * p[i]);
        power += p[i];
      }
      const double q = rate / (ms.mu + power);
      CHECK(raw_ee(m, g, p) == doctest::Approx(ms.conversion * q).epsilon(1e-12));
    }
  }
}

TEST_CASE("maximizer invariance") {
  const std::vector<double> g{3e4, 8e3};
  for (const auto& m : sample_models()) {
    const auto ms = to_mu_scale(m);
    std::size_t best_q = 0;
    std::size_t best_raw = 0;
    double vq = -1.0;
    double vraw = -1.0;
    std::size_t idx = 0;
    for (int a = 0; a < 60; ++a) {
      for (int b = 0; b < 60; ++b, ++idx) {
        const std::vector<double> p{1e-6 * std::pow(1.2, a), 1e-6 * std::pow(1.2, b)};
        const double q = (std::log1p(g[0] * p[0]) + std::log1p(g[1] * p[1])) / (ms.mu + p[0] + p[1]);
        const double r = raw_ee(m, g, p);
        if (q > vq) {
          vq = q;
          best_q = idx;
        }
        if (r > vraw) {
          vraw = r;
          best_raw = idx;
        }
      }
    }
    CHECK(best_q == best_raw);
  }
}

TEST_CASE("model validation") {
  GenericBsModel bad = generic_default();
  bad.eta_c = 1.0;
  CHECK_THROWS_AS(to_mu_scale(bad), DomainError);
  CuiLinkModel cui;
  cui.xi = 0.5;
  CHECK_THROWS_AS(to_mu_scale(cui), DomainError);
  MacroBsModel mac;
  mac.mu_pa = 0.0;
  CHECK_THROWS_AS(to_mu_scale(mac), DomainError);
  CHECK(model_name(generic_default()) == "generic");
}
