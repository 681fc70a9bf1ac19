#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "eeopt/error.hpp"
#include "eeopt/mmse.hpp"
#include "eeopt/waterfill.hpp"

using namespace eeopt;
using namespace eeopt::mmse;

namespace {

const MmseTable& table_for(const std::string& label) {
  static std::map<std::string, MmseTable> cache;
  auto it = cache.find(label);
  if (it == cache.end()) it = cache.emplace(label, build_table(Constellation::parse(label))).first;
  return it->second;
}

// BPSK over a real channel with noise variance 1/2 is the unit-variance real
// channel at snr 2 rho. Trapezoid on a wide standard-normal grid.
template <class G>
double gauss_expect(G g) {
  const int n = 40000;
  const double a = -20.0;
  const double h = 40.0 / n;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double z = a + k * h;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    s += w * std::exp(-0.5 * z * z) * g(z);
  }
  return s * h / std::sqrt(2.0 * M_PI);
}

double bpsk_mmse_oracle(double rho) {
  const double snr = 2.0 * rho;
  // 1 - E tanh(u), with 1 - tanh(u) = 2 / (1 + e^{2u}) kept inside the integral.
  return gauss_expect([&](double z) { return 2.0 / (1.0 + std::exp(2.0 * (snr - std::sqrt(snr) * z))); });
}

double bpsk_rate_oracle(double rho) {
  const double snr = 2.0 * rho;
  return snr - gauss_expect([&](double z) {
           const double u = std::abs(snr - std::sqrt(snr) * z);
           return u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
         });
}

}  // namespace

TEST_CASE("constellations are unit power") {
  for (const char* label : {"2-pam", "4-pam", "8-pam", "4-qam", "16-qam", "64-qam", "point"}) {
    const auto c = Constellation::parse(label);
    CHECK(c.label() == label);
    double power = 0.0;
    for (const auto& s : c.points()) power += std::norm(s);
    CHECK(power / c.points().size() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(Constellation::parse("16-qam").points().size() == 16);
  CHECK(Constellation::parse("4-qam").max_rate() == doctest::Approx(std::log(4.0)));
  CHECK(std::isinf(Constellation::gaussian().max_rate()));
  CHECK_THROWS_AS(Constellation::parse("8-qam"), DomainError);
  CHECK_THROWS_AS(Constellation::parse("qpsk"), DomainError);
  CHECK_THROWS_AS(Constellation::pam(1), DomainError);
}

TEST_CASE("mmse_of basic values") {
  for (const char* label : {"gaussian", "2-pam", "4-pam", "4-qam", "16-qam", "64-qam"}) {
    CHECK(mmse_of(Constellation::parse(label), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(mmse_of(Constellation::gaussian(), 1.0) == doctest::Approx(0.5));
  CHECK(mmse_eval(Constellation::gaussian(), 1.0).derivative == doctest::Approx(-0.25));
  CHECK(mmse_of(Constellation::point(), 3.0) == 0.0);
  CHECK_THROWS_AS(mmse_of(Constellation::gaussian(), -1.0), DomainError);
}

TEST_CASE("BPSK MMSE against an independent integral and Monte Carlo") {
  const auto bpsk = Constellation::pam(2);
  for (double rho : {0.01, 0.3, 1.0, 4.0, 12.0}) {
    CHECK(mmse_of(bpsk, rho) == doctest::Approx(bpsk_mmse_oracle(rho)).epsilon(1e-9).scale(1e-12));
  }
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  std::bernoulli_distribution coin(0.5);
  const int n = 1000000;
  const double rho = 1.0;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = coin(rng) ? 1.0 : -1.0;
    const double y = std::sqrt(rho) * s + noise(rng);
    const double e = s - std::tanh(2.0 * std::sqrt(rho) * y);
    sum += e * e;
    sq += e * e * e * e;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mmse_of(bpsk, rho) - mean) < 4.0 * se);
}

TEST_CASE("QAM is two PAM branches at half SNR") {
  for (double rho : {0.1, 1.0, 10.0, 100.0}) {
    CHECK(mmse_of(Constellation::qam(16), rho) ==
          doctest::Approx(mmse_of(Constellation::pam(4), 0.5 * rho)).epsilon(1e-12));
    CHECK(mmse_of(Constellation::qam(4), rho) ==
          doctest::Approx(mmse_of(Constellation::pam(2), 0.5 * rho)).epsilon(1e-12));
  }
}

TEST_CASE("MMSE slope matches central differences") {
  for (const char* label : {"2-pam", "16-qam", "gaussian"}) {
    const auto c = Constellation::parse(label);
    for (double rho : {0.05, 0.7, 3.0, 20.0}) {
      const double h = 1e-4 * rho;
      const double fd = (mmse_of(c, rho + h) - mmse_of(c, rho - h)) / (2 * h);
      CHECK(mmse_eval(c, rho).derivative == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Gaussian table reproduces log(1 + rho)") {
  const auto& t = table_for("gaussian");
  CHECK(t.rho.size() == 513);
  CHECK_FALSE(t.saturated);
  for (std::size_t k = 0; k < t.rho.size(); ++k) {
    CHECK(t.rate[k] == doctest::Approx(std::log1p(t.rho[k])).epsilon(1e-6).scale(1e-6));
    CHECK(t.mmse[k] == doctest::Approx(1.0 / (1.0 + t.rho[k])).epsilon(1e-14));
  }
  for (double rho = 2e-3; rho < 9e3; rho *= 1.37) {
    CHECK(t.rate_at(rho) == doctest::Approx(std::log1p(rho)).epsilon(1e-7));
    CHECK(t.mmse_at(rho) == doctest::Approx(1.0 / (1.0 + rho)).epsilon(1e-6));
  }
}

TEST_CASE("BPSK table rate against the log-cosh integral") {
  const auto& t = table_for("2-pam");
  for (double rho : {0.01, 0.5, 2.0, 8.0}) {
    CHECK(t.rate_at(rho) == doctest::Approx(bpsk_rate_oracle(rho)).epsilon(1e-7));
  }
}

TEST_CASE("table invariants for discrete constellations") {
  for (const char* label : {"2-pam", "4-qam", "16-qam", "64-qam"}) {
    const auto& t = table_for(label);
    const double cap = Constellation::parse(label).max_rate();
    CHECK(t.mmse.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.rate.front() == 0.0);
    for (std::size_t k = 1; k < t.rho.size(); ++k) {
      CHECK(t.mmse[k] < t.mmse[k - 1]);
      CHECK(t.mmse[k] > 0.0);
      CHECK(t.rate[k] >= t.rate[k - 1]);
    }
    CHECK(t.rate.back() <= cap + 1e-12);
    CHECK(t.rate.back() == doctest::Approx(cap).epsilon(1e-9));
    // Spot check against direct evaluation.
    const std::size_t mid = t.rho.size() / 2;
    CHECK(t.mmse[mid] == doctest::Approx(mmse_of(Constellation::parse(label), t.rho[mid])).epsilon(1e-12));
    for (std::size_t k = 2; k + 1 < t.rho.size(); k += 7) {
      const double h = 1e-3 * t.rho[k];
      const double fd = (t.rate_at(t.rho[k] + h) - t.rate_at(t.rho[k] - h)) / (2 * h);
      CHECK(fd == doctest::Approx(t.mmse[k]).epsilon(1e-4).scale(1e-9));
    }
  }
}

TEST_CASE("gap to Gaussian is at least one") {
  for (const char* label : {"2-pam", "4-qam", "16-qam", "64-qam"}) {
    const auto& t = table_for(label);
    for (double z = 0.999; z > t.mmse_end() * 1.001; z *= 0.93) {
      CHECK(1.0 / z - t.inverse(z) >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("mmse_inverse") {
  const auto& g = table_for("gaussian");
  CHECK(mmse_inverse(g, 0.5) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mmse_inverse(g, 1.0) == 0.0);
  CHECK(mmse_inverse(table_for("16-qam"), 1.0) == 0.0);
  const double rho = mmse_inverse(table_for("4-qam"), 0.25);
  CHECK(mmse_of(Constellation::qam(4), rho) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK_THROWS_AS(mmse_inverse(g, 1e-6), TableRangeError);
  CHECK_THROWS_AS(mmse_inverse(g, 0.0), DomainError);
  CHECK_THROWS_AS(mmse_inverse(g, 1.5), DomainError);
  for (double z : {0.9, 0.3, 0.01, 1e-3}) {
    CHECK(g.mmse_at(mmse_inverse(g, z)) == doctest::Approx(z).epsilon(1e-10));
  }
}

TEST_CASE("saturated tables extrapolate past their end") {
  const auto& t = table_for("4-qam");
  REQUIRE(t.saturated);
  CHECK(t.mmse_end() >= kMmseFloor);
  CHECK(mmse_of(Constellation::qam(4), t.rho_end() * 1.05) < kMmseFloor);
  CHECK(t.rate_at(2.0 * t.rho_end()) == t.rate.back());
  CHECK(t.mmse_at(2.0 * t.rho_end()) < t.mmse_end());
  CHECK_THROWS_AS(table_for("gaussian").rate_at(2e4), TableRangeError);
}

TEST_CASE("table save/load round trip") {
  const auto& t = table_for("16-qam");
  std::stringstream ss;
  save_table(t, ss);
  const auto u = load_table(ss);
  CHECK(u.label == t.label);
  CHECK(u.saturated == t.saturated);
  CHECK(u.rho == t.rho);
  CHECK(u.mmse == t.mmse);
  CHECK(u.dmmse == t.dmmse);
  CHECK(u.rate == t.rate);
  std::stringstream bad("eeopt-mmse-table 2\n");
  CHECK_THROWS(load_table(bad));
}

TEST_CASE("mercury with Gaussian tables is water-filling") {
  const waterfill::ParallelChannel ch{{4.0, 1.0, 0.3, 2.5}};
  const MercuryChannel mc{{table_for("gaussian")}, ch.cnrs};
  for (double l : {0.05, 0.4, 0.9, 2.0, 5.0}) {
    const auto a = mercury_allocate(mc, l);
    const auto b = waterfill::waterfill_allocate(ch, l);
    for (std::size_t i = 0; i < ch.size(); ++i) {
      CHECK(a.powers[i] == doctest::Approx(b.powers[i]).epsilon(1e-8).scale(1e-12));
      CHECK(a.gaps[i] == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(eval_F_mmse(mc, 0.7, l) ==
          doctest::Approx(waterfill::eval_F({ch, 0.7, {}, {}}, l).value).epsilon(1e-6).scale(1e-6));
  }
  CHECK(eval_F_mmse(mc, 0.7, 4.0) == doctest::Approx(-4.0 * 0.7));
}

TEST_CASE("mercury KKT on 4-QAM") {
  const MercuryChannel mc{{table_for("4-qam")}, {4.0, 1.0}};
  const auto a = mercury_allocate(mc, 2.0);
  CHECK(a.powers[1] == 0.0);
  CHECK(a.gaps[1] == 1.0);
  REQUIRE(a.powers[0] > 0.0);
  CHECK(4.0 * mmse_of(Constellation::qam(4), 4.0 * a.powers[0]) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(a.zetas[0] == 0.5);
}

TEST_CASE("eval_F_mmse decreasing for 16-QAM") {
  const MercuryChannel mc{{table_for("16-qam")}, {1.0}};
  double prev = eval_F_mmse(mc, 1.0, 1e-3);
  for (double l = 1.2e-3; l < 2.0; l *= 1.2) {
    const double v = eval_F_mmse(mc, 1.0, l);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("solve_mmse_ee") {
  const auto g = solve_mmse_ee({{table_for("gaussian")}, {1.0}}, 1.0, 1e-12);
  CHECK(g.lambda == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(g.ee == doctest::Approx(g.lambda).epsilon(1e-10));

  double prev = g.ee;
  for (const char* label : {"64-qam", "16-qam", "4-qam", "2-pam"}) {
    const MercuryChannel mc{{table_for(label)}, {1.0}};
    const auto s = solve_mmse_ee(mc, 1.0, 1e-12);
    CHECK(s.ee <= prev);
    CHECK(std::abs(eval_F_mmse(mc, 1.0, s.lambda)) < 1e-9);
    for (std::size_t n = 1; n < s.trace.iterates.size(); ++n) {
      CHECK(s.trace.iterates[n].lambda >= s.trace.iterates[n - 1].lambda);
    }
    prev = s.ee;
  }

  const auto pt = solve_mmse_ee({{build_table(Constellation::point())}, {1.0, 2.0}}, 1.0);
  CHECK(pt.ee == 0.0);
  CHECK(pt.allocation.sum_power == 0.0);
}

TEST_CASE("per-channel tables with KKT at the optimum") {
  const MercuryChannel mc{{table_for("4-qam"), table_for("16-qam"), table_for("gaussian")}, {3.0, 1.5, 0.4}};
  const auto s = solve_mmse_ee(mc, 0.5, 1e-12);
  for (std::size_t i = 0; i < mc.size(); ++i) {
    if (s.allocation.powers[i] > 0.0) {
      CHECK(mc.cnrs[i] * mc.table(i).mmse_at(mc.cnrs[i] * s.allocation.powers[i]) ==
            doctest::Approx(s.lambda).epsilon(1e-6));
    } else {
      CHECK(mc.cnrs[i] <= s.lambda);
    }
  }
}
