#include <cmath>
#include <random>

#include "doctest.h"
#include "eeopt/error.hpp"
#include "eeopt/mmse.hpp"
#include "eeopt/nested.hpp"
#include "eeopt/waterfill.hpp"

using namespace eeopt;
using namespace eeopt::nested;

namespace {

const mmse::MmseTable& gaussian_table() {
  static const auto t = mmse::build_table(mmse::Constellation::gaussian());
  return t;
}

const mmse::MmseTable& qam4_table() {
  static const auto t = mmse::build_table(mmse::Constellation::qam(4));
  return t;
}

}  // namespace

TEST_CASE("rate_max_waterfill examples") {
  const auto one = rate_max_waterfill({{1.0}}, 1.0);
  CHECK(one.powers[0] == doctest::Approx(1.0));
  CHECK(one.rate == doctest::Approx(std::log(2.0)));

  const auto none = rate_max_waterfill({{4.0, 1.0}}, 0.0);
  CHECK(none.sum_power == 0.0);
  CHECK(none.rate == 0.0);

  const waterfill::ParallelChannel ch{{4.0, 1.0}};
  const auto r = rate_max_waterfill(ch, 1.0);
  const auto w = waterfill::waterfill_allocate(ch, waterfill::lambda_min_from_power(ch, 1.0));
  for (std::size_t i = 0; i < 2; ++i) CHECK(r.powers[i] == doctest::Approx(w.powers[i]).epsilon(1e-10).scale(1e-12));
  CHECK(r.sum_power == doctest::Approx(1.0).epsilon(1e-14));
  // Both channels active: 2/lambda - 5/4 = 1.
  CHECK(r.level == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(rate_max_waterfill(ch, -1.0), DomainError);
}

TEST_CASE("rate_max_waterfill honors per-channel caps") {
  const waterfill::ParallelChannel ch{{10.0, 2.0, 0.5}, 0.4};
  const auto full = rate_max_waterfill(ch, 5.0);
  CHECK(full.sum_power == doctest::Approx(1.2));
  for (double p : full.powers) CHECK(p == doctest::Approx(0.4));
  const auto part = rate_max_waterfill(ch, 0.6);
  CHECK(part.sum_power == doctest::Approx(0.6).epsilon(1e-13));
  for (double p : part.powers) CHECK(p <= 0.4 + 1e-15);
}

TEST_CASE("rate_max is nondecreasing and concave in P") {
  const waterfill::ParallelChannel ch{{3.0, 1.1, 0.2, 0.7}};
  double prev = 0.0;
  double prev_slope = numerics::kInf;
  for (int k = 1; k <= 60; ++k) {
    const double p = 0.1 * k;
    const double r = rate_max_waterfill(ch, p).rate;
    const double slope = (r - prev) / 0.1;
    CHECK(slope >= 0.0);
    CHECK(slope <= prev_slope + 1e-12);
    prev = r;
    prev_slope = slope;
  }
}

TEST_CASE("rate_max_mercury with Gaussian tables equals water-filling") {
  const std::vector<double> g{4.0, 1.0, 0.25};
  const mmse::MercuryChannel mc{{gaussian_table()}, g};
  for (double p : {0.0, 0.3, 1.0, 4.0, 30.0}) {
    const auto a = rate_max_mercury(mc, p);
    const auto b = rate_max_waterfill({g}, p);
    CHECK(a.rate == doctest::Approx(b.rate).epsilon(1e-8).scale(1e-12));
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(a.powers[i] == doctest::Approx(b.powers[i]).epsilon(1e-7).scale(1e-10));
    }
  }
}

TEST_CASE("rate_max_mercury on 4-QAM meets the budget and KKT") {
  const mmse::MercuryChannel mc{{qam4_table()}, {4.0, 1.0}};
  const auto r = rate_max_mercury(mc, 2.0);
  CHECK(r.sum_power == doctest::Approx(2.0).epsilon(1e-8));
  for (std::size_t i = 0; i < 2; ++i) {
    if (r.powers[i] > 0.0) {
      const double g = mc.cnrs[i];
      CHECK(g * mmse::mmse_of(mmse::Constellation::qam(4), g * r.powers[i]) ==
            doctest::Approx(r.level).epsilon(1e-6));
    }
  }
  const auto z = rate_max_mercury(mc, 0.0);
  CHECK(z.sum_power == 0.0);
  CHECK(z.rate == 0.0);
}

TEST_CASE("solve_nested examples") {
  const WaterfillOracle one(waterfill::ParallelChannel{{1.0}});
  const auto s = solve_nested(one, 1.0);
  CHECK(s.ee == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(s.sum_power == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-4));
  CHECK(s.t * (1.0 + s.sum_power) == doctest::Approx(1.0).epsilon(1e-12));

  const waterfill::ParallelChannel ch{{4.0, 1.0}};
  const auto n = solve_nested(WaterfillOracle(ch), 1.0);
  const auto d = waterfill::solve_static({ch, 1.0, {}, {}}, 1e-12);
  CHECK(n.ee == doctest::Approx(d.ee).epsilon(1e-9));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(n.allocation.powers[i] == doctest::Approx(d.allocation.powers[i]).epsilon(1e-4).scale(1e-6));
  }
  CHECK_THROWS_AS(solve_nested(one, 0.0), DomainError);
}

TEST_CASE("g(t) vanishes as P goes to zero") {
  const WaterfillOracle o(waterfill::ParallelChannel{{2.0, 0.5}});
  const double mu = 0.7;
  const double t = (1.0 - 1e-9) / mu;
  CHECK(t * o.solve(1.0 / t - mu).rate < 1e-8);
}

TEST_CASE("g(t) is unimodal on random instances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> g(1 + trial % 5);
    for (auto& x : g) x = std::pow(10.0, -1.0 + 2.5 * u(rng));
    const double mu = std::pow(10.0, -2.0 + 3.0 * u(rng));
    const WaterfillOracle o(waterfill::ParallelChannel{g});
    int turns = 0;
    double prev = 0.0;
    int dir = 1;
    for (int k = 1; k < 1000; ++k) {
      const double t = k / (1000.0 * mu);
      const double v = t * o.solve(1.0 / t - mu).rate;
      const int d = v > prev ? 1 : (v < prev ? -1 : dir);
      if (d != dir) ++turns;
      // Only one switch, from rising to falling.
      CHECK_FALSE((dir == -1 && d == 1));
      dir = d;
      prev = v;
    }
    CHECK(turns <= 1);
  }
}

TEST_CASE("nested with the mercury oracle matches Dinkelbach") {
  const mmse::MercuryChannel mc{{qam4_table()}, {4.0, 1.0}};
  const auto d = mmse::solve_mmse_ee(mc, 0.5, 1e-12);
  const auto n = solve_nested(MercuryOracle(mc), 0.5);
  CHECK(n.ee == doctest::Approx(d.ee).epsilon(1e-8));
  CHECK(n.sum_power == doctest::Approx(d.allocation.sum_power).epsilon(1e-4));
  CHECK(n.oracle_calls > n.iterations);
}

TEST_CASE("mercury capacity bounds the budget") {
  const mmse::MercuryChannel mc{{gaussian_table()}, {1.0}};
  const double cap = mercury_power_capacity(mc);
  CHECK(cap == doctest::Approx(gaussian_table().rho_end()).epsilon(1e-6));
  CHECK_THROWS_AS(rate_max_mercury(mc, 2.0 * cap), TableRangeError);
  const mmse::MercuryChannel sat{{qam4_table()}, {1.0}};
  const MercuryOracle o(sat);
  CHECK(o.solve(10.0 * mercury_power_capacity(sat)).rate == doctest::Approx(std::log(4.0)).epsilon(1e-9));
}
