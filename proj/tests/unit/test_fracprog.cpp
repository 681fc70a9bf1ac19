#include <cmath>

#include "doctest.h"
#include "eeopt/error.hpp"
#include "eeopt/fracprog.hpp"

using namespace eeopt;
using namespace eeopt::fracprog;

namespace {

// maximize sqrt(x) / (1 + x): optimum x = 1, ratio 1/2, and
// F(lambda) = 1/(4 lambda) - lambda in closed form.
class SqrtRatio final : public ParametricSubproblem {
 public:
  SubproblemPoint solve(double lambda) const override {
    const double x = 1.0 / (4.0 * lambda * lambda);
    SubproblemPoint p;
    p.allocation = {x};
    p.numerator = std::sqrt(x);
    p.denominator = 1.0 + x;
    p.lambda = lambda;
    return p;
  }
  std::optional<KktData> kkt_data(const SubproblemPoint& p) const override {
    KktData d;
    d.grad_numerator = {0.5 / std::sqrt(p.allocation[0])};
    d.grad_denominator = {1.0};
    d.lower = {0.0};
    d.upper = {numerics::kInf};
    return d;
  }
};

double closed_form_F(double lambda) { return 1.0 / (4.0 * lambda) - lambda; }

}  // namespace

TEST_CASE("subproblem values match the closed form") {
  SqrtRatio sub;
  for (double l : {0.1, 0.3, 0.5, 0.9, 2.0}) {
    CHECK(sub.solve(l).value() == doctest::Approx(closed_form_F(l)).epsilon(1e-14));
  }
}

TEST_CASE("dinkelbach converges to the maximum ratio") {
  SqrtRatio sub;
  DinkelbachOptions o;
  o.lambda0 = 0.05;
  o.tolerance = 1e-14;
  const auto t = dinkelbach(sub, o);
  CHECK(t.status == Status::Converged);
  CHECK(t.lambda == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(t.solution.allocation[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.iterations <= 10);
  for (std::size_t n = 1; n < t.iterates.size(); ++n) {
    CHECK(t.iterates[n].lambda >= t.iterates[n - 1].lambda);
    CHECK(t.iterates[n].value >= -1e-15);
  }
}

TEST_CASE("dinkelbach from lambda0 = 0 on a bounded subproblem") {
  // F(0) is finite when the numerator is bounded: clip the toy at x <= 100.
  class Clipped final : public ParametricSubproblem {
   public:
    SubproblemPoint solve(double lambda) const override {
      const double x = lambda > 0.0 ? std::min(100.0, 1.0 / (4.0 * lambda * lambda)) : 100.0;
      return {{x}, std::sqrt(x), 1.0 + x, lambda};
    }
  } sub;
  const auto t = dinkelbach(sub, {});
  CHECK(t.status == Status::Converged);
  CHECK(t.lambda == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("dinkelbach rejects a start with F < 0 and reports the iteration limit") {
  SqrtRatio sub;
  DinkelbachOptions o;
  o.lambda0 = 0.9;
  CHECK_THROWS_AS(dinkelbach(sub, o), DomainError);
  o.lambda0 = 0.01;
  o.max_iter = 1;
  o.tolerance = 1e-15;
  CHECK(dinkelbach(sub, o).status == Status::MaxIter);
}

TEST_CASE("bisection agrees with dinkelbach") {
  SqrtRatio sub;
  const auto b = bisection_solver(sub, 0.01, 3.0, 1e-13);
  CHECK(b.lambda == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(bisection_solver(sub, 0.6, 3.0, 1e-10), DomainError);
}

TEST_CASE("constrained solve clamps into the lambda bounds") {
  SqrtRatio sub;
  DinkelbachOptions o;
  o.lambda0 = 0.1;
  o.tolerance = 1e-12;

  auto t = solve_constrained(sub, {0.6, numerics::kInf}, o);
  CHECK(t.status == Status::ClampedMin);
  CHECK(t.lambda == 0.6);
  CHECK(t.solution.allocation[0] == doctest::Approx(1.0 / (4 * 0.36)));

  t = solve_constrained(sub, {0.0, 0.3}, o);
  CHECK(t.status == Status::ClampedMax);
  CHECK(t.lambda == 0.3);

  t = solve_constrained(sub, {0.2, 0.8}, o);
  CHECK(t.status == Status::Converged);
  CHECK(t.lambda == doctest::Approx(0.5));

  CHECK_THROWS_AS(solve_constrained(sub, {0.8, 0.2}, o), InfeasibleError);
  CHECK(clamp_to_bounds(0.1, {0.2, 0.8}) == 0.2);
  CHECK(clamp_to_bounds(0.9, {0.2, 0.8}) == 0.8);
}

TEST_CASE("minimize_reciprocal returns the minimum cost per unit") {
  SqrtRatio sub;
  DinkelbachOptions o;
  o.lambda0 = 0.1;
  o.tolerance = 1e-13;
  CHECK(minimize_reciprocal(sub, o) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("verify_kkt accepts the optimum and rejects other points") {
  SqrtRatio sub;
  const auto good = verify_kkt(sub, 0.5, 1e-9);
  CHECK(good.all());
  const auto bad = verify_kkt(sub, 0.4, 1e-9);
  CHECK_FALSE(bad.value);
  CHECK(bad.value_residual == doctest::Approx(closed_form_F(0.4)));
}

TEST_CASE("status names") {
  CHECK(to_string(Status::Converged) == "converged");
  CHECK(to_string(Status::ClampedMin) == "clamped-min");
  CHECK(to_string(Status::ClampedMax) == "clamped-max");
}
