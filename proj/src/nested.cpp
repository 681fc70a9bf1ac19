#include "eeopt/nested.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eeopt/error.hpp"

namespace eeopt::nested {

namespace {

RateMaxResult zero_result(std::size_t n, double level) {
  RateMaxResult r;
  r.powers.assign(n, 0.0);
  r.level = level;
  return r;
}

void check_budget(double sum_power) {
  if (!(sum_power >= 0.0) || std::isnan(sum_power)) {
    throw DomainError("rate maximization: the power budget must be >= 0");
  }
}

struct MercuryRange {
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  bool saturates = true;  // every active table is saturated
};

MercuryRange mercury_range(const mmse::MercuryChannel& channel) {
  MercuryRange r;
  double nonsat_floor = 0.0;
  double sat_min = numerics::kInf;
  bool any_nonsat = false;
  for (std::size_t i = 0; i < channel.size(); ++i) {
    const double g = channel.cnrs[i];
    const mmse::MmseTable& t = channel.table(i);
    if (!(g > 0.0) || t.zero()) continue;
    r.eta_hi = std::max(r.eta_hi, g * t.mmse.front());
    if (t.saturated) {
      sat_min = std::min(sat_min, g * t.mmse_end());
    } else {
      any_nonsat = true;
      nonsat_floor = std::max(nonsat_floor, g * t.mmse_end());
    }
  }
  r.saturates = !any_nonsat;
  r.eta_lo = any_nonsat ? nonsat_floor * (1.0 + 1e-12) : sat_min;
  return r;
}

RateMaxResult mercury_at(const mmse::MercuryChannel& channel, double eta) {
  mmse::MercuryAllocation a = mmse::mercury_allocate(channel, eta);
  RateMaxResult r;
  r.powers = std::move(a.powers);
  r.sum_power = a.sum_power;
  r.rate = a.sum_rate;
  r.level = eta;
  return r;
}

}  // namespace

RateMaxResult rate_max_waterfill(const waterfill::ParallelChannel& channel, double sum_power) {
  channel.validate();
  check_budget(sum_power);
  const std::size_t n = channel.size();
  const double p_max = channel.p_max;

  std::vector<double> floors;  // 1/cnr of usable channels
  for (double g : channel.cnrs) {
    if (g > 0.0) floors.push_back(1.0 / g);
  }
  if (floors.empty() || sum_power == 0.0) return zero_result(n, channel.best_cnr());

  const double active = static_cast<double>(floors.size());
  double water;
  if (std::isfinite(p_max) && sum_power >= active * p_max) {
    water = *std::max_element(floors.begin(), floors.end()) + p_max;
  } else {
    std::vector<double> breaks = floors;
    if (std::isfinite(p_max)) {
      for (double a : floors) breaks.push_back(a + p_max);
    }
    std::sort(breaks.begin(), breaks.end());
    auto total = [&](double w) {
      double s = 0.0;
      for (double a : floors) s += std::clamp(w - a, 0.0, p_max);
      return s;
    };
    auto slope = [&](double w) {
      double c = 0.0;
      for (double a : floors) c += (a <= w && w < a + p_max) ? 1.0 : 0.0;
      return c;
    };
    std::size_t j = 1;
    while (j < breaks.size() && total(breaks[j]) < sum_power) ++j;
    const double base = breaks[j - 1];
    water = base + (sum_power - total(base)) / slope(base);
  }

  RateMaxResult r;
  r.powers.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = channel.cnrs[i];
    if (!(g > 0.0)) continue;
    r.powers[i] = std::clamp(water - 1.0 / g, 0.0, p_max);
    r.sum_power += r.powers[i];
    r.rate += std::log1p(g * r.powers[i]);
  }
  r.level = 1.0 / water;
  return r;
}

double mercury_power_capacity(const mmse::MercuryChannel& channel) {
  channel.validate();
  const MercuryRange range = mercury_range(channel);
  if (!(range.eta_hi > 0.0)) return numerics::kInf;
  return mercury_at(channel, range.eta_lo).sum_power;
}

RateMaxResult rate_max_mercury(const mmse::MercuryChannel& channel, double sum_power) {
  channel.validate();
  check_budget(sum_power);
  const MercuryRange range = mercury_range(channel);
  if (!(range.eta_hi > 0.0) || sum_power == 0.0) return zero_result(channel.size(), range.eta_hi);

  const RateMaxResult top = mercury_at(channel, range.eta_lo);
  if (sum_power >= top.sum_power) {
    if (range.saturates || sum_power == top.sum_power) return top;
    std::ostringstream os;
    os << "rate_max_mercury: budget " << sum_power << " exceeds the table capacity "
       << top.sum_power << "; rebuild the tables with a larger rho_max";
    throw TableRangeError(os.str());
  }

  auto f = [&](double s) { return mercury_at(channel, std::exp(s)).sum_power - sum_power; };
  const double lo = std::log(range.eta_lo);
  const double hi = std::log(range.eta_hi);
  const numerics::RootBracket bracket{lo, hi, top.sum_power - sum_power, -sum_power};
  const double s = numerics::find_root(f, bracket, 1e-15);
  return mercury_at(channel, std::exp(s));
}

WaterfillOracle::WaterfillOracle(waterfill::ParallelChannel channel)
    : channel_(std::move(channel)) {
  channel_.validate();
}

RateMaxResult WaterfillOracle::solve(double sum_power) const {
  return rate_max_waterfill(channel_, sum_power);
}

MercuryOracle::MercuryOracle(mmse::MercuryChannel channel) : channel_(std::move(channel)) {
  channel_.validate();
  capacity_ = mercury_power_capacity(channel_);
  saturates_ = mercury_range(channel_).saturates;
}

RateMaxResult MercuryOracle::solve(double sum_power) const {
  return rate_max_mercury(channel_, saturates_ ? std::min(sum_power, capacity_) : sum_power);
}

NestedSolution solve_nested(const RateMaxOracle& oracle, double mu, double tol) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("solve_nested: mu must be > 0");
  if (!(tol > 0.0)) throw DomainError("solve_nested: tol must be > 0");

  NestedSolution out;
  auto g = [&](double t) {
    ++out.oracle_calls;
    const double budget = std::max(0.0, 1.0 / t - mu);
    return t * oracle.solve(budget).rate;
  };

  const double eps = 1e-12 / mu;
  double a = eps;
  const double cap = oracle.max_power();
  if (std::isfinite(cap)) a = std::max(a, 1.0 / (mu + cap));
  double b = 1.0 / mu - eps;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol * 0.5 * (a + b) && out.iterations < 400) {
    ++out.iterations;
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }

  out.t = gc >= gd ? c : d;
  out.sum_power = std::max(0.0, 1.0 / out.t - mu);
  out.allocation = oracle.solve(out.sum_power);
  ++out.oracle_calls;
  out.ee = out.allocation.rate / (mu + out.allocation.sum_power);
  return out;
}

}  // namespace eeopt::nested
