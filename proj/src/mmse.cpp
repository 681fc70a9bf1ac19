#include "eeopt/mmse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "eeopt/error.hpp"
#include "eeopt/numerics.hpp"

namespace eeopt::mmse {

namespace {

constexpr double kFirstGridPoint = 1e-3;
constexpr double kDomainPad = 8.0;
constexpr const char* kTableMagic = "eeopt-mmse-table";
constexpr int kTableVersion = 1;

numerics::QuadratureSpec inner_spec() {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-18;
  spec.rel_tol = 1e-12;
  return spec;
}

bool is_perfect_square(int m, int& root) {
  root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  return root * root == m;
}

std::vector<double> pam_points(int m) {
  const double scale = std::sqrt(3.0 / (static_cast<double>(m) * m - 1.0));
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int l = 1; l <= m; ++l) s[static_cast<std::size_t>(l - 1)] = (2.0 * l - 1.0 - m) * scale;
  return s;
}

// E[Var(s | y)^power] for y = sqrt(rho) s + n with real noise of variance 1/2
// (power 1 gives the MMSE, power 2 the slope magnitude up to a factor 2).
double real_conditional_moment(const std::vector<double>& s, const std::vector<double>& q,
                               double rho, int power) {
  const double a = std::sqrt(rho);
  std::vector<double> centers(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) centers[l] = a * s[l];

  const std::size_t m = s.size();
  std::vector<double> w(m);
  auto integrand = [&](double y) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < m; ++l) {
      const double d = y - centers[l];
      w[l] = -d * d;
      top = std::max(top, w[l]);
    }
    double total = 0.0;
    double first = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      w[l] = q[l] * std::exp(w[l] - top);
      total += w[l];
      first += w[l] * s[l];
    }
    const double mean = first / total;
    double var = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double d = s[l] - mean;
      var += w[l] * d * d;
    }
    var /= total;
    const double density = std::exp(top) * total / std::sqrt(std::numbers::pi);
    return power == 1 ? density * var : density * var * var;
  };

  std::vector<double> cuts = centers;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.insert(cuts.begin(), cuts.front() - kDomainPad);
  cuts.push_back(cuts.back() + kDomainPad);

  const auto spec = inner_spec();
  double sum = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    sum += numerics::integrate(integrand, cuts[k - 1], cuts[k], spec);
  }
  return sum;
}

struct Slopes {
  double d0;
  double d1;
};

// Fritsch-Carlson limiter: keeps the cubic monotone on a monotone segment.
Slopes limit_slopes(double y0, double y1, double h, double d0, double d1) {
  const double delta = (y1 - y0) / h;
  if (delta == 0.0) return {0.0, 0.0};
  double alpha = d0 / delta;
  double beta = d1 / delta;
  if (alpha < 0.0) alpha = 0.0;
  if (beta < 0.0) beta = 0.0;
  const double r2 = alpha * alpha + beta * beta;
  if (r2 > 9.0) {
    const double tau = 3.0 / std::sqrt(r2);
    alpha *= tau;
    beta *= tau;
  }
  return {alpha * delta, beta * delta};
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const Slopes s = limit_slopes(y0, y1, h, d0, d1);
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * s.d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * s.d1;
}

std::size_t segment_of(const std::vector<double>& grid, double x) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  return std::min(k, grid.size() - 1) - 1;
}

// MMSE interpolant on segment k, expressed in the segment's own coordinate
// (rho on the first segment, log rho after it).
struct MmseSegment {
  bool log_space;
  double x0, x1, y0, y1, d0, d1;

  double value_at_coordinate(double x) const { return hermite(x0, x1, y0, y1, d0, d1, x); }
};

MmseSegment mmse_segment(const MmseTable& t, std::size_t k) {
  if (k == 0) {
    return {false, t.rho[0], t.rho[1], t.mmse[0], t.mmse[1], t.dmmse[0], t.dmmse[1]};
  }
  return {true,
          std::log(t.rho[k]),
          std::log(t.rho[k + 1]),
          std::log(t.mmse[k]),
          std::log(t.mmse[k + 1]),
          t.rho[k] * t.dmmse[k] / t.mmse[k],
          t.rho[k + 1] * t.dmmse[k + 1] / t.mmse[k + 1]};
}

[[noreturn]] void fail(const std::string& what) { throw DomainError("load_table: " + what); }

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Constellation Constellation::gaussian() {
  Constellation c;
  c.kind = Kind::Gaussian;
  c.order = 0;
  return c;
}

Constellation Constellation::pam(int m) {
  if (m < 2) throw DomainError("Constellation::pam: m must be >= 2");
  Constellation c;
  c.kind = Kind::Pam;
  c.order = m;
  c.branch_points = pam_points(m);
  c.branch_probabilities.assign(static_cast<std::size_t>(m), 1.0 / m);
  return c;
}

Constellation Constellation::qam(int m) {
  int root = 0;
  if (m < 4 || !is_perfect_square(m, root)) {
    throw DomainError("Constellation::qam: m must be a perfect square >= 4");
  }
  Constellation c;
  c.kind = Kind::Qam;
  c.order = m;
  c.branch_points = pam_points(root);
  for (double& s : c.branch_points) s *= std::sqrt(0.5);
  c.branch_probabilities.assign(static_cast<std::size_t>(root), 1.0 / root);
  return c;
}

Constellation Constellation::point() {
  Constellation c;
  c.kind = Kind::Point;
  c.order = 1;
  c.branch_points = {1.0};
  c.branch_probabilities = {1.0};
  return c;
}

Constellation Constellation::parse(const std::string& label) {
  if (label == "gaussian") return gaussian();
  if (label == "point") return point();
  const auto dash = label.find('-');
  if (dash != std::string::npos && dash > 0) {
    const std::string head = label.substr(0, dash);
    const std::string tail = label.substr(dash + 1);
    if (std::all_of(head.begin(), head.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) &&
        head.size() <= 6) {
      const int m = std::stoi(head);
      if (tail == "pam") return pam(m);
      if (tail == "qam") return qam(m);
    }
  }
  throw DomainError("unknown constellation '" + label + "'");
}

std::string Constellation::label() const {
  switch (kind) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Point: return "point";
    case Kind::Pam: return std::to_string(order) + "-pam";
    case Kind::Qam: return std::to_string(order) + "-qam";
  }
  return "unknown";
}

void Constellation::validate() const {
  if (kind == Kind::Gaussian) return;
  if (branch_points.empty() || branch_points.size() != branch_probabilities.size()) {
    throw DomainError("Constellation: points and probabilities must match");
  }
  double mass = 0.0;
  double energy = 0.0;
  for (std::size_t l = 0; l < branch_points.size(); ++l) {
    if (!(branch_probabilities[l] >= 0.0)) {
      throw DomainError("Constellation: probabilities must be >= 0");
    }
    mass += branch_probabilities[l];
    energy += branch_probabilities[l] * branch_points[l] * branch_points[l];
  }
  if (kind == Kind::Qam) energy *= 2.0;
  if (std::abs(mass - 1.0) > 1e-12 || std::abs(energy - 1.0) > 1e-12) {
    throw DomainError("Constellation: probabilities must sum to 1 and power must be 1");
  }
}

std::vector<std::complex<double>> Constellation::points() const {
  std::vector<std::complex<double>> out;
  switch (kind) {
    case Kind::Gaussian: break;
    case Kind::Point:
    case Kind::Pam:
      for (double s : branch_points) out.emplace_back(s, 0.0);
      break;
    case Kind::Qam:
      for (double re : branch_points) {
        for (double im : branch_points) out.emplace_back(re, im);
      }
      break;
  }
  return out;
}

double Constellation::max_rate() const {
  if (kind == Kind::Gaussian) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(order));
}

MmseValue mmse_eval(const Constellation& c, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("mmse_eval: rho must be >= 0");
  switch (c.kind) {
    case Constellation::Kind::Gaussian: {
      const double v = 1.0 / (1.0 + rho);
      return {v, -v * v};
    }
    case Constellation::Kind::Point: return {0.0, 0.0};
    case Constellation::Kind::Pam:
      return {real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 1),
              -2.0 * real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 2)};
    case Constellation::Kind::Qam:
      return {2.0 * real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 1),
              -4.0 * real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 2)};
  }
  throw DomainError("mmse_eval: unknown constellation");
}

double mmse_of(const Constellation& c, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("mmse_of: rho must be >= 0");
  switch (c.kind) {
    case Constellation::Kind::Gaussian: return 1.0 / (1.0 + rho);
    case Constellation::Kind::Point: return 0.0;
    case Constellation::Kind::Pam:
      return real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 1);
    case Constellation::Kind::Qam:
      return 2.0 * real_conditional_moment(c.branch_points, c.branch_probabilities, rho, 1);
  }
  throw DomainError("mmse_of: unknown constellation");
}

MmseTable build_table(const Constellation& c, double rho_max, int n_points) {
  c.validate();
  if (!(rho_max > kFirstGridPoint) || !std::isfinite(rho_max)) {
    throw DomainError("build_table: rho_max must exceed 1e-3");
  }
  if (n_points < 64) throw DomainError("build_table: n_points must be >= 64");

  MmseTable t;
  t.label = c.label();
  t.rho_max = rho_max;
  t.n_points = n_points;
  t.floor = c.kind == Constellation::Kind::Gaussian ? 0.0 : kMmseFloor;
  t.rate_cap = c.max_rate();

  const auto add_row = [&](double rho, const MmseValue& v) {
    t.rho.push_back(rho);
    t.mmse.push_back(v.mmse);
    t.dmmse.push_back(v.derivative);
  };

  add_row(0.0, mmse_eval(c, 0.0));
  const double ratio = std::log(rho_max / kFirstGridPoint);
  const bool zero = t.mmse.front() == 0.0;
  for (int k = 0; k < n_points; ++k) {
    const double rho = k == n_points - 1
                           ? rho_max
                           : kFirstGridPoint * std::exp(ratio * k / (n_points - 1));
    const MmseValue v = mmse_eval(c, rho);
    if (!zero && v.mmse < t.floor) {
      t.saturated = true;
      break;
    }
    add_row(rho, v);
  }
  if (t.rho.size() < 3) throw NumericalError("build_table: MMSE fell below the floor too early");

  t.rate.assign(t.rho.size(), 0.0);
  if (!zero) {
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-12;
    auto f = [&](double rho) { return mmse_of(c, rho); };
    for (std::size_t k = 1; k < t.rho.size(); ++k) {
      t.rate[k] = t.rate[k - 1] + numerics::integrate(f, t.rho[k - 1], t.rho[k], spec);
    }
  }

  for (std::size_t k = 1; k < t.rho.size(); ++k) {
    if (!zero && !(t.mmse[k] < t.mmse[k - 1])) {
      std::ostringstream os;
      os << "build_table(" << t.label << "): MMSE not decreasing at row " << k << " (rho "
         << t.rho[k] << ": " << t.mmse[k - 1] << " -> " << t.mmse[k] << ")";
      throw NumericalError(os.str());
    }
    if (t.rate[k] < t.rate[k - 1]) {
      std::ostringstream os;
      os << "build_table(" << t.label << "): rate decreasing at row " << k;
      throw NumericalError(os.str());
    }
  }
  return t;
}

void MmseTable::validate() const {
  const std::size_t n = rho.size();
  if (n < 3 || mmse.size() != n || dmmse.size() != n || rate.size() != n) {
    throw DomainError("MmseTable: inconsistent column sizes");
  }
  if (rho[0] != 0.0 || rate[0] != 0.0) throw DomainError("MmseTable: first row must be rho = 0");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(rho[k] > rho[k - 1])) throw DomainError("MmseTable: rho must increase strictly");
    if (!zero() && !(mmse[k] < mmse[k - 1] && mmse[k] > 0.0)) {
      throw DomainError("MmseTable: MMSE must be positive and strictly decreasing");
    }
    if (rate[k] < rate[k - 1]) throw DomainError("MmseTable: rate must be nondecreasing");
  }
}

double MmseTable::mmse_at(double x) const {
  if (!(x >= 0.0)) throw DomainError("MmseTable::mmse_at: rho must be >= 0");
  if (zero()) return 0.0;
  if (x == 0.0) return mmse[0];
  if (x > rho_end()) {
    if (!saturated) {
      throw TableRangeError("MmseTable::mmse_at: rho " + format_double(x) +
                            " beyond rho_max; rebuild the table with a larger rho_max");
    }
    // Log-log extrapolation with the end slope; only reached below the floor.
    const std::size_t e = rho.size() - 1;
    const double slope = rho[e] * dmmse[e] / mmse[e];
    return mmse[e] * std::exp(slope * std::log(x / rho[e]));
  }
  const MmseSegment seg = mmse_segment(*this, segment_of(rho, x));
  if (!seg.log_space) return seg.value_at_coordinate(x);
  return std::exp(seg.value_at_coordinate(std::log(x)));
}

double MmseTable::rate_at(double x) const {
  if (!(x >= 0.0)) throw DomainError("MmseTable::rate_at: rho must be >= 0");
  if (x == 0.0) return 0.0;
  if (x >= rho_end()) {
    if (x == rho_end() || saturated) return rate.back();
    throw TableRangeError("MmseTable::rate_at: rho " + format_double(x) +
                          " beyond rho_max; rebuild the table with a larger rho_max");
  }
  const std::size_t k = segment_of(rho, x);
  return hermite(rho[k], rho[k + 1], rate[k], rate[k + 1], mmse[k], mmse[k + 1], x);
}

double MmseTable::inverse(double zeta) const {
  if (zero()) throw DomainError("MmseTable::inverse: the MMSE is identically zero");
  if (!(zeta > 0.0) || zeta > mmse[0]) {
    throw DomainError("MmseTable::inverse: zeta must lie in (0, MMSE(0)]");
  }
  if (zeta == mmse[0]) return 0.0;
  if (zeta < mmse_end()) {
    std::ostringstream os;
    os << "MmseTable::inverse(" << label << "): zeta " << zeta << " below the table end "
       << mmse_end();
    if (saturated) {
      os << " (MMSE floor reached)";
    } else {
      os << "; rebuild the table with a larger rho_max";
    }
    throw TableRangeError(os.str());
  }
  // First row with mmse <= zeta.
  const auto it = std::lower_bound(mmse.begin(), mmse.end(), zeta, std::greater<double>());
  const std::size_t k = static_cast<std::size_t>(it - mmse.begin());
  if (mmse[k] == zeta) return rho[k];
  const MmseSegment seg = mmse_segment(*this, k - 1);
  const double target = seg.log_space ? std::log(zeta) : zeta;
  auto f = [&](double x) { return seg.value_at_coordinate(x) - target; };
  const numerics::RootBracket bracket{seg.x0, seg.x1, seg.y0 - target, seg.y1 - target};
  const double x = numerics::find_root(f, bracket, 1e-15 * std::max(1.0, std::abs(seg.x1)));
  return seg.log_space ? std::exp(x) : x;
}

double mmse_inverse(const MmseTable& table, double zeta) { return table.inverse(zeta); }

void save_table(const MmseTable& t, std::ostream& out) {
  out << kTableMagic << ' ' << kTableVersion << '\n';
  out << "label " << t.label << '\n';
  out << "rho_max " << format_double(t.rho_max) << '\n';
  out << "n_points " << t.n_points << '\n';
  out << "floor " << format_double(t.floor) << '\n';
  out << "rate_cap " << format_double(t.rate_cap) << '\n';
  out << "saturated " << (t.saturated ? 1 : 0) << '\n';
  out << "rows " << t.rho.size() << '\n';
  for (std::size_t k = 0; k < t.rho.size(); ++k) {
    out << format_double(t.rho[k]) << ' ' << format_double(t.mmse[k]) << ' '
        << format_double(t.dmmse[k]) << ' ' << format_double(t.rate[k]) << '\n';
  }
}

MmseTable load_table(std::istream& in) {
  auto read_number = [&](std::istream& is) {
    std::string token;
    if (!(is >> token)) fail("unexpected end of input");
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') fail("bad number '" + token + "'");
    return v;
  };
  auto expect_key = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key) fail(std::string("expected '") + key + "'");
  };

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kTableMagic) fail("not an MMSE table");
  if (version != kTableVersion) fail("unsupported version " + std::to_string(version));

  MmseTable t;
  expect_key("label");
  in >> t.label;
  expect_key("rho_max");
  t.rho_max = read_number(in);
  expect_key("n_points");
  t.n_points = static_cast<int>(read_number(in));
  expect_key("floor");
  t.floor = read_number(in);
  expect_key("rate_cap");
  t.rate_cap = read_number(in);
  expect_key("saturated");
  t.saturated = read_number(in) != 0.0;
  expect_key("rows");
  const double rows = read_number(in);
  if (!(rows >= 3) || rows > 1e7) fail("bad row count");
  const auto n = static_cast<std::size_t>(rows);
  t.rho.resize(n);
  t.mmse.resize(n);
  t.dmmse.resize(n);
  t.rate.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.rho[k] = read_number(in);
    t.mmse[k] = read_number(in);
    t.dmmse[k] = read_number(in);
    t.rate[k] = read_number(in);
  }
  t.validate();
  return t;
}

void save_table_file(const MmseTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_table(table, out);
  if (!out) throw Error("error while writing " + path);
}

MmseTable load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return load_table(in);
}

void MercuryChannel::validate() const {
  if (cnrs.empty()) throw DomainError("MercuryChannel: at least one subchannel is required");
  if (tables.size() != 1 && tables.size() != cnrs.size()) {
    throw DomainError("MercuryChannel: need one table, or one per subchannel");
  }
  for (double g : cnrs) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw DomainError("MercuryChannel: CNRs must be finite and non-negative");
    }
  }
  for (const auto& t : tables) t.validate();
}

MercuryAllocation mercury_allocate(const MercuryChannel& channel, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("mercury_allocate: lambda must be > 0");
  const std::size_t n = channel.size();
  MercuryAllocation a;
  a.powers.assign(n, 0.0);
  a.zetas.assign(n, std::numeric_limits<double>::infinity());
  a.gaps.assign(n, 1.0);
  a.rates.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = channel.cnrs[i];
    if (!(g > 0.0)) continue;
    const MmseTable& t = channel.table(i);
    const double zeta = lambda / g;
    a.zetas[i] = zeta;
    if (zeta >= t.mmse.front()) continue;
    const double rho = (t.saturated && zeta < t.mmse_end()) ? t.rho_end() : t.inverse(zeta);
    a.powers[i] = rho / g;
    a.gaps[i] = 1.0 / zeta - rho;
    a.rates[i] = t.rate_at(rho);
    a.sum_power += a.powers[i];
    a.sum_rate += a.rates[i];
  }
  return a;
}

double eval_F_mmse(const MercuryChannel& channel, double mu, double lambda) {
  const MercuryAllocation a = mercury_allocate(channel, lambda);
  return a.sum_rate - lambda * (mu + a.sum_power);
}

MercurySubproblem::MercurySubproblem(const MercuryChannel& channel, double mu)
    : channel_(channel), mu_(mu) {
  channel_.validate();
  if (!(mu_ > 0.0) || !std::isfinite(mu_)) throw DomainError("MercurySubproblem: mu must be > 0");
}

fracprog::SubproblemPoint MercurySubproblem::solve(double lambda) const {
  MercuryAllocation a = mercury_allocate(channel_, lambda);
  fracprog::SubproblemPoint point;
  point.numerator = a.sum_rate;
  point.denominator = mu_ + a.sum_power;
  point.allocation = std::move(a.powers);
  point.lambda = lambda;
  return point;
}

std::optional<fracprog::KktData> MercurySubproblem::kkt_data(
    const fracprog::SubproblemPoint& point) const {
  const std::size_t n = channel_.size();
  fracprog::KktData data;
  data.grad_numerator.resize(n);
  data.grad_denominator.assign(n, 1.0);
  data.lower.assign(n, 0.0);
  data.upper.assign(n, numerics::kInf);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = channel_.cnrs[i];
    data.grad_numerator[i] = g > 0.0 ? g * channel_.table(i).mmse_at(g * point.allocation[i]) : 0.0;
  }
  return data;
}

double MercurySubproblem::lambda_ceiling() const {
  double c = 0.0;
  for (std::size_t i = 0; i < channel_.size(); ++i) {
    c = std::max(c, channel_.cnrs[i] * channel_.table(i).mmse.front());
  }
  return c;
}

double MercurySubproblem::lambda_floor() const {
  double f = 0.0;
  for (std::size_t i = 0; i < channel_.size(); ++i) {
    const MmseTable& t = channel_.table(i);
    if (!t.saturated && !t.zero()) f = std::max(f, channel_.cnrs[i] * t.mmse_end());
  }
  return f;
}

double MercurySubproblem::feasible_start() const {
  const double ceiling = lambda_ceiling();
  if (!(ceiling > 0.0)) return 0.0;
  const double floor = lambda_floor();
  double lambda = 0.5 * ceiling;
  if (lambda <= floor) lambda = 0.5 * (floor + ceiling);
  return solve(lambda).ratio();
}

MmseSolution solve_mmse_ee(const MercuryChannel& channel, double mu, double tolerance,
                           int max_iter) {
  const MercurySubproblem sub(channel, mu);
  MmseSolution out;
  const double start = sub.feasible_start();
  if (!(start > 0.0)) {
    out.allocation.powers.assign(channel.size(), 0.0);
    out.allocation.zetas.assign(channel.size(), std::numeric_limits<double>::infinity());
    out.allocation.gaps.assign(channel.size(), 1.0);
    out.allocation.rates.assign(channel.size(), 0.0);
    out.trace.status = fracprog::Status::Converged;
    return out;
  }
  fracprog::DinkelbachOptions options;
  options.lambda0 = start;
  options.tolerance = tolerance;
  options.max_iter = max_iter;
  out.trace = fracprog::dinkelbach(sub, options);
  out.lambda = out.trace.lambda;
  out.allocation = mercury_allocate(channel, out.lambda);
  out.ee = out.allocation.energy_efficiency(mu);
  return out;
}

}  // namespace eeopt::mmse
