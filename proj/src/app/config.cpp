#include "eeopt/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "eeopt/mmse.hpp"
#include "json.hpp"

namespace eeopt::app {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!keys.count(item.key())) throw ConfigError(join(where, item.key()), "unknown key");
  }
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  return j;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where, "must be finite");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = as_number(j, where);
  if (!(v > 0.0)) throw ConfigError(where, "must be > 0");
  return v;
}

double nonnegative(const json& j, const std::string& where) {
  const double v = as_number(j, where);
  if (!(v >= 0.0)) throw ConfigError(where, "must be >= 0");
  return v;
}

long long as_integer(const json& j, const std::string& where, long long lo) {
  if (!j.is_number_integer()) throw ConfigError(where, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo) throw ConfigError(where, "must be >= " + std::to_string(lo));
  return v;
}

// A CNR is either a plain number or a string with an explicit " dB" suffix.
double cnr_value(const json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::istringstream is(s);
    double db = 0.0;
    std::string unit;
    if (!(is >> db) || !(is >> unit) || unit != "dB" || !is.eof() || !std::isfinite(db)) {
      throw ConfigError(where, "expected a number or a string like \"3 dB\"");
    }
    return std::pow(10.0, db / 10.0);
  }
  return nonnegative(j, where);
}

std::vector<double> cnr_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(cnr_value(j[i], index(where, i)));
  return out;
}

SolverKind parse_solver(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where, "expected a string");
  const std::string s = j.get<std::string>();
  static const std::pair<const char*, SolverKind> kinds[] = {
      {"static", SolverKind::Static},
      {"flat-closed-form", SolverKind::FlatClosedForm},
      {"ergodic-rayleigh", SolverKind::ErgodicRayleigh},
      {"ergodic-parallel", SolverKind::ErgodicParallel},
      {"mimo", SolverKind::Mimo},
      {"mmse", SolverKind::Mmse},
      {"nested", SolverKind::Nested}};
  for (const auto& [name, kind] : kinds) {
    if (s == name) return kind;
  }
  throw ConfigError(where, "unknown solver '" + s + "'");
}

powermodel::PowerModel parse_power_model(const json& j, const std::string& where) {
  require_object(j, where);
  if (!j.contains("type") || !j["type"].is_string()) {
    throw ConfigError(join(where, "type"), "expected \"cui\", \"generic\" or \"macro\"");
  }
  const std::string type = j["type"].get<std::string>();
  auto get = [&](const char* key, double fallback) {
    return j.contains(key) ? as_number(j[key], join(where, key)) : fallback;
  };
  auto get_int = [&](const char* key, int fallback) {
    return j.contains(key) ? static_cast<int>(as_integer(j[key], join(where, key), 1)) : fallback;
  };
  auto need = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(join(where, key), "missing");
  };

  powermodel::PowerModel model;
  if (type == "cui") {
    reject_unknown(j, where,
                   {"type", "xi", "eta", "p_mix", "p_syn", "p_filt", "p_dac", "bandwidth_hz",
                    "period_s"});
    need("bandwidth_hz");
    powermodel::CuiLinkModel m;
    m.xi = get("xi", 1.0);
    m.eta = get("eta", 1.0);
    m.p_mix = get("p_mix", 0.0);
    m.p_syn = get("p_syn", 0.0);
    m.p_filt = get("p_filt", 0.0);
    m.p_dac = get("p_dac", 0.0);
    m.w_c = get("bandwidth_hz", 1.0);
    m.t_c = get("period_s", 1.0);
    model = m;
  } else if (type == "generic") {
    reject_unknown(j, where,
                   {"type", "n_a", "p_c", "p_sta", "eta_pa", "eta_ps", "eta_c", "bandwidth_hz"});
    need("bandwidth_hz");
    need("eta_pa");
    powermodel::GenericBsModel m;
    m.n_a = get_int("n_a", 1);
    m.p_c = get("p_c", 0.0);
    m.p_sta = get("p_sta", 0.0);
    m.eta_pa = get("eta_pa", 1.0);
    m.eta_ps = get("eta_ps", 1.0);
    m.eta_c = get("eta_c", 0.0);
    m.bandwidth = get("bandwidth_hz", 1.0);
    model = m;
  } else if (type == "macro") {
    reject_unknown(j, where,
                   {"type", "n_sector", "n_pa_per_sector", "p_sp", "mu_pa", "c_c", "c_psbb",
                    "bandwidth_hz"});
    need("bandwidth_hz");
    powermodel::MacroBsModel m;
    m.n_sector = get_int("n_sector", 1);
    m.n_pa_per_sector = get_int("n_pa_per_sector", 1);
    m.p_sp = get("p_sp", 0.0);
    m.mu_pa = get("mu_pa", 1.0);
    m.c_c = get("c_c", 0.0);
    m.c_psbb = get("c_psbb", 0.0);
    m.bandwidth = get("bandwidth_hz", 1.0);
    model = m;
  } else {
    throw ConfigError(join(where, "type"), "unknown power model '" + type + "'");
  }
  try {
    powermodel::to_mu_scale(model);
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
  return model;
}

std::vector<double> grid_values(const json& j, const std::string& where, bool log) {
  require_object(j, where);
  reject_unknown(j, where, {"from", "to", "points"});
  for (const char* key : {"from", "to", "points"}) {
    if (!j.contains(key)) throw ConfigError(join(where, key), "missing");
  }
  const double from = as_number(j["from"], join(where, "from"));
  const double to = as_number(j["to"], join(where, "to"));
  const auto n = as_integer(j["points"], join(where, "points"), 2);
  if (log && !(from > 0.0)) throw ConfigError(join(where, "from"), "must be > 0 on a log grid");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n - 1);
    v[static_cast<std::size_t>(k)] = log ? from * std::pow(to / from, s) : from + (to - from) * s;
  }
  v.front() = from;
  v.back() = to;
  return v;
}

SweepSpec parse_sweep(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"variable", "values", "log", "linear"});
  SweepSpec s;
  if (!j.contains("variable") || !j["variable"].is_string()) {
    throw ConfigError(join(where, "variable"), "expected \"mu\", \"p_c\" or \"n\"");
  }
  const std::string var = j["variable"].get<std::string>();
  if (var == "mu") {
    s.variable = SweepVariable::Mu;
  } else if (var == "p_c") {
    s.variable = SweepVariable::Pc;
  } else if (var == "n") {
    s.variable = SweepVariable::N;
  } else {
    throw ConfigError(join(where, "variable"), "unknown sweep variable '" + var + "'");
  }

  const int given = static_cast<int>(j.contains("values")) + static_cast<int>(j.contains("log")) +
                    static_cast<int>(j.contains("linear"));
  if (given != 1) throw ConfigError(where, "give exactly one of values, log, linear");
  if (j.contains("values")) {
    const json& v = j["values"];
    if (!v.is_array() || v.empty()) {
      throw ConfigError(join(where, "values"), "expected a non-empty array");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.values.push_back(as_number(v[i], index(join(where, "values"), i)));
    }
  } else if (j.contains("log")) {
    s.values = grid_values(j["log"], join(where, "log"), true);
  } else {
    s.values = grid_values(j["linear"], join(where, "linear"), false);
  }
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    if (!(s.values[i] > s.values[i - 1])) {
      throw ConfigError(join(where, "values"), "sweep grid must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double v = s.values[i];
    const std::string at = index(join(where, "values"), i);
    if (s.variable == SweepVariable::Mu && !(v > 0.0)) throw ConfigError(at, "mu must be > 0");
    if (s.variable == SweepVariable::Pc && !(v >= 0.0)) throw ConfigError(at, "P_c must be >= 0");
    if (s.variable == SweepVariable::N && !(v >= 1.0 && v == std::floor(v) && v <= 64.0)) {
      throw ConfigError(at, "n must be an integer in [1, 64]");
    }
  }
  return s;
}

void parse_channel(const json& j, ScenarioConfig& c) {
  const std::string where = "channel";
  require_object(j, where);
  reject_unknown(j, where, {"cnr", "p_max", "mean_cnr", "mean_cnrs"});
  if (j.contains("cnr")) c.cnrs = cnr_list(j["cnr"], join(where, "cnr"));
  if (j.contains("p_max")) c.p_max = positive(j["p_max"], join(where, "p_max"));
  if (j.contains("mean_cnr")) {
    c.mean_cnr = cnr_value(j["mean_cnr"], join(where, "mean_cnr"));
    if (!(c.mean_cnr > 0.0)) throw ConfigError(join(where, "mean_cnr"), "must be > 0");
  }
  if (j.contains("mean_cnrs")) {
    c.mean_cnrs = cnr_list(j["mean_cnrs"], join(where, "mean_cnrs"));
    for (std::size_t i = 0; i < c.mean_cnrs.size(); ++i) {
      if (!(c.mean_cnrs[i] > 0.0)) {
        throw ConfigError(index(join(where, "mean_cnrs"), i), "must be > 0");
      }
    }
  }
}

void parse_constraints(const json& j, ScenarioConfig& c) {
  const std::string where = "constraints";
  require_object(j, where);
  reject_unknown(j, where, {"sum_power", "min_rate", "avg_power_max", "avg_rate_min"});
  if (j.contains("sum_power")) c.sum_power = positive(j["sum_power"], join(where, "sum_power"));
  if (j.contains("min_rate")) c.min_rate = nonnegative(j["min_rate"], join(where, "min_rate"));
  if (j.contains("avg_power_max")) {
    c.avg_power_max = positive(j["avg_power_max"], join(where, "avg_power_max"));
  }
  if (j.contains("avg_rate_min")) {
    c.avg_rate_min = nonnegative(j["avg_rate_min"], join(where, "avg_rate_min"));
  }
}

void parse_mimo(const json& j, ScenarioConfig& c) {
  const std::string where = "mimo";
  require_object(j, where);
  reject_unknown(j, where, {"links", "n_r", "noise_psd_dbm_hz", "path_gain_db"});
  if (j.contains("links")) {
    const json& links = j["links"];
    if (!links.is_array() || links.empty()) {
      throw ConfigError(join(where, "links"), "expected a non-empty array");
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string at = index(join(where, "links"), i);
      require_object(links[i], at);
      reject_unknown(links[i], at, {"n_t", "n_r"});
      MimoLink link;
      for (const char* key : {"n_t", "n_r"}) {
        if (!links[i].contains(key)) throw ConfigError(join(at, key), "missing");
      }
      link.n_t = static_cast<int>(as_integer(links[i]["n_t"], join(at, "n_t"), 1));
      link.n_r = static_cast<int>(as_integer(links[i]["n_r"], join(at, "n_r"), 1));
      c.links.push_back(link);
    }
  }
  if (j.contains("n_r")) {
    c.sweep_n_r = static_cast<int>(as_integer(j["n_r"], join(where, "n_r"), 1));
  }
  if (!j.contains("noise_psd_dbm_hz")) throw ConfigError(join(where, "noise_psd_dbm_hz"), "missing");
  const double dbm = as_number(j["noise_psd_dbm_hz"], join(where, "noise_psd_dbm_hz"));
  c.noise_psd = std::pow(10.0, dbm / 10.0) * 1e-3;
  if (j.contains("path_gain_db")) {
    c.path_gain = std::pow(10.0, as_number(j["path_gain_db"], join(where, "path_gain_db")) / 10.0);
  }
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Static: return "static";
    case SolverKind::FlatClosedForm: return "flat-closed-form";
    case SolverKind::ErgodicRayleigh: return "ergodic-rayleigh";
    case SolverKind::ErgodicParallel: return "ergodic-parallel";
    case SolverKind::Mimo: return "mimo";
    case SolverKind::Mmse: return "mmse";
    case SolverKind::Nested: return "nested";
  }
  return "unknown";
}

std::string MimoLink::label() const {
  return std::to_string(n_t) + "x" + std::to_string(n_r);
}

void ScenarioConfig::validate() const {
  const bool mu_sweep = sweep.variable == SweepVariable::Mu;
  if (mu_sweep && power_model) {
    throw ConfigError("sweep.variable", "a mu sweep cannot be combined with a power model");
  }
  if (!mu_sweep && !mu && !power_model) throw ConfigError("mu", "missing (give mu or power_model)");
  if (mu && power_model) throw ConfigError("mu", "give either mu or power_model, not both");
  if (mu && !(*mu > 0.0)) throw ConfigError("mu", "must be > 0");
  if (sweep.variable == SweepVariable::Pc &&
      !(power_model && std::holds_alternative<powermodel::GenericBsModel>(*power_model))) {
    throw ConfigError("sweep.variable", "a p_c sweep needs a generic power model");
  }
  if (sweep.variable == SweepVariable::N && solver != SolverKind::Mimo) {
    throw ConfigError("sweep.variable", "an n sweep is only defined for the mimo solver");
  }

  const bool static_constraints = sum_power || min_rate;
  const bool average_constraints = avg_power_max || avg_rate_min;
  auto need_cnrs = [&] {
    if (cnrs.empty()) throw ConfigError("channel.cnr", "missing");
  };
  auto no_static = [&] {
    if (static_constraints) {
      throw ConfigError("constraints", "sum_power/min_rate are not supported by this solver");
    }
  };
  auto no_average = [&] {
    if (average_constraints) {
      throw ConfigError("constraints",
                        "avg_power_max/avg_rate_min are not supported by this solver");
    }
  };
  auto need_constellations = [&] {
    if (constellations.empty()) throw ConfigError("constellation", "missing");
    if (constellations.size() != 1 && constellations.size() != cnrs.size()) {
      throw ConfigError("constellation", "give one constellation or one per subchannel");
    }
  };

  switch (solver) {
    case SolverKind::Static:
      need_cnrs();
      no_average();
      break;
    case SolverKind::FlatClosedForm:
      need_cnrs();
      if (cnrs.size() != 1) throw ConfigError("channel.cnr", "needs exactly one subchannel");
      if (!(cnrs[0] > 0.0)) throw ConfigError("channel.cnr[0]", "must be > 0");
      if (std::isfinite(p_max)) throw ConfigError("channel.p_max", "not supported by this solver");
      no_static();
      no_average();
      break;
    case SolverKind::ErgodicRayleigh:
      if (!(mean_cnr > 0.0)) throw ConfigError("channel.mean_cnr", "missing");
      no_static();
      break;
    case SolverKind::ErgodicParallel:
      if (mean_cnrs.empty()) throw ConfigError("channel.mean_cnrs", "missing");
      no_static();
      break;
    case SolverKind::Mimo:
      if (!(power_model && std::holds_alternative<powermodel::GenericBsModel>(*power_model))) {
        throw ConfigError("power_model", "the mimo solver needs a generic power model");
      }
      if (!(noise_psd > 0.0)) throw ConfigError("mimo.noise_psd_dbm_hz", "missing");
      if (sweep.variable == SweepVariable::N) {
        if (!links.empty()) throw ConfigError("mimo.links", "not allowed with an n sweep");
      } else if (links.empty()) {
        throw ConfigError("mimo.links", "missing");
      }
      no_static();
      break;
    case SolverKind::Mmse:
      need_cnrs();
      need_constellations();
      no_static();
      no_average();
      break;
    case SolverKind::Nested:
      need_cnrs();
      no_static();
      no_average();
      if (inner == "mercury") {
        need_constellations();
        if (std::isfinite(p_max)) throw ConfigError("channel.p_max", "not supported by mercury");
      } else if (inner != "waterfill") {
        throw ConfigError("inner", "expected \"waterfill\" or \"mercury\"");
      }
      break;
  }
  if (solver != SolverKind::Mimo && (!links.empty() || noise_psd > 0.0)) {
    throw ConfigError("mimo", "only used by the mimo solver");
  }
  if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  require_object(j, "");
  reject_unknown(j, "",
                 {"schema_version", "solver", "channel", "mu", "power_model", "constellation",
                  "table", "inner", "constraints", "mimo", "monte_carlo", "sweep", "tolerance",
                  "max_iter", "tradeoff_points", "description"});

  ScenarioConfig c;
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  c.schema_version = static_cast<int>(as_integer(j["schema_version"], "schema_version", 1));
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version));
  }
  if (!j.contains("solver")) throw ConfigError("solver", "missing");
  c.solver = parse_solver(j["solver"], "solver");

  if (j.contains("channel")) parse_channel(j["channel"], c);
  if (j.contains("mu")) c.mu = positive(j["mu"], "mu");
  if (j.contains("power_model")) c.power_model = parse_power_model(j["power_model"], "power_model");
  if (j.contains("constellation")) {
    const json& cj = j["constellation"];
    if (cj.is_string()) {
      c.constellations.push_back(cj.get<std::string>());
    } else if (cj.is_array() && !cj.empty()) {
      for (std::size_t i = 0; i < cj.size(); ++i) {
        if (!cj[i].is_string()) throw ConfigError(index("constellation", i), "expected a string");
        c.constellations.push_back(cj[i].get<std::string>());
      }
    } else {
      throw ConfigError("constellation", "expected a label or an array of labels");
    }
    for (std::size_t i = 0; i < c.constellations.size(); ++i) {
      try {
        mmse::Constellation::parse(c.constellations[i]);
      } catch (const DomainError& e) {
        throw ConfigError(index("constellation", i), e.what());
      }
    }
  }
  if (j.contains("table")) {
    const json& t = require_object(j["table"], "table");
    reject_unknown(t, "table", {"rho_max", "points"});
    if (t.contains("rho_max")) c.rho_max = positive(t["rho_max"], "table.rho_max");
    if (c.rho_max <= 1e-3) throw ConfigError("table.rho_max", "must exceed 1e-3");
    if (t.contains("points")) {
      c.table_points = static_cast<int>(as_integer(t["points"], "table.points", 64));
    }
  }
  if (j.contains("inner")) {
    if (!j["inner"].is_string()) throw ConfigError("inner", "expected a string");
    c.inner = j["inner"].get<std::string>();
  }
  if (j.contains("constraints")) parse_constraints(j["constraints"], c);
  if (j.contains("mimo")) parse_mimo(j["mimo"], c);
  if (j.contains("monte_carlo")) {
    const json& m = require_object(j["monte_carlo"], "monte_carlo");
    reject_unknown(m, "monte_carlo", {"samples", "seed"});
    if (m.contains("samples")) {
      c.samples = static_cast<std::size_t>(as_integer(m["samples"], "monte_carlo.samples", 1));
    }
    if (m.contains("seed")) {
      c.seed = static_cast<std::uint64_t>(as_integer(m["seed"], "monte_carlo.seed", 0));
    }
  }
  if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"], "sweep");
  if (j.contains("tolerance")) c.tolerance = positive(j["tolerance"], "tolerance");
  if (j.contains("max_iter")) c.max_iter = static_cast<int>(as_integer(j["max_iter"], "max_iter", 1));
  if (j.contains("tradeoff_points")) {
    c.tradeoff_points = static_cast<int>(as_integer(j["tradeoff_points"], "tradeoff_points", 2));
  }
  if (j.contains("description") && !j["description"].is_string()) {
    throw ConfigError("description", "expected a string");
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace eeopt::app
