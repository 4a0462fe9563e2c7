#include "coagfuse/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "coagfuse/csv.hpp"
#include "coagfuse/numeric.hpp"

namespace coagfuse {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t pos = 0;
    const double x = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + t + "'");
  }
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
    }
    cfg.raw_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

double Config::get_double(const std::string& key, double fallback) {
  double value = fallback;
  if (auto it = raw_.find(key); it != raw_.end()) {
    value = parse_double(key, it->second);
    consumed_.insert(key);
  }
  resolved_[key] = fmt_double(value);
  return value;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  std::uint64_t value = fallback;
  if (auto it = raw_.find(key); it != raw_.end()) {
    const std::string t = trim(it->second);
    std::uint64_t parsed = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      throw std::invalid_argument("config: key '" + key + "' has non-integer value '" + t + "'");
    }
    value = parsed;
    consumed_.insert(key);
  }
  resolved_[key] = fmt_u64(value);
  return value;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  bool value = fallback;
  if (auto it = raw_.find(key); it != raw_.end()) {
    const std::string t = trim(it->second);
    if (t == "true" || t == "1" || t == "yes") {
      value = true;
    } else if (t == "false" || t == "0" || t == "no") {
      value = false;
    } else {
      throw std::invalid_argument("config: key '" + key + "' has non-boolean value '" + t + "'");
    }
    consumed_.insert(key);
  }
  resolved_[key] = value ? "true" : "false";
  return value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  std::string value = fallback;
  if (auto it = raw_.find(key); it != raw_.end()) {
    value = trim(it->second);
    consumed_.insert(key);
  }
  resolved_[key] = value;
  return value;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) {
  std::vector<double> value = fallback;
  if (auto it = raw_.find(key); it != raw_.end()) {
    value.clear();
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) value.push_back(parse_double(key, item));
    }
    consumed_.insert(key);
  }
  std::string joined;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) joined += ',';
    joined += fmt_double(value[i]);
  }
  resolved_[key] = joined;
  return value;
}

void Config::set(const std::string& key, const std::string& value) { raw_[key] = value; }

void Config::ensure_consumed() const {
  std::string unknown;
  for (const auto& [key, _] : raw_) {
    if (consumed_.count(key) == 0) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw std::invalid_argument("config: unknown keys: " + unknown);
  }
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : resolved_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::string Config::hash_hex() const {
  const std::string text = canonical_text();
  const std::uint64_t h = fnv1a64(std::span<const char>(text.data(), text.size()));
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) {
    buf[15 - i] = hex[(h >> (4 * i)) & 0xf];
  }
  buf[16] = '\0';
  return std::string(buf);
}

RunSetup load_run_setup(Config& cfg) {
  RunSetup setup;

  setup.sim.lambda = cfg.get_double("sim.lambda", 1.0);
  setup.sim.t_end = cfg.get_double("sim.t_end", 1.0);
  setup.sim.n_particles = cfg.get_u64("sim.n_particles", 10000);
  setup.sim.v_min = cfg.get_double("sim.v_min", 0.5);
  setup.sim.record_interval = cfg.get_double("sim.record_interval", 0.25);
  setup.sim.seed = cfg.get_u64("sim.seed", 1);

  const std::string kind = cfg.get_string("init.kind", "monodisperse");
  if (kind == "monodisperse") {
    setup.init.kind = InitSpec::Kind::Monodisperse;
  } else if (kind == "lognormal") {
    setup.init.kind = InitSpec::Kind::LogNormal;
  } else if (kind == "ramified") {
    setup.init.kind = InitSpec::Kind::Ramified;
  } else {
    throw std::invalid_argument("config: init.kind must be monodisperse|lognormal|ramified");
  }
  setup.init.v0 = cfg.get_double("init.v0", 1.0);
  setup.init.log_sigma = cfg.get_double("init.log_sigma", 0.5);
  setup.init.kappa = cfg.get_double("init.kappa", 0.5);
  setup.init.weight = cfg.get_double("init.weight", 0.0);

  setup.coag.c_scale = cfg.get_double("coag.c_scale", 1.0);
  setup.coag.alpha = cfg.get_double("coag.alpha", 0.25);
  setup.coag.beta = cfg.get_double("coag.beta", 0.5);
  setup.coag.relaxed = cfg.get_bool("coag.relaxed", false);
  const std::string mod = cfg.get_string("coag.area_mod", "sphericity");
  if (mod == "none") {
    setup.coag.area_mod = AreaModulation::None;
  } else if (mod == "sphericity") {
    setup.coag.area_mod = AreaModulation::Sphericity;
  } else {
    throw std::invalid_argument("config: coag.area_mod must be none|sphericity");
  }
  setup.coag.theta = cfg.get_double("coag.theta", 0.5);
  setup.coag.validate();

  setup.fusion.r_scale = cfg.get_double("fusion.r_scale", 1.0);
  setup.fusion.mu = cfg.get_double("fusion.mu", 1.0);
  setup.fusion.sigma = cfg.get_double("fusion.sigma", 0.0);
  setup.fusion.validate();

  if (cfg.get_bool("trunc.enabled", false)) {
    TruncationParams trunc;
    trunc.big_r = cfg.get_double("trunc.big_r", 1e6);
    trunc.delta = cfg.get_double("trunc.delta", 1e-6);
    trunc.l_const = cfg.get_double("trunc.l_const", 1.0);
    trunc.validate();
    setup.trunc = trunc;
  }

  // flow.method=auto resolves per fusion family (closed form iff mu = 0)
  const std::string method = cfg.get_string("flow.method", "auto");
  if (method != "auto" && method != "closed_form" && method != "adaptive_implicit") {
    throw std::invalid_argument("config: flow.method must be auto|closed_form|adaptive_implicit");
  }
  if (method == "closed_form" && setup.fusion.mu != 0.0) {
    throw std::invalid_argument("config: flow.method=closed_form requires fusion.mu = 0");
  }
  setup.flow_tol.rel_tol = cfg.get_double("flow.rel_tol", 1e-10);
  setup.flow_tol.abs_tol = cfg.get_double("flow.abs_tol", 1e-14);
  setup.diagnostics.moment_pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}, {2, 0}};

  setup.grid.nv = cfg.get_u64("grid.nv", 64);
  setup.grid.ne = cfg.get_u64("grid.ne", 32);
  setup.grid.v_min = cfg.get_double("grid.v_min", 0.5);
  setup.grid.v_max = cfg.get_double("grid.v_max", 1000.0);
  setup.grid.e_first = cfg.get_double("grid.e_first", 0.05);
  setup.grid.e_max = cfg.get_double("grid.e_max", 64.0);

  setup.sectional.lambda = setup.sim.lambda;
  setup.sectional.t_end = setup.sim.t_end;
  setup.sectional.record_interval = setup.sim.record_interval;
  setup.sectional.dt_max = cfg.get_double("sect.dt_max", 0.02);

  setup.smolu.t_end = setup.sim.t_end;
  setup.smolu.record_interval = setup.sim.record_interval;
  setup.smolu.dt_max = cfg.get_double("smolu.dt_max", 0.01);
  setup.smolu_bins = cfg.get_u64("smolu.bins", 256);

  setup.study_lambdas = cfg.get_double_list("study.lambdas", setup.study_lambdas);
  if (setup.study_lambdas.empty()) {
    throw std::invalid_argument("config: study.lambdas must be nonempty");
  }
  setup.replicas = cfg.get_u64("study.replicas", 8);
  if (setup.replicas < 1) {
    throw std::invalid_argument("config: study.replicas must be >= 1");
  }
  setup.study_delta1 = cfg.get_double("study.delta1", 0.1);
  setup.study_epsilon = cfg.get_double("study.epsilon", 0.1);
  setup.conc_threshold = cfg.get_double("study.conc_threshold", 0.05);
  setup.emit_snapshots = cfg.get_bool("out.snapshots", false);

  setup.sim.validate();
  cfg.ensure_consumed();
  setup.config_text = cfg.canonical_text();
  setup.config_hash = cfg.hash_hex();
  return setup;
}

}  // namespace coagfuse
