#include "interplab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "interplab/csv.hpp"

namespace interplab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

bool parse_number(const std::string& tok, double& out_d, std::int64_t& out_i, bool& is_int) {
  const std::string t = trim(tok);
  if (t.empty()) return false;
  char* end = nullptr;
  const long long as_ll = std::strtoll(t.c_str(), &end, 10);
  if (end && *end == '\0' && t.find('.') == std::string::npos &&
      t.find('e') == std::string::npos && t.find('E') == std::string::npos) {
    out_i = as_ll;
    is_int = true;
    return true;
  }
  end = nullptr;
  const double as_d = std::strtod(t.c_str(), &end);
  if (end && *end == '\0') {
    out_d = as_d;
    is_int = false;
    return true;
  }
  return false;
}

ConfigValue parse_value(const std::string& raw, std::size_t line) {
  const std::string t = trim(raw);
  if (t.empty()) fail(line, "empty value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') fail(line, "unterminated string");
    return ConfigValue{t.substr(1, t.size() - 2)};
  }
  if (t == "true") return ConfigValue{true};
  if (t == "false") return ConfigValue{false};
  if (t.front() == '[') {
    if (t.back() != ']') fail(line, "unterminated array");
    const std::string inner = t.substr(1, t.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    for (char c : inner) {
      if (c == ',') {
        items.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) items.push_back(trim(cur));
    if (!items.empty() && items.front().size() && items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& it : items) {
        if (it.size() < 2 || it.front() != '"' || it.back() != '"')
          fail(line, "bad string array element: " + it);
        out.push_back(it.substr(1, it.size() - 2));
      }
      return ConfigValue{out};
    }
    std::vector<double> out;
    for (const auto& it : items) {
      double d = 0;
      std::int64_t i = 0;
      bool is_int = false;
      if (!parse_number(it, d, i, is_int)) fail(line, "bad numeric array element: " + it);
      out.push_back(is_int ? static_cast<double>(i) : d);
    }
    return ConfigValue{out};
  }
  double d = 0;
  std::int64_t i = 0;
  bool is_int = false;
  if (!parse_number(t, d, i, is_int)) fail(line, "cannot parse value: " + t);
  if (is_int) return ConfigValue{i};
  return ConfigValue{d};
}

std::string value_to_text(const ConfigValue& v) {
  struct Visitor {
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& x) const { return "\"" + x + "\""; }
    std::string operator()(const std::vector<double>& x) const {
      std::string out = "[";
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += format_double(x[i]);
      }
      return out + "]";
    }
    std::string operator()(const std::vector<std::string>& x) const {
      std::string out = "[";
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + x[i] + "\"";
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v.v);
}

}  // namespace

ConfigMap ConfigMap::parse_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(lineno, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) fail(lineno, "empty section name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) fail(lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    map.values_[full] = parse_value(t.substr(eq + 1), lineno);
  }
  return map;
}

ConfigMap ConfigMap::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("json config: ") + e.what());
  }
  ConfigMap map;
  std::function<void(const nlohmann::json&, const std::string&)> walk =
      [&](const nlohmann::json& node, const std::string& prefix) {
        for (auto it = node.begin(); it != node.end(); ++it) {
          const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
          const auto& val = it.value();
          if (val.is_object()) {
            walk(val, key);
          } else if (val.is_boolean()) {
            map.values_[key] = ConfigValue{val.get<bool>()};
          } else if (val.is_number_integer()) {
            map.values_[key] = ConfigValue{val.get<std::int64_t>()};
          } else if (val.is_number()) {
            map.values_[key] = ConfigValue{val.get<double>()};
          } else if (val.is_string()) {
            map.values_[key] = ConfigValue{val.get<std::string>()};
          } else if (val.is_array()) {
            if (!val.empty() && val.front().is_string()) {
              map.values_[key] = ConfigValue{val.get<std::vector<std::string>>()};
            } else {
              map.values_[key] = ConfigValue{val.get<std::vector<double>>()};
            }
          } else {
            throw ConfigError("json config: unsupported value at " + key);
          }
        }
      };
  walk(j, "");
  return map;
}

ConfigMap ConfigMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") return parse_json(text);
  return parse_text(text);
}

std::string ConfigMap::to_text() const {
  // Group dotted keys into sections; plain keys first.
  std::string out;
  std::map<std::string, std::vector<std::pair<std::string, const ConfigValue*>>> sections;
  for (const auto& [key, val] : values_) {
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos) {
      out += key + " = " + value_to_text(val) + "\n";
    } else {
      sections[key.substr(0, dot)].push_back({key.substr(dot + 1), &val});
    }
  }
  for (const auto& [sec, entries] : sections) {
    out += "\n[" + sec + "]\n";
    for (const auto& [key, val] : entries) out += key + " = " + value_to_text(*val) + "\n";
  }
  return out;
}

void ConfigMap::set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (const auto* p = std::get_if<std::int64_t>(&it->second.v)) return *p;
  if (const auto* p = std::get_if<double>(&it->second.v)) {
    if (std::floor(*p) == *p) return static_cast<std::int64_t>(*p);
  }
  throw ConfigError("field '" + key + "' must be an integer");
}

double ConfigMap::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (const auto* p = std::get_if<double>(&it->second.v)) return *p;
  if (const auto* p = std::get_if<std::int64_t>(&it->second.v)) return static_cast<double>(*p);
  throw ConfigError("field '" + key + "' must be a number");
}

bool ConfigMap::get_bool(const std::string& key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (const auto* p = std::get_if<bool>(&it->second.v)) return *p;
  throw ConfigError("field '" + key + "' must be a boolean");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (const auto* p = std::get_if<std::string>(&it->second.v)) return *p;
  throw ConfigError("field '" + key + "' must be a string");
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (const auto* p = std::get_if<std::vector<double>>(&it->second.v)) return *p;
  if (const auto* p = std::get_if<double>(&it->second.v)) return {*p};
  if (const auto* p = std::get_if<std::int64_t>(&it->second.v))
    return {static_cast<double>(*p)};
  throw ConfigError("field '" + key + "' must be a numeric array");
}

std::vector<std::string> ConfigMap::get_string_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (const auto* p = std::get_if<std::vector<std::string>>(&it->second.v)) return *p;
  if (const auto* p = std::get_if<std::string>(&it->second.v)) return {*p};
  throw ConfigError("field '" + key + "' must be a string array");
}

bool ConfigMap::operator==(const ConfigMap& o) const {
  if (values_.size() != o.values_.size()) return false;
  for (const auto& [key, val] : values_) {
    auto it = o.values_.find(key);
    if (it == o.values_.end()) return false;
    if (!(it->second.v == val.v)) return false;
  }
  return true;
}

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::figure1: return "figure1";
    case ExperimentKind::junk_features: return "junk_features";
    case ExperimentKind::isotropic_bp: return "isotropic_bp";
    case ExperimentKind::bound_check: return "bound_check";
    case ExperimentKind::cgmt_check: return "cgmt_check";
    case ExperimentKind::ranks: return "ranks";
    default: return "split_scan";
  }
}

ExperimentKind parse_experiment(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::figure1, ExperimentKind::junk_features, ExperimentKind::isotropic_bp,
        ExperimentKind::bound_check, ExperimentKind::cgmt_check, ExperimentKind::ranks,
        ExperimentKind::split_scan}) {
    if (s == experiment_name(k)) return k;
  }
  throw ConfigError("field 'experiment': unknown tag '" + s + "'");
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
  ExperimentConfig cfg;
  cfg.experiment = parse_experiment(map.get_string("experiment", "figure1"));
  cfg.trials = map.get_int("trials", cfg.trials);
  cfg.delta = map.get_double("delta", cfg.delta);
  cfg.master_seed = static_cast<std::uint64_t>(map.get_int("master_seed", 1));
  cfg.norm = parse_norm(map.get_string("norm", "l2"));
  const std::string var = map.get_string("variant", "appendix_sharp");
  if (var == "theorem") cfg.variant = BoundVariant::theorem;
  else if (var == "appendix_sharp") cfg.variant = BoundVariant::appendix_sharp;
  else throw ConfigError("field 'variant': expected theorem|appendix_sharp, got '" + var + "'");
  cfg.out_dir = map.get_string("out_dir", cfg.out_dir);
  cfg.format = map.get_string("format", cfg.format);
  cfg.threads = static_cast<int>(map.get_int("threads", cfg.threads));

  cfg.n = map.get_int("model.n", cfg.n);
  cfg.sigma_sq = map.get_double("model.sigma_sq", cfg.sigma_sq);
  for (double d : map.get_double_list("model.d_grid")) cfg.d_grid.push_back(static_cast<Index>(d));

  cfg.cov.kind = map.get_string("covariance.kind", cfg.cov.kind);
  cfg.cov.lambda = map.get_double("covariance.lambda", cfg.cov.lambda);
  cfg.cov.spike = map.get_double("covariance.spike", cfg.cov.spike);
  cfg.cov.tail_coeff = map.get_double("covariance.tail_coeff", cfg.cov.tail_coeff);
  cfg.cov.signal_var = map.get_double("covariance.signal_var", cfg.cov.signal_var);

  cfg.w_star.kind = map.get_string("w_star.kind", cfg.w_star.kind);
  cfg.w_star.value = map.get_double("w_star.value", cfg.w_star.value);
  cfg.w_star.k = map.get_int("w_star.k", cfg.w_star.k);

  cfg.mc_samples = map.get_int("mc.samples", cfg.mc_samples);
  cfg.draws = map.get_int("cgmt.draws", cfg.draws);
  cfg.b_scale = map.get_double("cgmt.b_scale", cfg.b_scale);
  cfg.t_grid_points = static_cast<int>(map.get_int("cgmt.t_grid_points", cfg.t_grid_points));
  cfg.bound_family = map.get_string("split.bound_family", cfg.bound_family);
  cfg.b_radius = map.get_double("split.b_radius", cfg.b_radius);
  cfg.split_k = map.get_int("split.k", cfg.split_k);
  cfg.restarts = static_cast<int>(map.get_int("restarts", cfg.restarts));
  cfg.validate();
  return cfg;
}

ConfigMap ExperimentConfig::to_map() const {
  ConfigMap map;
  map.set("experiment", ConfigValue{std::string(experiment_name(experiment))});
  map.set("trials", ConfigValue{static_cast<std::int64_t>(trials)});
  map.set("delta", ConfigValue{delta});
  map.set("master_seed", ConfigValue{static_cast<std::int64_t>(master_seed)});
  map.set("norm", ConfigValue{std::string(norm_name(norm))});
  map.set("variant", ConfigValue{std::string(variant_name(variant))});
  map.set("out_dir", ConfigValue{out_dir});
  map.set("format", ConfigValue{format});
  map.set("threads", ConfigValue{static_cast<std::int64_t>(threads)});
  map.set("model.n", ConfigValue{static_cast<std::int64_t>(n)});
  map.set("model.sigma_sq", ConfigValue{sigma_sq});
  std::vector<double> grid;
  for (Index d : d_grid) grid.push_back(static_cast<double>(d));
  map.set("model.d_grid", ConfigValue{grid});
  map.set("covariance.kind", ConfigValue{cov.kind});
  map.set("covariance.lambda", ConfigValue{cov.lambda});
  map.set("covariance.spike", ConfigValue{cov.spike});
  map.set("covariance.tail_coeff", ConfigValue{cov.tail_coeff});
  map.set("covariance.signal_var", ConfigValue{cov.signal_var});
  map.set("w_star.kind", ConfigValue{w_star.kind});
  map.set("w_star.value", ConfigValue{w_star.value});
  map.set("w_star.k", ConfigValue{static_cast<std::int64_t>(w_star.k)});
  map.set("mc.samples", ConfigValue{static_cast<std::int64_t>(mc_samples)});
  map.set("cgmt.draws", ConfigValue{static_cast<std::int64_t>(draws)});
  map.set("cgmt.b_scale", ConfigValue{b_scale});
  map.set("cgmt.t_grid_points", ConfigValue{static_cast<std::int64_t>(t_grid_points)});
  map.set("split.bound_family", ConfigValue{bound_family});
  map.set("split.b_radius", ConfigValue{b_radius});
  map.set("split.k", ConfigValue{static_cast<std::int64_t>(split_k)});
  map.set("restarts", ConfigValue{static_cast<std::int64_t>(restarts)});
  return map;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_map(ConfigMap::load_file(path));
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("field 'trials' must be >= 1");
  if (n < 1) throw ConfigError("field 'model.n' must be >= 1");
  if (sigma_sq < 0.0) throw ConfigError("field 'model.sigma_sq' must be >= 0");
  if (d_grid.empty()) throw ConfigError("field 'model.d_grid' must be non-empty");
  for (Index d : d_grid) {
    if (d < 1) throw ConfigError("field 'model.d_grid' entries must be >= 1");
  }
  if (format != "csv" && format != "json")
    throw ConfigError("field 'format' must be csv or json");
  const bool uses_bounds = experiment == ExperimentKind::bound_check ||
                           experiment == ExperimentKind::split_scan ||
                           experiment == ExperimentKind::junk_features ||
                           experiment == ExperimentKind::isotropic_bp;
  if (uses_bounds && (delta <= 0.0 || delta > 0.25)) {
    throw ConfigError(
        "field 'delta': bound evaluations require 0 < delta <= 1/4 (the uniform "
        "convergence statements fix delta <= 1/4)");
  }
  if (experiment == ExperimentKind::cgmt_check && draws < 500)
    throw ConfigError("field 'cgmt.draws' must be >= 500");
  if (mc_samples < 100) throw ConfigError("field 'mc.samples' must be >= 100");
}

CovarianceModel make_covariance(const ExperimentConfig& cfg, Index d) {
  const CovarianceSpecCfg& c = cfg.cov;
  if (c.kind == "identity") {
    return CovarianceModel::identity(d);
  }
  if (c.kind == "figure1") {
    VectorXd eigs(d);
    eigs[0] = 1.0;
    const double tail = c.lambda * c.lambda;
    for (Index i = 1; i < d; ++i) eigs[i] = tail;
    if (tail > 1.0) std::sort(eigs.data(), eigs.data() + d, std::greater<double>());
    return CovarianceModel::diagonal(std::move(eigs));
  }
  if (c.kind == "spiked") {
    VectorXd eigs(d);
    eigs[0] = c.spike;
    const double tail = c.tail_coeff / static_cast<double>(cfg.n);
    for (Index i = 1; i < d; ++i) eigs[i] = tail;
    if (tail > c.spike) std::sort(eigs.data(), eigs.data() + d, std::greater<double>());
    return CovarianceModel::diagonal(std::move(eigs));
  }
  if (c.kind == "junk") {
    // d junk coordinates at lambda_n / log(d) plus one signal coordinate.
    if (d < 2) throw ConfigError("junk covariance needs d >= 2");
    const double junk = c.lambda / std::log(static_cast<double>(d));
    VectorXd eigs(d + 1);
    eigs[0] = c.signal_var;
    for (Index i = 1; i <= d; ++i) eigs[i] = junk;
    if (junk > c.signal_var) std::sort(eigs.data(), eigs.data() + d + 1, std::greater<double>());
    return CovarianceModel::diagonal(std::move(eigs));
  }
  throw ConfigError("field 'covariance.kind': unknown kind '" + c.kind + "'");
}

VectorXd make_w_star(const WStarSpecCfg& spec, Index d) {
  VectorXd w = VectorXd::Zero(d);
  if (spec.kind == "zero") return w;
  if (spec.kind == "e1_scaled") {
    w[0] = spec.value;
    return w;
  }
  if (spec.kind == "first_k") {
    const Index k = std::min<Index>(spec.k, d);
    for (Index i = 0; i < k; ++i) w[i] = spec.value;
    return w;
  }
  throw ConfigError("field 'w_star.kind': unknown kind '" + spec.kind + "'");
}

ProblemSpec make_problem_spec(const ExperimentConfig& cfg, Index d) {
  CovarianceModel cov = make_covariance(cfg, d);
  const Index dim = cov.dim();
  return ProblemSpec(std::move(cov), make_w_star(cfg.w_star, dim), std::sqrt(cfg.sigma_sq),
                     cfg.n);
}

}  // namespace interplab
