#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "interplab/bounds.hpp"
#include "interplab/common.hpp"

namespace interplab {

// Flat key/value store with dotted keys ("model.n"). The text format is
// key = value lines with [section] tables; JSON files are accepted as an
// alternative and flattened the same way.
struct ConfigValue {
  std::variant<std::int64_t, double, bool, std::string, std::vector<double>,
               std::vector<std::string>>
      v;
};

class ConfigMap {
 public:
  static ConfigMap parse_text(const std::string& text);
  static ConfigMap parse_json(const std::string& text);
  static ConfigMap load_file(const std::string& path);  // dispatch on extension/content
  std::string to_text() const;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, ConfigValue v);

  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  double get_double(const std::string& key, double def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  const std::map<std::string, ConfigValue>& values() const { return values_; }
  bool operator==(const ConfigMap& o) const;

 private:
  std::map<std::string, ConfigValue> values_;
};

enum class ExperimentKind {
  figure1,
  junk_features,
  isotropic_bp,
  bound_check,
  cgmt_check,
  ranks,
  split_scan
};

const char* experiment_name(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

struct CovarianceSpecCfg {
  std::string kind = "identity";  // identity | figure1 | spiked | junk
  double lambda = 1.0;            // figure1 junk-coordinate scale / junk lambda_n
  double spike = 1.0;             // spiked leading eigenvalue
  double tail_coeff = 5.0;        // spiked tail eigenvalue = tail_coeff / n
  double signal_var = 1.0;        // junk signal block variance
};

struct WStarSpecCfg {
  std::string kind = "zero";  // zero | e1_scaled | first_k
  double value = 0.0;
  std::int64_t k = 1;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::figure1;
  long trials = 100;
  double delta = 0.1;
  std::uint64_t master_seed = 1;
  Norm norm = Norm::L2;
  BoundVariant variant = BoundVariant::appendix_sharp;
  std::string out_dir = "out";
  std::string format = "csv";  // csv | json
  int threads = 0;             // 0: LAB_THREADS or hardware count

  Index n = 100;
  double sigma_sq = 0.5;
  std::vector<Index> d_grid;

  CovarianceSpecCfg cov;
  WStarSpecCfg w_star;

  long mc_samples = 20000;
  long draws = 2000;       // cgmt draws
  double b_scale = 1.5;    // cgmt gap ball radius as a multiple of typical min norm
  int t_grid_points = 20;
  std::string bound_family = "euclid_risk";
  double b_radius = 1.0;   // split_scan fixed B
  std::int64_t split_k = 1;
  int restarts = 8;

  static ExperimentConfig from_map(const ConfigMap& map);
  ConfigMap to_map() const;
  static ExperimentConfig load(const std::string& path);
  void validate() const;  // module preconditions, with field diagnostics
};

// Builds the model objects for a grid point.
CovarianceModel make_covariance(const ExperimentConfig& cfg, Index d);
VectorXd make_w_star(const WStarSpecCfg& spec, Index d);
ProblemSpec make_problem_spec(const ExperimentConfig& cfg, Index d);

}  // namespace interplab
