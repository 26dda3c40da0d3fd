// Experiment runner: reproduces the interpolation-learning figures, bound
// coverage sweeps, effective-rank tables, and Gaussian-comparison tail checks
// from declarative configs.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "interplab/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (key=value or JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--format", args.format, "csv|json (overrides config)");
  cmd->add_option("--seed", args.seed, "master seed (overrides config)")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "worker threads (overrides config and LAB_THREADS)");
}

int run(const CommonArgs& args, interplab::ExperimentKind kind) {
  interplab::ExperimentConfig cfg;
  try {
    cfg = interplab::ExperimentConfig::load(args.config_path);
  } catch (const interplab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (cfg.experiment != kind) {
    std::fprintf(stderr, "config error: field 'experiment' is '%s' but the subcommand expects '%s'\n",
                 interplab::experiment_name(cfg.experiment), interplab::experiment_name(kind));
    return kExitConfig;
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.format.empty()) cfg.format = args.format;
  if (args.seed_set) cfg.master_seed = args.seed;
  if (args.threads >= 0) cfg.threads = args.threads;
  try {
    cfg.validate();
  } catch (const interplab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  try {
    const auto files = interplab::run_and_write(cfg);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  } catch (const interplab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const interplab::LabError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interplab: min-norm interpolation and uniform-convergence bound laboratory"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    interplab::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"figure1", "double-descent landmark run (loss/bound/null/bayes vs d)",
       interplab::ExperimentKind::figure1},
      {"junk", "basis pursuit consistency trend on junk features",
       interplab::ExperimentKind::junk_features},
      {"iso-bp", "basis pursuit against the null risk on isotropic features",
       interplab::ExperimentKind::isotropic_bp},
      {"bound-check", "coverage of the uniform-convergence bound over trials",
       interplab::ExperimentKind::bound_check},
      {"cgmt-check", "PO/AO tail comparison inequalities",
       interplab::ExperimentKind::cgmt_check},
      {"ranks", "effective rank tables over a dimension grid", interplab::ExperimentKind::ranks},
      {"split-scan", "bound value across all top-k covariance splits",
       interplab::ExperimentKind::split_scan},
  };

  std::vector<std::pair<CommonArgs, interplab::ExperimentKind>> cmds(std::size(subs));
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    cmds[i].second = subs[i].kind;
    add_common(cmd, cmds[i].first);
    cmd->callback([&cmds, i]() {
      std::exit(run(cmds[i].first, cmds[i].second));
    });
  }

  CLI11_PARSE(app, argc, argv);
  return kExitOk;
}
