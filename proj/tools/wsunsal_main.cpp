// Command-line front end. Everything goes through the C API in wsunsal.h so
// this binary doubles as a usage example for language bindings.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsunsal.h"

namespace {

struct ConfigDeleter {
  void operator()(wsun_config* cfg) const { wsun_config_destroy(cfg); }
};
using ConfigPtr = std::unique_ptr<wsun_config, ConfigDeleter>;

int fail(wsun_status status, const char* stage) {
  std::fprintf(stderr, "error: %s: %s: %s\n", stage, wsun_status_name(status), wsun_last_error());
  return 1;
}

void print_metrics(const char* label, const wsun_metrics& m) {
  std::printf("%-16s OA %6.2f%%   AA %6.2f%%   kappa %.4f\n", label,
              100.0 * m.overall_accuracy, 100.0 * m.average_accuracy, m.kappa);
}

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;  // key=value overrides, applied after the file
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_file, "key = value manifest file");
  cmd->add_option("-s,--set", opts.sets, "override a config key, e.g. --set lambda=1e-3")
      ->take_all();
}

// convenience flags mapped onto config keys
void add_key_flag(CLI::App* cmd, CommonOptions& opts, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
         flag, [&opts, key](const std::string& v) { opts.sets.push_back(key + "=" + v); }, help);
}

int build_config(const CommonOptions& opts, ConfigPtr& out) {
  wsun_config* raw = nullptr;
  if (wsun_status s = wsun_config_create(&raw); s != WSUN_OK) return fail(s, "config");
  out.reset(raw);
  if (!opts.config_file.empty()) {
    if (wsun_status s = wsun_config_load_file(out.get(), opts.config_file.c_str()); s != WSUN_OK) {
      return fail(s, "config file");
    }
  }
  if (wsun_status s = wsun_config_apply_env(out.get()); s != WSUN_OK) return fail(s, "env");
  for (const std::string& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    if (wsun_status s = wsun_config_set(out.get(), kv.substr(0, eq).c_str(),
                                        kv.substr(eq + 1).c_str());
        s != WSUN_OK) {
      return fail(s, "config override");
    }
  }
  if (wsun_status s = wsun_config_validate(out.get()); s != WSUN_OK) return fail(s, "validate");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptively weighted L1-norm sparse-unmixing classifier for hyperspectral scenes"};
  app.require_subcommand(1);

  CommonOptions classify_opts, trials_opts, sweep_opts;

  auto add_pipeline_flags = [](CLI::App* cmd, CommonOptions& opts) {
    for (const auto& [flag, key, help] :
         std::vector<std::tuple<std::string, std::string, std::string>>{
             {"--cube", "cube", "raw cube file"},
             {"--cube-header", "cube_header", "cube sidecar header"},
             {"--labels", "labels", "label grid"},
             {"--output", "output_dir", "output directory"},
             {"--kernel", "kernel", "linear|rbf"},
             {"--sigma", "sigma", "rbf width"},
             {"--weights", "weights", "identity|euclidean|kernel-angle"},
             {"--lambda", "lambda", "L1 weight"},
             {"--window", "window", "postprocess window N"},
             {"--neighbors", "neighbors", "postprocess neighbor count M"},
             {"--fraction", "fraction", "training fraction per class"},
             {"--seed", "seed", "base RNG seed"},
         }) {
      add_key_flag(cmd, opts, flag, key, help);
    }
  };

  CLI::App* classify = app.add_subcommand("classify", "run one trial and write full outputs");
  add_common(classify, classify_opts);
  add_pipeline_flags(classify, classify_opts);

  CLI::App* trials = app.add_subcommand("trials", "multi-trial experiment with aggregation");
  add_common(trials, trials_opts);
  add_pipeline_flags(trials, trials_opts);
  add_key_flag(trials, trials_opts, "--trials", "trials", "number of random trials");

  CLI::App* evaluate = app.add_subcommand("evaluate", "metrics from a saved class map + labels");
  std::string eval_classmap, eval_labels, eval_split, eval_json;
  evaluate->add_option("--classmap", eval_classmap, "class map PGM")->required();
  evaluate->add_option("--labels", eval_labels, "label grid")->required();
  evaluate->add_option("--split", eval_split, "restrict to this split file's test pixels");
  evaluate->add_option("--json-out", eval_json, "write the report as JSON here");

  CLI::App* sweep = app.add_subcommand("sweep", "grid over lambda, window, neighbors");
  add_common(sweep, sweep_opts);
  add_pipeline_flags(sweep, sweep_opts);
  add_key_flag(sweep, sweep_opts, "--sweep-lambda", "sweep_lambda", "comma list of lambdas");
  add_key_flag(sweep, sweep_opts, "--sweep-window", "sweep_window", "comma list of windows");
  add_key_flag(sweep, sweep_opts, "--sweep-neighbors", "sweep_neighbors",
               "comma list of neighbor counts");
  add_key_flag(sweep, sweep_opts, "--residuals", "residual_checkpoint",
               "reuse a residual-field checkpoint instead of unmixing");

  CLI11_PARSE(app, argc, argv);

  if (classify->parsed()) {
    ConfigPtr cfg;
    if (int rc = build_config(classify_opts, cfg); rc != 0) return rc;
    wsun_trial_metrics m{};
    if (wsun_status s = wsun_run_trial(cfg.get(), 0, 1, &m); s != WSUN_OK) {
      return fail(s, "classify");
    }
    print_metrics("unmixing only", m.raw);
    print_metrics("postprocessed", m.post);
    if (m.degenerate_weight_pixels > 0) {
      std::fprintf(stderr, "warning: %lld pixel(s) had all-zero dictionary distances\n",
                   m.degenerate_weight_pixels);
    }
    if (m.zero_norm_neighbors_skipped > 0) {
      std::fprintf(stderr, "warning: %lld zero-norm neighbor(s) skipped\n",
                   m.zero_norm_neighbors_skipped);
    }
    return 0;
  }

  if (trials->parsed()) {
    ConfigPtr cfg;
    if (int rc = build_config(trials_opts, cfg); rc != 0) return rc;
    wsun_experiment_metrics m{};
    if (wsun_status s = wsun_run_experiment(cfg.get(), &m); s != WSUN_OK) {
      return fail(s, "trials");
    }
    std::printf("trials: %d\n", m.trials);
    print_metrics("unmixing only", m.raw_mean);
    std::printf("%-16s OA std %.2f%%\n", "", 100.0 * m.raw_oa_std);
    print_metrics("postprocessed", m.post_mean);
    std::printf("%-16s OA std %.2f%%\n", "", 100.0 * m.post_oa_std);
    return 0;
  }

  if (evaluate->parsed()) {
    wsun_metrics m{};
    if (wsun_status s = wsun_evaluate(eval_classmap.c_str(), eval_labels.c_str(),
                                      eval_split.empty() ? nullptr : eval_split.c_str(),
                                      eval_json.empty() ? nullptr : eval_json.c_str(), &m);
        s != WSUN_OK) {
      return fail(s, "evaluate");
    }
    print_metrics("evaluated map", m);
    return 0;
  }

  if (sweep->parsed()) {
    ConfigPtr cfg;
    if (int rc = build_config(sweep_opts, cfg); rc != 0) return rc;
    if (wsun_status s = wsun_sweep(cfg.get()); s != WSUN_OK) return fail(s, "sweep");
    std::printf("sweep.csv written\n");
    return 0;
  }

  return 0;
}
