#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsunsal/classifier.hpp"
#include "wsunsal/metrics.hpp"

namespace wsun {

// Everything a trial needs, loadable from a key = value manifest with CLI
// overrides on top. See config_set for the key list.
struct PipelineConfig {
  std::string cube_path;
  std::string cube_header_path;
  std::string labels_path;
  std::string labels_header_path;  // empty = text label grid
  std::string output_dir;

  double fraction = 0.1;
  uint64_t seed = 1;
  int trials = 1;

  KernelSpec kernel;
  WeightMode weight_mode = WeightMode::euclidean;
  SolverConfig solver;
  PostprocessConfig post;

  std::vector<int> band_removal;  // 1-indexed
  bool normalize = false;
  int prefilter_window = 0;       // 0 disables the mean pre-filter
  int threads = 0;                // 0 = hardware concurrency
  bool dump_residuals = false;

  // sweep grids (sweep command only); empty lambda grid = use solver.lambda
  std::vector<double> sweep_lambda;
  std::vector<int> sweep_window;
  std::vector<int> sweep_neighbors;
  std::string residual_checkpoint;  // reuse an existing dump instead of unmixing

  void validate() const;  // referenced files must exist; ranges checked
};

PipelineConfig load_config_file(const std::string& path);
// Applies one key=value setting; unknown keys throw InvalidConfig.
void config_set(PipelineConfig& cfg, const std::string& key, const std::string& value);
// Path overrides from WSUNSAL_CUBE / WSUNSAL_CUBE_HEADER / WSUNSAL_LABELS /
// WSUNSAL_LABELS_HEADER / WSUNSAL_OUTPUT when set.
void apply_env_path_overrides(PipelineConfig& cfg);

// Cube after band removal / prefilter / normalization, plus labels.
struct PreparedScene {
  HsiCube cube;
  LabelMap labels;
};

PreparedScene prepare_scene(const PipelineConfig& cfg);

struct TrialResult {
  MetricsReport raw_report;
  MetricsReport post_report;
  ClassMap raw_map;
  ClassMap post_map;
  SplitResult split;
  SceneStats stats;
};

// Full pipeline with seed = cfg.seed + trial_index: split, dictionary,
// unmix, raw argmin, spatial postprocess, metrics on the test pixels.
TrialResult run_trial(const PipelineConfig& cfg, int trial_index, const PreparedScene& scene);
// Convenience overload that loads the scene itself.
TrialResult run_trial(const PipelineConfig& cfg, int trial_index);

struct ExperimentResult {
  TrialAggregate raw;
  TrialAggregate post;
  std::vector<MetricsReport> raw_trials;
  std::vector<MetricsReport> post_trials;
};

// Runs cfg.trials trials sequentially, aggregates both metric streams, and
// writes reports plus the last trial's artifacts to cfg.output_dir.
ExperimentResult run_experiment(const PipelineConfig& cfg);

// Writes the artifacts of a single trial (classify command).
void write_trial_outputs(const PipelineConfig& cfg, const PreparedScene& scene,
                         const TrialResult& trial);

// Metrics for a saved class map, restricted to the split's test pixels when
// a split file is given, otherwise over all labeled pixels.
MetricsReport evaluate_class_map(const std::string& classmap_path, const std::string& labels_path,
                                 const std::string& split_path = {});

struct SweepRow {
  double lambda = 0.0;
  int window = 0;
  int neighbors = 0;
  MetricsReport raw_report;
  MetricsReport post_report;
};

// Grid over (lambda, window, neighbors) on trial 0's split. The residual
// field is computed once per lambda and reused across the (window, neighbors)
// grid; a residual_checkpoint can replace the unmix stage but only for a
// single-lambda grid, since a lambda change invalidates the checkpoint.
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Planted-block synthetic scene: `classes` vertically striped block classes
// with smooth distinct mean spectra plus i.i.d. Gaussian noise. Every pixel
// is labeled. Used by the demo generator and the test suites.
struct SyntheticScene {
  HsiCube cube;
  LabelMap labels;
  std::vector<std::vector<double>> class_means;
};

SyntheticScene make_synthetic_scene(int height, int width, int bands, int classes,
                                    double noise_sigma, uint64_t seed);

}  // namespace wsun
