#include "wsunsal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wsunsal/rng.hpp"

namespace wsun {
namespace {

namespace fs = std::filesystem;

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw Error(ErrorCode::invalid_config, "bad numeric value '" + value + "' for " + key);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw Error(ErrorCode::invalid_config, "bad integer value '" + value + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error(ErrorCode::invalid_config, "bad boolean value '" + value + "' for " + key);
}

// "104-108,150-163,220" -> expanded 1-indexed band list
std::vector<int> parse_band_list(const std::string& value) {
  std::vector<int> bands;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);  // allow leading minus to fail as int parse
    if (dash == std::string::npos) {
      bands.push_back(static_cast<int>(parse_int("band_removal", item)));
    } else {
      const int lo = static_cast<int>(parse_int("band_removal", item.substr(0, dash)));
      const int hi = static_cast<int>(parse_int("band_removal", item.substr(dash + 1)));
      if (hi < lo) throw Error(ErrorCode::invalid_config, "bad band range '" + item + "'");
      for (int b = lo; b <= hi; ++b) bands.push_back(b);
    }
  }
  return bands;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (!item.empty()) out.push_back(static_cast<int>(parse_int(key, item)));
  }
  return out;
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::invalid_config, what + " does not exist: " + path);
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "short write on " + path);
}

std::vector<PixelCoord> labeled_pixels(const LabelMap& labels) {
  std::vector<PixelCoord> out;
  for (int r = 0; r < labels.height; ++r) {
    for (int c = 0; c < labels.width; ++c) {
      if (labels.at(r, c) > 0) out.push_back({r, c});
    }
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (cube_path.empty() || cube_header_path.empty() || labels_path.empty()) {
    throw Error(ErrorCode::invalid_config, "cube, cube_header and labels paths are required");
  }
  require_file(cube_path, "cube file");
  require_file(cube_header_path, "cube header");
  require_file(labels_path, "labels file");
  if (!labels_header_path.empty()) require_file(labels_header_path, "labels header");
  if (!residual_checkpoint.empty()) require_file(residual_checkpoint, "residual checkpoint");
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorCode::invalid_config, "fraction must be in (0, 1]");
  }
  if (trials < 1) throw Error(ErrorCode::invalid_config, "trials must be >= 1");
  if (prefilter_window != 0 && (prefilter_window < 1 || prefilter_window % 2 == 0)) {
    throw Error(ErrorCode::invalid_config, "prefilter_window must be odd (or 0 to disable)");
  }
  if (threads < 0) throw Error(ErrorCode::invalid_config, "threads must be >= 0");
  kernel.validate();
  solver.validate();
  post.validate();
  for (int w : sweep_window) {
    if (w < 1 || w % 2 == 0) throw Error(ErrorCode::invalid_config, "sweep windows must be odd");
  }
  for (int m : sweep_neighbors) {
    if (m < 1) throw Error(ErrorCode::invalid_config, "sweep neighbor counts must be >= 1");
  }
  for (double l : sweep_lambda) {
    if (l < 0.0) throw Error(ErrorCode::invalid_config, "sweep lambdas must be >= 0");
  }
  if (!residual_checkpoint.empty() && sweep_lambda.size() > 1) {
    throw Error(ErrorCode::invalid_config,
                "a residual checkpoint only serves one lambda; drop the checkpoint or the sweep");
  }
}

void config_set(PipelineConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trimmed(raw_key);
  const std::string value = trimmed(raw_value);
  if (key == "cube") cfg.cube_path = value;
  else if (key == "cube_header") cfg.cube_header_path = value;
  else if (key == "labels") cfg.labels_path = value;
  else if (key == "labels_header") cfg.labels_header_path = value;
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "fraction") cfg.fraction = parse_double(key, value);
  else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(key, value));
  else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
  else if (key == "kernel") {
    if (value == "linear") cfg.kernel.kind = KernelKind::linear;
    else if (value == "rbf") cfg.kernel.kind = KernelKind::rbf;
    else throw Error(ErrorCode::invalid_config, "kernel must be linear or rbf");
  } else if (key == "sigma") cfg.kernel.sigma = parse_double(key, value);
  else if (key == "weights") {
    if (value == "identity") cfg.weight_mode = WeightMode::identity;
    else if (value == "euclidean") cfg.weight_mode = WeightMode::euclidean;
    else if (value == "kernel-angle") cfg.weight_mode = WeightMode::kernel_angle;
    else throw Error(ErrorCode::invalid_config, "weights must be identity, euclidean or kernel-angle");
  } else if (key == "lambda") cfg.solver.lambda = parse_double(key, value);
  else if (key == "mu") cfg.solver.mu = parse_double(key, value);
  else if (key == "max_iter") cfg.solver.max_iter = static_cast<int>(parse_int(key, value));
  else if (key == "tol") cfg.solver.tol = parse_double(key, value);
  else if (key == "positivity") cfg.solver.positivity = parse_bool(key, value);
  else if (key == "window") cfg.post.window = static_cast<int>(parse_int(key, value));
  else if (key == "neighbors") cfg.post.neighbor_count = static_cast<int>(parse_int(key, value));
  else if (key == "neighbor_space") {
    if (value == "original") cfg.post.space = NeighborSpace::original;
    else if (value == "kernel") cfg.post.space = NeighborSpace::kernel;
    else throw Error(ErrorCode::invalid_config, "neighbor_space must be original or kernel");
  } else if (key == "band_removal") cfg.band_removal = parse_band_list(value);
  else if (key == "normalize") cfg.normalize = parse_bool(key, value);
  else if (key == "prefilter_window") cfg.prefilter_window = static_cast<int>(parse_int(key, value));
  else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "dump_residuals") cfg.dump_residuals = parse_bool(key, value);
  else if (key == "sweep_lambda") cfg.sweep_lambda = parse_double_list(key, value);
  else if (key == "sweep_window") cfg.sweep_window = parse_int_list(key, value);
  else if (key == "sweep_neighbors") cfg.sweep_neighbors = parse_int_list(key, value);
  else if (key == "residual_checkpoint") cfg.residual_checkpoint = value;
  else throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config: " + path);
  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trimmed(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::invalid_config,
                  path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    config_set(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

void apply_env_path_overrides(PipelineConfig& cfg) {
  if (const char* v = std::getenv("WSUNSAL_CUBE")) cfg.cube_path = v;
  if (const char* v = std::getenv("WSUNSAL_CUBE_HEADER")) cfg.cube_header_path = v;
  if (const char* v = std::getenv("WSUNSAL_LABELS")) cfg.labels_path = v;
  if (const char* v = std::getenv("WSUNSAL_LABELS_HEADER")) cfg.labels_header_path = v;
  if (const char* v = std::getenv("WSUNSAL_OUTPUT")) cfg.output_dir = v;
}

PreparedScene prepare_scene(const PipelineConfig& cfg) {
  cfg.validate();
  PreparedScene scene;
  scene.cube = load_cube(cfg.cube_path, cfg.cube_header_path);
  scene.labels = cfg.labels_header_path.empty()
                     ? load_labels(cfg.labels_path)
                     : load_labels_binary(cfg.labels_path, cfg.labels_header_path);
  if (scene.labels.height != scene.cube.height || scene.labels.width != scene.cube.width) {
    throw Error(ErrorCode::dimension_mismatch, "labels do not match cube dimensions");
  }
  if (!cfg.band_removal.empty()) scene.cube = remove_bands(scene.cube, cfg.band_removal);
  if (cfg.prefilter_window > 1) scene.cube = mean_prefilter(scene.cube, cfg.prefilter_window);
  if (cfg.normalize) scene.cube = normalize_unit_l2(scene.cube);
  return scene;
}

TrialResult run_trial(const PipelineConfig& cfg, int trial_index, const PreparedScene& scene) {
  TrialResult trial;
  trial.split = stratified_split(scene.labels, cfg.fraction, cfg.seed + static_cast<uint64_t>(trial_index));
  const Dictionary dict = build_dictionary(scene.cube, trial.split, scene.labels);

  const ResidualField field = unmix_scene(scene.cube, dict, cfg.kernel, cfg.weight_mode,
                                          cfg.solver, cfg.threads, &trial.stats);
  trial.raw_map = raw_classify(field);
  trial.post_map = spatial_postprocess(field, scene.cube, cfg.post, &cfg.kernel, cfg.threads,
                                       &trial.stats);

  trial.raw_report = compute_metrics(confusion(trial.raw_map, scene.labels, trial.split.test_pixels));
  trial.post_report =
      compute_metrics(confusion(trial.post_map, scene.labels, trial.split.test_pixels));

  if (cfg.dump_residuals && !cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_residual_field(field, (fs::path(cfg.output_dir) /
                                 ("residuals_trial" + std::to_string(trial_index) + ".bin"))
                                    .string());
  }
  return trial;
}

TrialResult run_trial(const PipelineConfig& cfg, int trial_index) {
  const PreparedScene scene = prepare_scene(cfg);
  return run_trial(cfg, trial_index, scene);
}

void write_trial_outputs(const PipelineConfig& cfg, const PreparedScene& scene,
                         const TrialResult& trial) {
  if (cfg.output_dir.empty()) return;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_class_map(trial.post_map, (dir / "classmap.pgm").string());
  write_class_map(trial.post_map, (dir / "classmap_masked.pgm").string(), &scene.labels);
  write_class_map(trial.raw_map, (dir / "classmap_raw.pgm").string());
  write_split(trial.split, (dir / "split.txt").string());
  write_text_file((dir / "report_raw.json").string(), report_to_json(trial.raw_report));
  write_text_file((dir / "report_post.json").string(), report_to_json(trial.post_report));
  write_text_file((dir / "report_raw.csv").string(), report_to_csv(trial.raw_report));
  write_text_file((dir / "report_post.csv").string(), report_to_csv(trial.post_report));
}

ExperimentResult run_experiment(const PipelineConfig& cfg) {
  const PreparedScene scene = prepare_scene(cfg);
  ExperimentResult result;
  result.raw_trials.reserve(static_cast<size_t>(cfg.trials));
  result.post_trials.reserve(static_cast<size_t>(cfg.trials));

  std::optional<TrialResult> last;
  for (int t = 0; t < cfg.trials; ++t) {
    TrialResult trial = run_trial(cfg, t, scene);
    result.raw_trials.push_back(trial.raw_report);
    result.post_trials.push_back(trial.post_report);
    last = std::move(trial);
  }
  result.raw = aggregate_trials(result.raw_trials);
  result.post = aggregate_trials(result.post_trials);

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    write_text_file((dir / "experiment.json").string(),
                    aggregate_to_json(result.raw, result.post, result.raw_trials,
                                      result.post_trials));
    write_text_file((dir / "report_raw.csv").string(), aggregate_to_csv(result.raw));
    write_text_file((dir / "report_post.csv").string(), aggregate_to_csv(result.post));
    write_class_map(last->post_map, (dir / "classmap.pgm").string());
    write_class_map(last->post_map, (dir / "classmap_masked.pgm").string(), &scene.labels);
    write_split(last->split, (dir / "split.txt").string());
  }
  return result;
}

MetricsReport evaluate_class_map(const std::string& classmap_path, const std::string& labels_path,
                                 const std::string& split_path) {
  const ClassMap pred = read_class_map(classmap_path);
  const LabelMap labels = load_labels(labels_path);
  if (pred.height != labels.height || pred.width != labels.width) {
    throw Error(ErrorCode::dimension_mismatch, "class map does not match labels dimensions");
  }
  std::vector<PixelCoord> pixels;
  if (split_path.empty()) {
    pixels = labeled_pixels(labels);
  } else {
    pixels = read_split(split_path).test_pixels;
  }
  for (const auto& p : pixels) {
    if (pred.at(p.row, p.col) == 0) {
      throw Error(ErrorCode::invalid_argument,
                  "class map has 0 at evaluated pixel (" + std::to_string(p.row) + "," +
                      std::to_string(p.col) + "); evaluate the unmasked map");
    }
  }
  return compute_metrics(confusion(pred, labels, pixels));
}

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg) {
  const PreparedScene scene = prepare_scene(cfg);
  const SplitResult split = stratified_split(scene.labels, cfg.fraction, cfg.seed);
  const Dictionary dict = build_dictionary(scene.cube, split, scene.labels);

  std::vector<double> lambdas = cfg.sweep_lambda;
  if (lambdas.empty()) lambdas.push_back(cfg.solver.lambda);
  std::vector<int> windows = cfg.sweep_window;
  if (windows.empty()) windows.push_back(cfg.post.window);
  std::vector<int> neighbor_counts = cfg.sweep_neighbors;
  if (neighbor_counts.empty()) neighbor_counts.push_back(cfg.post.neighbor_count);

  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    SolverConfig solver = cfg.solver;
    solver.lambda = lambda;
    ResidualField field;
    if (!cfg.residual_checkpoint.empty()) {
      field = read_residual_field(cfg.residual_checkpoint);
      if (field.height != scene.cube.height || field.width != scene.cube.width) {
        throw Error(ErrorCode::dimension_mismatch, "checkpoint does not match scene dimensions");
      }
    } else {
      field = unmix_scene(scene.cube, dict, cfg.kernel, cfg.weight_mode, solver, cfg.threads);
    }
    const ClassMap raw_map = raw_classify(field);
    const MetricsReport raw_report =
        compute_metrics(confusion(raw_map, scene.labels, split.test_pixels));

    for (int window : windows) {
      for (int m : neighbor_counts) {
        PostprocessConfig post = cfg.post;
        post.window = window;
        post.neighbor_count = std::min(m, window * window);
        const ClassMap post_map =
            spatial_postprocess(field, scene.cube, post, &cfg.kernel, cfg.threads);
        SweepRow row;
        row.lambda = lambda;
        row.window = window;
        row.neighbors = post.neighbor_count;
        row.raw_report = raw_report;
        row.post_report = compute_metrics(confusion(post_map, scene.labels, split.test_pixels));
        rows.push_back(std::move(row));
      }
    }
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_text_file((fs::path(cfg.output_dir) / "sweep.csv").string(), sweep_to_csv(rows));
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "lambda,window,neighbors,raw_oa,raw_kappa,post_oa,post_aa,post_kappa\n";
  char line[192];
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%g,%d,%d,%.2f,%.4f,%.2f,%.2f,%.4f\n", row.lambda,
                  row.window, row.neighbors, 100.0 * row.raw_report.overall_accuracy,
                  row.raw_report.kappa, 100.0 * row.post_report.overall_accuracy,
                  100.0 * row.post_report.average_accuracy, row.post_report.kappa);
    out += line;
  }
  return out;
}

SyntheticScene make_synthetic_scene(int height, int width, int bands, int classes,
                                    double noise_sigma, uint64_t seed) {
  if (height < 1 || width < classes || bands < 1 || classes < 1) {
    throw Error(ErrorCode::invalid_argument, "make_synthetic_scene: bad dimensions");
  }
  SyntheticScene scene;
  scene.cube.height = height;
  scene.cube.width = width;
  scene.cube.bands = bands;
  scene.cube.values.resize(static_cast<size_t>(height) * width * bands);
  scene.labels.height = height;
  scene.labels.width = width;
  scene.labels.class_count = classes;
  scene.labels.labels.resize(static_cast<size_t>(height) * width);

  // smooth distinct per-class spectra: offset Gaussian bumps on a ramp
  scene.class_means.resize(static_cast<size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    auto& mean = scene.class_means[static_cast<size_t>(c)];
    mean.resize(static_cast<size_t>(bands));
    const double center = (c + 0.5) * static_cast<double>(bands) / classes;
    const double sigma_b = std::max(1.0, bands / (2.5 * classes));
    for (int b = 0; b < bands; ++b) {
      const double z = (b - center) / sigma_b;
      mean[static_cast<size_t>(b)] = 0.2 + 0.1 * c + std::exp(-0.5 * z * z);
    }
  }

  Rng rng(seed);
  const int strip = (width + classes - 1) / classes;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int cls = std::min(c / strip, classes - 1);
      scene.labels.labels[static_cast<size_t>(r) * width + c] = cls + 1;
      const auto& mean = scene.class_means[static_cast<size_t>(cls)];
      double* spec = scene.cube.values.data() + (static_cast<size_t>(r) * width + c) * bands;
      for (int b = 0; b < bands; ++b) {
        spec[b] = mean[static_cast<size_t>(b)] + noise_sigma * rng.next_normal();
      }
    }
  }
  return scene;
}

}  // namespace wsun
