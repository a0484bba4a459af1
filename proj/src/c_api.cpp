#include "wsunsal.h"

#include <cstring>
#include <fstream>
#include <string>

#include "wsunsal/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

wsun_status status_from_code(wsun::ErrorCode code) {
  using wsun::ErrorCode;
  switch (code) {
    case ErrorCode::unknown: return WSUN_ERR_UNKNOWN;
    case ErrorCode::invalid_argument: return WSUN_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_config: return WSUN_ERR_INVALID_CONFIG;
    case ErrorCode::io_error: return WSUN_ERR_IO;
    case ErrorCode::not_positive_definite: return WSUN_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::dimension_mismatch: return WSUN_ERR_DIMENSION_MISMATCH;
    case ErrorCode::size_mismatch: return WSUN_ERR_SIZE_MISMATCH;
    case ErrorCode::non_finite_value: return WSUN_ERR_NON_FINITE_VALUE;
    case ErrorCode::negative_label: return WSUN_ERR_NEGATIVE_LABEL;
    case ErrorCode::non_contiguous_classes: return WSUN_ERR_NON_CONTIGUOUS_CLASSES;
    case ErrorCode::band_out_of_range: return WSUN_ERR_BAND_OUT_OF_RANGE;
    case ErrorCode::empty_class: return WSUN_ERR_EMPTY_CLASS;
    case ErrorCode::empty_dictionary: return WSUN_ERR_EMPTY_DICTIONARY;
    case ErrorCode::even_window: return WSUN_ERR_EVEN_WINDOW;
    case ErrorCode::negative_threshold: return WSUN_ERR_NEGATIVE_THRESHOLD;
    case ErrorCode::non_finite_iterate: return WSUN_ERR_NON_FINITE_ITERATE;
    case ErrorCode::empty_class_range: return WSUN_ERR_EMPTY_CLASS_RANGE;
    case ErrorCode::zero_norm: return WSUN_ERR_ZERO_NORM;
    case ErrorCode::unlabeled_test_pixel: return WSUN_ERR_UNLABELED_TEST_PIXEL;
    case ErrorCode::empty_matrix: return WSUN_ERR_EMPTY_MATRIX;
    case ErrorCode::inconsistent_class_count: return WSUN_ERR_INCONSISTENT_CLASS_COUNT;
  }
  return WSUN_ERR_UNKNOWN;
}

template <typename Fn>
wsun_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return WSUN_OK;
  } catch (const wsun::Error& e) {
    g_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WSUN_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return WSUN_ERR_UNKNOWN;
  }
}

wsun_metrics to_c(const wsun::MetricsReport& r) {
  return {r.overall_accuracy, r.average_accuracy, r.kappa};
}

}  // namespace

struct wsun_config_s {
  wsun::PipelineConfig cfg;
};

extern "C" {

const char* wsun_status_name(wsun_status status) {
  switch (status) {
    case WSUN_OK: return "Ok";
    case WSUN_ERR_UNKNOWN: return "Unknown";
    case WSUN_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case WSUN_ERR_INVALID_CONFIG: return "InvalidConfig";
    case WSUN_ERR_IO: return "IoError";
    case WSUN_ERR_NOT_POSITIVE_DEFINITE: return "NotPositiveDefinite";
    case WSUN_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case WSUN_ERR_SIZE_MISMATCH: return "SizeMismatch";
    case WSUN_ERR_NON_FINITE_VALUE: return "NonFiniteValue";
    case WSUN_ERR_NEGATIVE_LABEL: return "NegativeLabel";
    case WSUN_ERR_NON_CONTIGUOUS_CLASSES: return "NonContiguousClasses";
    case WSUN_ERR_BAND_OUT_OF_RANGE: return "BandOutOfRange";
    case WSUN_ERR_EMPTY_CLASS: return "EmptyClass";
    case WSUN_ERR_EMPTY_DICTIONARY: return "EmptyDictionary";
    case WSUN_ERR_EVEN_WINDOW: return "EvenWindow";
    case WSUN_ERR_NEGATIVE_THRESHOLD: return "NegativeThreshold";
    case WSUN_ERR_NON_FINITE_ITERATE: return "NonFiniteIterate";
    case WSUN_ERR_EMPTY_CLASS_RANGE: return "EmptyClassRange";
    case WSUN_ERR_ZERO_NORM: return "ZeroNorm";
    case WSUN_ERR_UNLABELED_TEST_PIXEL: return "UnlabeledTestPixel";
    case WSUN_ERR_EMPTY_MATRIX: return "EmptyMatrix";
    case WSUN_ERR_INCONSISTENT_CLASS_COUNT: return "InconsistentClassCount";
  }
  return "Unknown";
}

const char* wsun_last_error(void) { return g_last_error.c_str(); }

wsun_status wsun_config_create(wsun_config** out) {
  if (!out) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new wsun_config_s(); });
}

void wsun_config_destroy(wsun_config* cfg) { delete cfg; }

wsun_status wsun_config_load_file(wsun_config* cfg, const char* path) {
  if (!cfg || !path) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg = wsun::load_config_file(path); });
}

wsun_status wsun_config_set(wsun_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] { wsun::config_set(cfg->cfg, key, value); });
}

wsun_status wsun_config_apply_env(wsun_config* cfg) {
  if (!cfg) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] { wsun::apply_env_path_overrides(cfg->cfg); });
}

wsun_status wsun_config_validate(const wsun_config* cfg) {
  if (!cfg) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.validate(); });
}

wsun_status wsun_run_trial(const wsun_config* cfg, int trial_index, int write_outputs,
                           wsun_trial_metrics* out) {
  if (!cfg || !out) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const wsun::PreparedScene scene = wsun::prepare_scene(cfg->cfg);
    const wsun::TrialResult trial = wsun::run_trial(cfg->cfg, trial_index, scene);
    if (write_outputs) wsun::write_trial_outputs(cfg->cfg, scene, trial);
    out->raw = to_c(trial.raw_report);
    out->post = to_c(trial.post_report);
    out->degenerate_weight_pixels = trial.stats.degenerate_weight_pixels;
    out->zero_norm_neighbors_skipped = trial.stats.zero_norm_neighbors_skipped;
  });
}

wsun_status wsun_run_experiment(const wsun_config* cfg, wsun_experiment_metrics* out) {
  if (!cfg || !out) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const wsun::ExperimentResult result = wsun::run_experiment(cfg->cfg);
    out->raw_mean = to_c(result.raw.mean_report);
    out->post_mean = to_c(result.post.mean_report);
    out->raw_oa_std = result.raw.std_oa;
    out->post_oa_std = result.post.std_oa;
    out->trials = result.raw.trial_count;
  });
}

wsun_status wsun_evaluate(const char* classmap_path, const char* labels_path,
                          const char* split_path, const char* json_out_path, wsun_metrics* out) {
  if (!classmap_path || !labels_path || !out) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const wsun::MetricsReport report = wsun::evaluate_class_map(
        classmap_path, labels_path, split_path ? split_path : std::string());
    if (json_out_path) {
      std::ofstream json(json_out_path);
      if (!json) throw wsun::Error(wsun::ErrorCode::io_error,
                                   std::string("cannot write ") + json_out_path);
      json << wsun::report_to_json(report);
    }
    *out = to_c(report);
  });
}

wsun_status wsun_sweep(const wsun_config* cfg) {
  if (!cfg) return WSUN_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    if (cfg->cfg.output_dir.empty()) {
      throw wsun::Error(wsun::ErrorCode::invalid_config, "sweep requires output_dir");
    }
    wsun::run_sweep(cfg->cfg);
  });
}

wsun_status wsun_unmix_pixel(int band_count, int column_count, const double* dictionary,
                             const double* pixel, int kernel_kind, double sigma, int weight_mode,
                             double lambda, double mu, int max_iter, double tol, int positivity,
                             double* x_out, int* iterations_out, int* converged_out) {
  if (band_count < 1 || column_count < 1 || !dictionary || !pixel || !x_out) {
    return WSUN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    wsun::Dictionary dict;
    dict.band_count = band_count;
    dict.column_count = column_count;
    dict.class_count = 1;
    dict.columns.assign(dictionary,
                        dictionary + static_cast<size_t>(band_count) * column_count);
    dict.column_class.assign(static_cast<size_t>(column_count), 1);
    dict.class_ranges = {{0, column_count}};

    wsun::KernelSpec spec;
    if (kernel_kind == WSUN_KERNEL_RBF) {
      spec.kind = wsun::KernelKind::rbf;
      spec.sigma = sigma;
    } else if (kernel_kind != WSUN_KERNEL_LINEAR) {
      throw wsun::Error(wsun::ErrorCode::invalid_argument, "bad kernel kind");
    }
    spec.validate();

    const std::span<const double> y(pixel, static_cast<size_t>(band_count));
    wsun::GammaWeights gamma;
    switch (weight_mode) {
      case WSUN_WEIGHTS_IDENTITY: gamma = wsun::identity_weights(column_count); break;
      case WSUN_WEIGHTS_EUCLIDEAN: gamma = wsun::euclidean_weights(dict, y); break;
      case WSUN_WEIGHTS_KERNEL_ANGLE: gamma = wsun::kernel_angle_weights(spec, dict, y); break;
      default: throw wsun::Error(wsun::ErrorCode::invalid_argument, "bad weight mode");
    }

    wsun::SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.mu = mu;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    cfg.positivity = positivity != 0;

    const wsun::GramBundle gram = wsun::gram_matrix(spec, dict);
    const std::vector<double> g = wsun::cross_vector(spec, dict, y);
    const double k_yy = wsun::kernel_eval(spec, y, y);
    const wsun::UnmixResult result = wsun::admm_weighted_sunsal(gram, g, k_yy, gamma, cfg);

    std::memcpy(x_out, result.x.data(), sizeof(double) * result.x.size());
    if (iterations_out) *iterations_out = result.iterations_used;
    if (converged_out) *converged_out = result.converged ? 1 : 0;
  });
}

}  // extern "C"
