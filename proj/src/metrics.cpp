#include "wsunsal/metrics.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace wsun {
namespace {

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

nlohmann::json report_json(const MetricsReport& report) {
  nlohmann::json j;
  nlohmann::json per_class = nlohmann::json::array();
  for (double a : report.per_class_accuracy) {
    if (std::isnan(a)) per_class.push_back(nullptr);
    else per_class.push_back(round_to(100.0 * a, 2));
  }
  j["per_class_accuracy_percent"] = std::move(per_class);
  j["overall_accuracy_percent"] = round_to(100.0 * report.overall_accuracy, 2);
  j["average_accuracy_percent"] = round_to(100.0 * report.average_accuracy, 2);
  j["kappa"] = round_to(report.kappa, 4);
  return j;
}

}  // namespace

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (long long v : counts) t += v;
  return t;
}

ConfusionMatrix confusion(const ClassMap& pred, const LabelMap& truth,
                          std::span<const PixelCoord> test_pixels) {
  if (pred.height != truth.height || pred.width != truth.width) {
    throw Error(ErrorCode::dimension_mismatch, "confusion: prediction/truth size mismatch");
  }
  ConfusionMatrix cm;
  cm.class_count = truth.class_count;
  cm.counts.assign(static_cast<size_t>(cm.class_count) * cm.class_count, 0);
  for (const auto& p : test_pixels) {
    const int t = truth.at(p.row, p.col);
    if (t <= 0) {
      throw Error(ErrorCode::unlabeled_test_pixel,
                  "test pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                      ") is unlabeled");
    }
    const int pr = pred.at(p.row, p.col);
    if (pr < 1 || pr > cm.class_count) {
      throw Error(ErrorCode::invalid_argument,
                  "prediction " + std::to_string(pr) + " outside 1.." +
                      std::to_string(cm.class_count));
    }
    ++cm.at(t - 1, pr - 1);
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const long long total = cm.total();
  if (cm.class_count < 1 || total < 1) {
    throw Error(ErrorCode::empty_matrix, "compute_metrics: empty confusion matrix");
  }
  const int n = cm.class_count;
  std::vector<long long> row_sum(static_cast<size_t>(n), 0);
  std::vector<long long> col_sum(static_cast<size_t>(n), 0);
  long long trace = 0;
  for (int t = 0; t < n; ++t) {
    for (int p = 0; p < n; ++p) {
      row_sum[static_cast<size_t>(t)] += cm.at(t, p);
      col_sum[static_cast<size_t>(p)] += cm.at(t, p);
    }
    trace += cm.at(t, t);
  }

  MetricsReport report;
  report.class_count = n;
  report.per_class_accuracy.resize(static_cast<size_t>(n));
  double aa_sum = 0.0;
  int aa_count = 0;
  for (int t = 0; t < n; ++t) {
    if (row_sum[static_cast<size_t>(t)] == 0) {
      report.per_class_accuracy[static_cast<size_t>(t)] = std::nan("");
    } else {
      const double acc = static_cast<double>(cm.at(t, t)) /
                         static_cast<double>(row_sum[static_cast<size_t>(t)]);
      report.per_class_accuracy[static_cast<size_t>(t)] = acc;
      aa_sum += acc;
      ++aa_count;
    }
  }
  report.overall_accuracy = static_cast<double>(trace) / static_cast<double>(total);
  report.average_accuracy = aa_count > 0 ? aa_sum / aa_count : 0.0;

  double pe = 0.0;
  const double dt = static_cast<double>(total);
  for (int t = 0; t < n; ++t) {
    pe += (static_cast<double>(row_sum[static_cast<size_t>(t)]) / dt) *
          (static_cast<double>(col_sum[static_cast<size_t>(t)]) / dt);
  }
  if (pe >= 1.0) {
    // all mass concentrated in one row/column pair
    report.kappa = report.overall_accuracy == 1.0 ? 1.0 : 0.0;
  } else {
    report.kappa = (report.overall_accuracy - pe) / (1.0 - pe);
  }
  return report;
}

TrialAggregate aggregate_trials(std::span<const MetricsReport> reports) {
  if (reports.empty()) {
    throw Error(ErrorCode::invalid_argument, "aggregate_trials: no reports");
  }
  const int n = reports.front().class_count;
  for (const auto& r : reports) {
    if (r.class_count != n) {
      throw Error(ErrorCode::inconsistent_class_count, "aggregate_trials: class counts differ");
    }
  }

  TrialAggregate agg;
  agg.trial_count = static_cast<int>(reports.size());
  agg.mean_report.class_count = n;
  agg.mean_report.per_class_accuracy.assign(static_cast<size_t>(n), std::nan(""));
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : reports) {
      const double v = r.per_class_accuracy[static_cast<size_t>(c)];
      if (!std::isnan(v)) {
        sum += v;
        ++count;
      }
    }
    if (count > 0) agg.mean_report.per_class_accuracy[static_cast<size_t>(c)] = sum / count;
  }

  double oa_sum = 0.0, aa_sum = 0.0, kappa_sum = 0.0;
  for (const auto& r : reports) {
    oa_sum += r.overall_accuracy;
    aa_sum += r.average_accuracy;
    kappa_sum += r.kappa;
  }
  const double count = static_cast<double>(reports.size());
  agg.mean_report.overall_accuracy = oa_sum / count;
  agg.mean_report.average_accuracy = aa_sum / count;
  agg.mean_report.kappa = kappa_sum / count;

  if (reports.size() > 1) {
    double ss = 0.0;
    for (const auto& r : reports) {
      const double d = r.overall_accuracy - agg.mean_report.overall_accuracy;
      ss += d * d;
    }
    agg.std_oa = std::sqrt(ss / (count - 1.0));
  }
  return agg;
}

std::string report_to_json(const MetricsReport& report) {
  return report_json(report).dump(2) + "\n";
}

std::string aggregate_to_json(const TrialAggregate& raw, const TrialAggregate& post,
                              std::span<const MetricsReport> raw_trials,
                              std::span<const MetricsReport> post_trials) {
  nlohmann::json j;
  j["trials"] = raw.trial_count;
  j["raw"] = report_json(raw.mean_report);
  j["raw"]["oa_std_percent"] = round_to(100.0 * raw.std_oa, 2);
  j["postprocessed"] = report_json(post.mean_report);
  j["postprocessed"]["oa_std_percent"] = round_to(100.0 * post.std_oa, 2);
  nlohmann::json raw_list = nlohmann::json::array();
  for (const auto& r : raw_trials) raw_list.push_back(report_json(r));
  nlohmann::json post_list = nlohmann::json::array();
  for (const auto& r : post_trials) post_list.push_back(report_json(r));
  j["per_trial"]["raw"] = std::move(raw_list);
  j["per_trial"]["postprocessed"] = std::move(post_list);
  return j.dump(2) + "\n";
}

namespace {

void append_csv_rows(std::string& out, const MetricsReport& report) {
  char line[128];
  for (int c = 0; c < report.class_count; ++c) {
    const double a = report.per_class_accuracy[static_cast<size_t>(c)];
    if (std::isnan(a)) {
      std::snprintf(line, sizeof(line), "%d,\n", c + 1);
    } else {
      std::snprintf(line, sizeof(line), "%d,%.2f\n", c + 1, 100.0 * a);
    }
    out += line;
  }
  std::snprintf(line, sizeof(line), "OA,%.2f\n", 100.0 * report.overall_accuracy);
  out += line;
  std::snprintf(line, sizeof(line), "AA,%.2f\n", 100.0 * report.average_accuracy);
  out += line;
  std::snprintf(line, sizeof(line), "kappa,%.4f\n", report.kappa);
  out += line;
}

}  // namespace

std::string report_to_csv(const MetricsReport& report) {
  std::string out = "class,accuracy_percent\n";
  append_csv_rows(out, report);
  return out;
}

std::string aggregate_to_csv(const TrialAggregate& agg) {
  std::string out = "class,accuracy_percent\n";
  append_csv_rows(out, agg.mean_report);
  char line[128];
  std::snprintf(line, sizeof(line), "OA_std,%.2f\n", 100.0 * agg.std_oa);
  out += line;
  std::snprintf(line, sizeof(line), "trials,%d\n", agg.trial_count);
  out += line;
  return out;
}

}  // namespace wsun
