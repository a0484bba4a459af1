#pragma once

#include <span>
#include <string>
#include <vector>

#include "wsunsal/classifier.hpp"

namespace wsun {

// counts[t][p] = test pixels of true class t (1-based t,p stored 0-based)
// predicted as p.
struct ConfusionMatrix {
  int class_count = 0;
  std::vector<long long> counts;

  long long& at(int t, int p) { return counts[static_cast<size_t>(t) * class_count + p]; }
  long long at(int t, int p) const { return counts[static_cast<size_t>(t) * class_count + p]; }
  long long total() const;
};

// per_class_accuracy entries for classes with no test pixels are NaN and are
// excluded from the average accuracy; a 0 entry means real misclassification.
struct MetricsReport {
  int class_count = 0;
  std::vector<double> per_class_accuracy;
  double overall_accuracy = 0.0;
  double average_accuracy = 0.0;
  double kappa = 0.0;
};

struct TrialAggregate {
  MetricsReport mean_report;
  double std_oa = 0.0;  // sample standard deviation of OA across trials
  int trial_count = 0;
};

ConfusionMatrix confusion(const ClassMap& pred, const LabelMap& truth,
                          std::span<const PixelCoord> test_pixels);

MetricsReport compute_metrics(const ConfusionMatrix& cm);

TrialAggregate aggregate_trials(std::span<const MetricsReport> reports);

// JSON mirrors the per-class / OA / AA / kappa table row structure; CSV has
// one row per class plus summary rows. Percentages are rendered with two
// decimals, kappa with four.
std::string report_to_json(const MetricsReport& report);
std::string aggregate_to_json(const TrialAggregate& raw, const TrialAggregate& post,
                              std::span<const MetricsReport> raw_trials,
                              std::span<const MetricsReport> post_trials);
std::string report_to_csv(const MetricsReport& report);
std::string aggregate_to_csv(const TrialAggregate& agg);

}  // namespace wsun
