#pragma once

// Detection evaluation: PR curves, 101-point AP, mAP over IoU thresholds,
// confusion matrix with a background class, and one-vs-rest class metrics.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/detect.hpp"
#include "ecgyolo/formats.hpp"

namespace ecgyolo {

struct EvalFrame {
  std::string id;
  std::vector<BoundingBox> truths;
  std::vector<Detection> detections;
};

// Pairs labels with detections by frame id. Detections on frames that are not
// in `labels` are ignored and counted in `ignored`.
std::vector<EvalFrame> join_frames(const std::vector<std::pair<std::string, std::vector<BoundingBox>>>& labels,
                                   const DetectionsByFrame& detections, std::size_t* ignored = nullptr);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  int class_id = 0;
  std::size_t instances = 0;
  bool defined = false;  // false when the class has no ground truth
  std::vector<PrPoint> points;  // one per distinct confidence, descending
};

PrCurve pr_curve(std::span<const EvalFrame> frames, double iou_threshold, int class_id);

// 101-point interpolated AP; nullopt for an undefined curve.
std::optional<double> average_precision(const PrCurve& curve);

// Mean over defined entries; throws when none is defined.
double mean_ap(std::span<const std::optional<double>> per_class_ap);

std::vector<double> default_iou_thresholds();  // 0.50:0.05:0.95

struct ThresholdSweep {
  std::vector<double> thresholds;
  std::vector<std::array<std::optional<double>, kNumClasses>> ap;  // [threshold][class]
  std::vector<double> map;                                         // per threshold
  double aggregate = 0.0;                                          // mean over thresholds
};

ThresholdSweep map_over_thresholds(std::span<const EvalFrame> frames, std::span<const double> thresholds);

class ConfusionMatrix {
 public:
  static constexpr int kBackground = kNumClasses;
  static constexpr int kSize = kNumClasses + 1;

  std::size_t& at(int predicted, int actual) { return cells_[index(predicted, actual)]; }
  std::size_t at(int predicted, int actual) const { return cells_[index(predicted, actual)]; }
  std::size_t total() const noexcept;
  std::size_t row_sum(int predicted) const noexcept;
  std::size_t column_sum(int actual) const noexcept;
  // Each row divided by its sum (rows with no counts stay zero).
  std::array<std::array<double, kSize>, kSize> row_normalized() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  static std::size_t index(int predicted, int actual);
  std::array<std::size_t, kSize * kSize> cells_{};
};

ConfusionMatrix confusion_matrix(std::span<const EvalFrame> frames, double iou_threshold = 0.45,
                                 double confidence_floor = 0.25);

struct ClassMetrics {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::optional<double> accuracy, specificity, precision, recall, f1;
};

ClassMetrics metrics_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);
// One-vs-rest over the class rows/columns, background excluded.
ClassMetrics class_metrics(const ConfusionMatrix& confusion, int class_id);

struct EvalOptions {
  double match_iou = 0.50;        // IoU for the per-class P/R/F1 columns
  double confusion_iou = 0.45;
  double confidence_floor = 0.25;
  std::vector<double> thresholds = default_iou_thresholds();
};

struct ClassReport {
  int class_id = 0;
  std::size_t instances = 0;
  std::optional<double> precision, recall, f1, ap50, ap50_95, accuracy, specificity;
};

struct EvalReport {
  std::vector<ClassReport> classes;  // AAMI order
  ClassReport average;               // mean over classes with a defined value
  std::optional<double> map50;
  std::optional<double> map50_95;
  std::vector<double> thresholds;
  std::vector<double> map_per_threshold;
  ConfusionMatrix confusion;
  std::size_t frames = 0;
  std::size_t detections = 0;
  std::size_t ground_truths = 0;
  // provenance
  std::string split;
  double match_iou = 0.5;
  double confusion_iou = 0.45;
  double confidence_floor = 0.25;
  std::uint64_t seed = 0;
};

EvalReport evaluate(std::span<const EvalFrame> frames, const EvalOptions& options = {});

enum class ReportFormat { text, csv, json };
ReportFormat parse_report_format(std::string_view name);

std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport parse_report_json(std::string_view json_text);
// Reads the CSV form back: the average row (class_id -1) first, then per-class rows.
std::vector<ClassReport> parse_report_csv(std::string_view csv_text);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by n)
};
MeanStd mean_std(std::span<const double> values);

// One row per cross-validation fold plus mean and standard deviation rows.
struct FoldSummary {
  std::optional<double> precision, recall, map50, map50_95;
};
FoldSummary summarize_fold(const EvalReport& report);
std::string render_cv_report(std::span<const FoldSummary> folds, ReportFormat format);

}  // namespace ecgyolo
