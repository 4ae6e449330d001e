#pragma once

// Box geometry and detector post-processing.

#include <cstddef>
#include <span>
#include <vector>

namespace ecgyolo {

// Normalized center-xywh box with its class id.
struct BoundingBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const noexcept { return cx - w / 2; }
  double right() const noexcept { return cx + w / 2; }
  double top() const noexcept { return cy - h / 2; }
  double bottom() const noexcept { return cy + h / 2; }
  double area() const noexcept { return w * h; }

  static BoundingBox from_corners(int class_id, double x0, double y0, double x1, double y1) noexcept {
    return {class_id, (x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Coordinates in [0,1], positive extent, box inside the unit square.
bool is_valid(const BoundingBox& box) noexcept;
// Intersects the box with the unit square.
BoundingBox clip_to_unit(const BoundingBox& box) noexcept;

struct Detection {
  BoundingBox box;
  double confidence = 0.0;

  int class_id() const noexcept { return box.class_id; }
  friend bool operator==(const Detection&, const Detection&) = default;
};

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

// Strict ordering used wherever detections are ranked: confidence descending,
// then smaller class id, then box coordinates lexicographically.
bool ranks_before(const Detection& a, const Detection& b) noexcept;

// Greedy per-class suppression; drops same-class boxes with IoU > iou_threshold.
std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold);

// Gaussian soft-NMS: same-class confidences decay by exp(-IoU^2 / sigma).
std::vector<Detection> soft_nms(std::span<const Detection> detections, double sigma = 0.5,
                                double score_floor = 0.001);

enum class MatchMode { same_class, class_agnostic };

struct MatchPair {
  std::size_t prediction = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_ground_truths;
};

// Greedy by confidence: each prediction claims the unclaimed ground truth with
// the highest IoU >= iou_threshold. Indices refer to the input spans.
MatchResult match_detections(std::span<const Detection> predictions, std::span<const BoundingBox> ground_truths,
                             double iou_threshold, MatchMode mode = MatchMode::same_class);

}  // namespace ecgyolo
