#include "ecgyolo/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {

bool is_valid(const BoundingBox& b) noexcept {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return unit(b.cx) && unit(b.cy) && unit(b.w) && unit(b.h) && b.w > 0.0 && b.h > 0.0 && b.left() >= -1e-12 &&
         b.right() <= 1.0 + 1e-12 && b.top() >= -1e-12 && b.bottom() <= 1.0 + 1e-12;
}

BoundingBox clip_to_unit(const BoundingBox& b) noexcept {
  const double x0 = std::clamp(b.left(), 0.0, 1.0);
  const double x1 = std::clamp(b.right(), 0.0, 1.0);
  const double y0 = std::clamp(b.top(), 0.0, 1.0);
  const double y1 = std::clamp(b.bottom(), 0.0, 1.0);
  return BoundingBox::from_corners(b.class_id, x0, y0, x1, y1);
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  if (a == b) return 1.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool ranks_before(const Detection& a, const Detection& b) noexcept {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.box.class_id, a.box.cx, a.box.cy, a.box.w, a.box.h) <
         std::tie(b.box.class_id, b.box.cx, b.box.cy, b.box.w, b.box.h);
}

std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw ConfigError("NMS IoU threshold must lie in (0, 1]");
  std::vector<Detection> sorted(detections.begin(), detections.end());
  std::stable_sort(sorted.begin(), sorted.end(), ranks_before);
  std::vector<Detection> kept;
  for (const auto& d : sorted) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.class_id() == d.class_id() && iou(k.box, d.box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> soft_nms(std::span<const Detection> detections, double sigma, double score_floor) {
  if (!(sigma > 0.0)) throw ConfigError("soft-NMS sigma must be positive");
  if (!(score_floor >= 0.0 && score_floor < 1.0)) throw ConfigError("soft-NMS score floor must lie in [0, 1)");
  std::vector<Detection> pool;
  for (const auto& d : detections) {
    if (d.confidence >= score_floor) pool.push_back(d);
  }
  std::vector<Detection> out;
  while (!pool.empty()) {
    auto best_it = std::min_element(pool.begin(), pool.end(), ranks_before);
    const Detection best = *best_it;
    pool.erase(best_it);
    out.push_back(best);
    for (auto& d : pool) {
      if (d.class_id() != best.class_id()) continue;
      const double overlap = iou(best.box, d.box);
      d.confidence *= std::exp(-(overlap * overlap) / sigma);
    }
    std::erase_if(pool, [&](const Detection& d) { return d.confidence < score_floor; });
  }
  std::stable_sort(out.begin(), out.end(), ranks_before);
  return out;
}

MatchResult match_detections(std::span<const Detection> predictions, std::span<const BoundingBox> ground_truths,
                             double iou_threshold, MatchMode mode) {
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].confidence > predictions[b].confidence;
  });

  MatchResult result;
  std::vector<bool> claimed(ground_truths.size(), false);
  for (std::size_t p : order) {
    const auto& pred = predictions[p];
    double best_iou = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (claimed[g]) continue;
      if (mode == MatchMode::same_class && ground_truths[g].class_id != pred.class_id()) continue;
      const double overlap = iou(pred.box, ground_truths[g]);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (best_iou >= 0.0) {
      claimed[best_gt] = true;
      result.pairs.push_back({p, best_gt, best_iou});
    } else {
      result.unmatched_predictions.push_back(p);
    }
  }
  std::sort(result.unmatched_predictions.begin(), result.unmatched_predictions.end());
  for (std::size_t g = 0; g < ground_truths.size(); ++g) {
    if (!claimed[g]) result.unmatched_ground_truths.push_back(g);
  }
  return result;
}

}  // namespace ecgyolo
