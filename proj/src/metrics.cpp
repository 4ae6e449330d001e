#include "ecgyolo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {
namespace {

using json = nlohmann::json;

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> harmonic(std::optional<double> p, std::optional<double> r) {
  if (!p || !r) return std::nullopt;
  if (*p + *r == 0.0) return 0.0;
  return 2.0 * *p * *r / (*p + *r);
}

template <typename Get>
std::optional<double> mean_over(const std::vector<ClassReport>& rows, Get get) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (auto v = get(row)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Per-detection true-positive flags for one class, in ranking order across frames.
struct RankedOutcome {
  double confidence;
  bool true_positive;
};

std::vector<RankedOutcome> ranked_outcomes(std::span<const EvalFrame> frames, double iou_threshold, int class_id,
                                           double confidence_floor, std::size_t& instances) {
  struct Ranked {
    Detection det;
    std::size_t frame;
    bool tp;
  };
  std::vector<Ranked> all;
  instances = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::vector<BoundingBox> truths;
    for (const auto& t : frames[f].truths) {
      if (t.class_id == class_id) truths.push_back(t);
    }
    instances += truths.size();
    std::vector<Detection> dets;
    for (const auto& d : frames[f].detections) {
      if (d.class_id() == class_id && d.confidence >= confidence_floor) dets.push_back(d);
    }
    std::stable_sort(dets.begin(), dets.end(), ranks_before);
    const auto match = match_detections(dets, truths, iou_threshold, MatchMode::same_class);
    std::vector<bool> tp(dets.size(), false);
    for (const auto& p : match.pairs) tp[p.prediction] = true;
    for (std::size_t i = 0; i < dets.size(); ++i) all.push_back({dets[i], f, tp[i]});
  }
  std::stable_sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    if (a.det.confidence != b.det.confidence) return a.det.confidence > b.det.confidence;
    return a.frame < b.frame;
  });
  std::vector<RankedOutcome> out;
  out.reserve(all.size());
  for (const auto& r : all) out.push_back({r.det.confidence, r.tp});
  return out;
}

std::string show3(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string full(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> json_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json class_row_json(const ClassReport& r, std::string_view name) {
  return {{"class", name},
          {"instances", r.instances},
          {"precision", opt_json(r.precision)},
          {"recall", opt_json(r.recall)},
          {"f1", opt_json(r.f1)},
          {"ap50", opt_json(r.ap50)},
          {"ap50_95", opt_json(r.ap50_95)},
          {"accuracy", opt_json(r.accuracy)},
          {"specificity", opt_json(r.specificity)}};
}

ClassReport class_row_from_json(const json& j) {
  ClassReport r;
  const auto name = j.at("class").get<std::string>();
  if (auto c = class_from_name(name)) r.class_id = class_id(*c);
  else r.class_id = -1;
  r.instances = j.at("instances").get<std::size_t>();
  r.precision = json_opt(j, "precision");
  r.recall = json_opt(j, "recall");
  r.f1 = json_opt(j, "f1");
  r.ap50 = json_opt(j, "ap50");
  r.ap50_95 = json_opt(j, "ap50_95");
  r.accuracy = json_opt(j, "accuracy");
  r.specificity = json_opt(j, "specificity");
  return r;
}

std::optional<double> parse_optional(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return std::stod(std::string(s));
}

}  // namespace

std::vector<EvalFrame> join_frames(const std::vector<std::pair<std::string, std::vector<BoundingBox>>>& labels,
                                   const DetectionsByFrame& detections, std::size_t* ignored) {
  std::vector<EvalFrame> out;
  out.reserve(labels.size());
  std::size_t used = 0;
  for (const auto& [id, truths] : labels) {
    EvalFrame f{id, truths, {}};
    if (auto it = detections.find(id); it != detections.end()) {
      f.detections = it->second;
      used += it->second.size();
    }
    out.push_back(std::move(f));
  }
  if (ignored) {
    std::size_t total = 0;
    for (const auto& [_, d] : detections) total += d.size();
    *ignored = total - used;
  }
  return out;
}

PrCurve pr_curve(std::span<const EvalFrame> frames, double iou_threshold, int class_id) {
  PrCurve curve;
  curve.class_id = class_id;
  const auto outcomes = ranked_outcomes(frames, iou_threshold, class_id, 0.0, curve.instances);
  curve.defined = curve.instances > 0;
  if (!curve.defined) return curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    (outcomes[i].true_positive ? tp : fp) += 1;
    const bool group_end = i + 1 == outcomes.size() || outcomes[i + 1].confidence != outcomes[i].confidence;
    if (!group_end) continue;
    curve.points.push_back({outcomes[i].confidence, static_cast<double>(tp) / static_cast<double>(tp + fp),
                            static_cast<double>(tp) / static_cast<double>(curve.instances)});
  }
  return curve;
}

std::optional<double> average_precision(const PrCurve& curve) {
  if (!curve.defined) return std::nullopt;
  // envelope[i] = max precision over points i..end; recall ascends along the curve.
  std::vector<double> envelope(curve.points.size());
  double running = 0.0;
  for (std::size_t i = curve.points.size(); i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    envelope[i] = running;
  }
  double sum = 0.0;
  std::size_t next = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = static_cast<double>(k) / 100.0;
    while (next < curve.points.size() && curve.points[next].recall < r) ++next;
    if (next < curve.points.size()) sum += envelope[next];
  }
  return sum / 101.0;
}

double mean_ap(std::span<const std::optional<double>> per_class_ap) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ap : per_class_ap) {
    if (ap) {
      sum += *ap;
      ++n;
    }
  }
  if (n == 0) throw Error("mAP is undefined: no class has ground truth");
  return sum / static_cast<double>(n);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

ThresholdSweep map_over_thresholds(std::span<const EvalFrame> frames, std::span<const double> thresholds) {
  if (thresholds.empty()) throw ConfigError("at least one IoU threshold is required");
  ThresholdSweep sweep;
  sweep.thresholds.assign(thresholds.begin(), thresholds.end());
  double total = 0.0;
  for (double t : thresholds) {
    std::array<std::optional<double>, kNumClasses> aps{};
    for (int c = 0; c < kNumClasses; ++c) aps[static_cast<std::size_t>(c)] = average_precision(pr_curve(frames, t, c));
    const double m = mean_ap(aps);
    sweep.ap.push_back(aps);
    sweep.map.push_back(m);
    total += m;
  }
  sweep.aggregate = total / static_cast<double>(thresholds.size());
  return sweep;
}

std::size_t ConfusionMatrix::index(int predicted, int actual) {
  if (predicted < 0 || predicted >= kSize || actual < 0 || actual >= kSize) {
    throw Error("confusion matrix index out of range");
  }
  return static_cast<std::size_t>(predicted) * kSize + static_cast<std::size_t>(actual);
}

std::size_t ConfusionMatrix::total() const noexcept { return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::row_sum(int predicted) const noexcept {
  std::size_t s = 0;
  for (int a = 0; a < kSize; ++a) s += cells_[static_cast<std::size_t>(predicted * kSize + a)];
  return s;
}

std::size_t ConfusionMatrix::column_sum(int actual) const noexcept {
  std::size_t s = 0;
  for (int p = 0; p < kSize; ++p) s += cells_[static_cast<std::size_t>(p * kSize + actual)];
  return s;
}

std::array<std::array<double, ConfusionMatrix::kSize>, ConfusionMatrix::kSize> ConfusionMatrix::row_normalized()
    const noexcept {
  std::array<std::array<double, kSize>, kSize> out{};
  for (int p = 0; p < kSize; ++p) {
    const auto sum = row_sum(p);
    if (sum == 0) continue;
    for (int a = 0; a < kSize; ++a) {
      out[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)] =
          static_cast<double>(cells_[static_cast<std::size_t>(p * kSize + a)]) / static_cast<double>(sum);
    }
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const EvalFrame> frames, double iou_threshold, double confidence_floor) {
  ConfusionMatrix m;
  for (const auto& frame : frames) {
    std::vector<Detection> dets;
    for (const auto& d : frame.detections) {
      if (d.confidence >= confidence_floor) dets.push_back(d);
    }
    std::stable_sort(dets.begin(), dets.end(), ranks_before);
    const auto match = match_detections(dets, frame.truths, iou_threshold, MatchMode::class_agnostic);
    for (const auto& p : match.pairs) ++m.at(dets[p.prediction].class_id(), frame.truths[p.ground_truth].class_id);
    for (auto p : match.unmatched_predictions) ++m.at(dets[p].class_id(), ConfusionMatrix::kBackground);
    for (auto g : match.unmatched_ground_truths) ++m.at(ConfusionMatrix::kBackground, frame.truths[g].class_id);
  }
  return m;
}

ClassMetrics metrics_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.tp = tp;
  m.tn = tn;
  m.fp = fp;
  m.fn = fn;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  m.specificity = ratio(tn, tn + fp);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = harmonic(m.precision, m.recall);
  return m;
}

ClassMetrics class_metrics(const ConfusionMatrix& confusion, int class_id) {
  if (class_id < 0 || class_id >= kNumClasses) throw Error("class id out of range");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (int p = 0; p < kNumClasses; ++p) {
    for (int a = 0; a < kNumClasses; ++a) {
      const auto n = confusion.at(p, a);
      if (p == class_id && a == class_id) tp += n;
      else if (p == class_id) fp += n;
      else if (a == class_id) fn += n;
      else tn += n;
    }
  }
  return metrics_from_counts(tp, tn, fp, fn);
}

EvalReport evaluate(std::span<const EvalFrame> frames, const EvalOptions& options) {
  EvalReport report;
  report.frames = frames.size();
  report.match_iou = options.match_iou;
  report.confusion_iou = options.confusion_iou;
  report.confidence_floor = options.confidence_floor;
  report.thresholds = options.thresholds;
  for (const auto& f : frames) {
    report.detections += f.detections.size();
    report.ground_truths += f.truths.size();
  }
  report.confusion = confusion_matrix(frames, options.confusion_iou, options.confidence_floor);

  std::vector<std::array<std::optional<double>, kNumClasses>> ap_by_threshold;
  for (double t : options.thresholds) {
    std::array<std::optional<double>, kNumClasses> aps{};
    for (int c = 0; c < kNumClasses; ++c) aps[static_cast<std::size_t>(c)] = average_precision(pr_curve(frames, t, c));
    ap_by_threshold.push_back(aps);
  }

  const auto ap50_at = std::find_if(options.thresholds.begin(), options.thresholds.end(),
                                    [](double t) { return std::abs(t - 0.5) < 1e-9; });
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    ClassReport row;
    row.class_id = c;
    std::size_t instances = 0;
    const auto outcomes = ranked_outcomes(frames, options.match_iou, c, options.confidence_floor, instances);
    row.instances = instances;
    const auto tp = static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const RankedOutcome& o) { return o.true_positive; }));
    // Missing every instance without predicting anything counts as zero precision.
    row.precision = outcomes.empty() && instances > 0 ? std::optional<double>(0.0) : ratio(tp, outcomes.size());
    row.recall = ratio(tp, instances);
    row.f1 = harmonic(row.precision, row.recall);
    if (ap50_at != options.thresholds.end()) {
      row.ap50 = ap_by_threshold[static_cast<std::size_t>(ap50_at - options.thresholds.begin())][ci];
    }
    if (instances > 0 && !ap_by_threshold.empty()) {
      double sum = 0.0;
      for (const auto& aps : ap_by_threshold) sum += aps[ci].value_or(0.0);
      row.ap50_95 = sum / static_cast<double>(ap_by_threshold.size());
    }
    const auto cm = class_metrics(report.confusion, c);
    row.accuracy = cm.accuracy;
    row.specificity = cm.specificity;
    report.classes.push_back(row);
  }

  auto& avg = report.average;
  avg.class_id = -1;
  avg.instances = report.ground_truths;
  avg.precision = mean_over(report.classes, [](const ClassReport& r) { return r.precision; });
  avg.recall = mean_over(report.classes, [](const ClassReport& r) { return r.recall; });
  avg.f1 = mean_over(report.classes, [](const ClassReport& r) { return r.f1; });
  avg.ap50 = mean_over(report.classes, [](const ClassReport& r) { return r.ap50; });
  avg.ap50_95 = mean_over(report.classes, [](const ClassReport& r) { return r.ap50_95; });
  avg.accuracy = mean_over(report.classes, [](const ClassReport& r) { return r.accuracy; });
  avg.specificity = mean_over(report.classes, [](const ClassReport& r) { return r.specificity; });
  report.map50 = avg.ap50;
  report.map50_95 = avg.ap50_95;
  for (const auto& aps : ap_by_threshold) {
    bool any = std::any_of(aps.begin(), aps.end(), [](const auto& v) { return v.has_value(); });
    report.map_per_threshold.push_back(any ? mean_ap(aps) : 0.0);
  }
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(name) + "' (text, csv, json)");
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  auto name_of = [](const ClassReport& r) { return r.class_id < 0 ? std::string("all") : std::string(class_name(r.class_id)); };
  std::vector<const ClassReport*> rows;
  rows.push_back(&report.average);
  for (const auto& r : report.classes) rows.push_back(&r);

  if (format == ReportFormat::csv) {
    std::ostringstream os;
    os << "class,instances,precision,recall,f1,ap50,ap50_95,accuracy,specificity\n";
    for (const auto* r : rows) {
      os << name_of(*r) << ',' << r->instances << ',' << full(r->precision) << ',' << full(r->recall) << ','
         << full(r->f1) << ',' << full(r->ap50) << ',' << full(r->ap50_95) << ',' << full(r->accuracy) << ','
         << full(r->specificity) << '\n';
    }
    return os.str();
  }

  if (format == ReportFormat::json) {
    json j;
    j["frames"] = report.frames;
    j["detections"] = report.detections;
    j["ground_truths"] = report.ground_truths;
    j["map50"] = opt_json(report.map50);
    j["map50_95"] = opt_json(report.map50_95);
    j["thresholds"] = report.thresholds;
    j["map_per_threshold"] = report.map_per_threshold;
    j["average"] = class_row_json(report.average, "all");
    j["classes"] = json::array();
    for (const auto& r : report.classes) j["classes"].push_back(class_row_json(r, class_name(r.class_id)));
    json cm = json::array();
    for (int p = 0; p < ConfusionMatrix::kSize; ++p) {
      json row = json::array();
      for (int a = 0; a < ConfusionMatrix::kSize; ++a) row.push_back(report.confusion.at(p, a));
      cm.push_back(row);
    }
    j["confusion_matrix"] = cm;
    j["provenance"] = {{"split", report.split},
                       {"match_iou", report.match_iou},
                       {"confusion_iou", report.confusion_iou},
                       {"confidence_floor", report.confidence_floor},
                       {"seed", report.seed}};
    return j.dump(1) + "\n";
  }

  std::ostringstream os;
  char buf[160];
  os << "Detection metrics (" << report.frames << " frames";
  if (!report.split.empty()) os << ", split " << report.split;
  os << ")\n";
  std::snprintf(buf, sizeof buf, "%-6s %9s %7s %7s %7s %9s %12s\n", "Class", "Instances", "P", "R", "F1", "mAP50",
                "mAP50-95");
  os << buf;
  for (const auto* r : rows) {
    std::snprintf(buf, sizeof buf, "%-6s %9zu %7s %7s %7s %9s %12s\n", name_of(*r).c_str(), r->instances,
                  show3(r->precision).c_str(), show3(r->recall).c_str(), show3(r->f1).c_str(), show3(r->ap50).c_str(),
                  show3(r->ap50_95).c_str());
    os << buf;
  }

  os << "\nPerformance metrics without background (IoU " << show3(report.confusion_iou) << ", conf >= "
     << show3(report.confidence_floor) << ")\n";
  std::snprintf(buf, sizeof buf, "%-8s %9s %12s %10s %7s %7s\n", "Class", "Accuracy", "Specificity", "Precision",
                "Recall", "F1");
  os << buf;
  std::vector<ClassMetrics> cms;
  for (int c = 0; c < kNumClasses; ++c) cms.push_back(class_metrics(report.confusion, c));
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& m = cms[static_cast<std::size_t>(c)];
    std::snprintf(buf, sizeof buf, "%-8s %9s %12s %10s %7s %7s\n", std::string(class_name(c)).c_str(),
                  show3(m.accuracy).c_str(), show3(m.specificity).c_str(), show3(m.precision).c_str(),
                  show3(m.recall).c_str(), show3(m.f1).c_str());
    os << buf;
  }
  auto avg_of = [&](auto get) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& m : cms) {
      if (auto v = get(m)) {
        s += *v;
        ++n;
      }
    }
    return n ? std::optional<double>(s / static_cast<double>(n)) : std::nullopt;
  };
  std::snprintf(buf, sizeof buf, "%-8s %9s %12s %10s %7s %7s\n", "Average",
                show3(avg_of([](const ClassMetrics& m) { return m.accuracy; })).c_str(),
                show3(avg_of([](const ClassMetrics& m) { return m.specificity; })).c_str(),
                show3(avg_of([](const ClassMetrics& m) { return m.precision; })).c_str(),
                show3(avg_of([](const ClassMetrics& m) { return m.recall; })).c_str(),
                show3(avg_of([](const ClassMetrics& m) { return m.f1; })).c_str());
  os << buf;

  os << "\nConfusion matrix (rows predicted, columns actual)\n";
  os << "        ";
  for (int a = 0; a < ConfusionMatrix::kSize; ++a) {
    std::snprintf(buf, sizeof buf, "%8s", a == ConfusionMatrix::kBackground ? "bg" : std::string(class_name(a)).c_str());
    os << buf;
  }
  os << '\n';
  for (int p = 0; p < ConfusionMatrix::kSize; ++p) {
    std::snprintf(buf, sizeof buf, "%-8s", p == ConfusionMatrix::kBackground ? "bg" : std::string(class_name(p)).c_str());
    os << buf;
    for (int a = 0; a < ConfusionMatrix::kSize; ++a) {
      std::snprintf(buf, sizeof buf, "%8zu", report.confusion.at(p, a));
      os << buf;
    }
    os << '\n';
  }
  if (!report.thresholds.empty()) {
    os << "\nmAP per IoU threshold\n";
    for (std::size_t i = 0; i < report.thresholds.size() && i < report.map_per_threshold.size(); ++i) {
      std::snprintf(buf, sizeof buf, "  %.2f  %.3f\n", report.thresholds[i], report.map_per_threshold[i]);
      os << buf;
    }
  }
  return os.str();
}

EvalReport parse_report_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  try {
    EvalReport r;
    r.frames = j.at("frames").get<std::size_t>();
    r.detections = j.at("detections").get<std::size_t>();
    r.ground_truths = j.at("ground_truths").get<std::size_t>();
    r.map50 = json_opt(j, "map50");
    r.map50_95 = json_opt(j, "map50_95");
    r.thresholds = j.at("thresholds").get<std::vector<double>>();
    r.map_per_threshold = j.at("map_per_threshold").get<std::vector<double>>();
    r.average = class_row_from_json(j.at("average"));
    for (const auto& row : j.at("classes")) r.classes.push_back(class_row_from_json(row));
    const auto& cm = j.at("confusion_matrix");
    for (int p = 0; p < ConfusionMatrix::kSize; ++p) {
      for (int a = 0; a < ConfusionMatrix::kSize; ++a) {
        r.confusion.at(p, a) = cm.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(a)).get<std::size_t>();
      }
    }
    const auto& prov = j.at("provenance");
    r.split = prov.at("split").get<std::string>();
    r.match_iou = prov.at("match_iou").get<double>();
    r.confusion_iou = prov.at("confusion_iou").get<double>();
    r.confidence_floor = prov.at("confidence_floor").get<double>();
    r.seed = prov.at("seed").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

std::vector<ClassReport> parse_report_csv(std::string_view csv_text) {
  std::istringstream is{std::string(csv_text)};
  std::string line;
  std::vector<ClassReport> out;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw ParseError("report CSV row needs 9 cells", line_no, 1);
    ClassReport r;
    auto c = class_from_name(cells[0]);
    r.class_id = c ? class_id(*c) : -1;
    r.instances = static_cast<std::size_t>(std::stoull(cells[1]));
    r.precision = parse_optional(cells[2]);
    r.recall = parse_optional(cells[3]);
    r.f1 = parse_optional(cells[4]);
    r.ap50 = parse_optional(cells[5]);
    r.ap50_95 = parse_optional(cells[6]);
    r.accuracy = parse_optional(cells[7]);
    r.specificity = parse_optional(cells[8]);
    out.push_back(r);
  }
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

FoldSummary summarize_fold(const EvalReport& report) {
  return {report.average.precision, report.average.recall, report.map50, report.map50_95};
}

std::string render_cv_report(std::span<const FoldSummary> folds, ReportFormat format) {
  using Getter = std::optional<double> FoldSummary::*;
  const std::array<Getter, 4> columns = {&FoldSummary::precision, &FoldSummary::recall, &FoldSummary::map50,
                                         &FoldSummary::map50_95};
  std::array<MeanStd, 4> stats{};
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<double> values;
    for (const auto& f : folds) {
      if (auto v = f.*columns[c]) values.push_back(*v);
    }
    stats[c] = mean_std(values);
  }

  if (format == ReportFormat::json) {
    json j;
    j["folds"] = json::array();
    for (const auto& f : folds) {
      j["folds"].push_back({{"precision", opt_json(f.precision)},
                            {"recall", opt_json(f.recall)},
                            {"map50", opt_json(f.map50)},
                            {"map50_95", opt_json(f.map50_95)}});
    }
    const std::array<const char*, 4> keys = {"precision", "recall", "map50", "map50_95"};
    for (std::size_t c = 0; c < keys.size(); ++c) {
      j["mean"][keys[c]] = stats[c].mean;
      j["stddev"][keys[c]] = stats[c].stddev;
    }
    return j.dump(1) + "\n";
  }

  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "fold,precision,recall,map50,map50_95\n";
    for (std::size_t i = 0; i < folds.size(); ++i) {
      os << i + 1;
      for (auto g : columns) os << ',' << full(folds[i].*g);
      os << '\n';
    }
    os << "mean";
    for (const auto& s : stats) os << ',' << full(s.mean);
    os << "\nstddev";
    for (const auto& s : stats) os << ',' << full(s.stddev);
    os << '\n';
    return os.str();
  }

  char buf[128];
  std::snprintf(buf, sizeof buf, "%-18s %10s %8s %8s %10s\n", "Fold", "Precision", "Recall", "mAP50", "mAP50-95");
  os << buf;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const std::string label = "Fold " + std::to_string(i + 1);
    std::snprintf(buf, sizeof buf, "%-18s %10s %8s %8s %10s\n", label.c_str(), show3(folds[i].precision).c_str(),
                  show3(folds[i].recall).c_str(), show3(folds[i].map50).c_str(), show3(folds[i].map50_95).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-18s %10.3f %8.3f %8.3f %10.3f\n", "Average", stats[0].mean, stats[1].mean,
                stats[2].mean, stats[3].mean);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-18s %10.3f %8.3f %8.3f %10.3f\n", "Standard deviation", stats[0].stddev,
                stats[1].stddev, stats[2].stddev, stats[3].stddev);
  os << buf;
  return os.str();
}

}  // namespace ecgyolo
