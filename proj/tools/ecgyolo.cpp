// ecgyolo: ECG records to YOLO datasets, detector evaluation and stream replay.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/config.hpp"
#include "ecgyolo/dataset.hpp"
#include "ecgyolo/errors.hpp"
#include "ecgyolo/formats.hpp"
#include "ecgyolo/metrics.hpp"
#include "ecgyolo/split.hpp"
#include "ecgyolo/stream.hpp"
#include "ecgyolo/synth.hpp"
#include "ecgyolo/wfdb.hpp"

namespace fs = std::filesystem;
using namespace ecgyolo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

// Flags that map one-to-one onto config keys. Values are applied on top of the
// config file so the file stays the single source of defaults.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::pair<CLI::Option*, std::string>> options;
  std::vector<std::pair<CLI::Option*, std::string>> switches;
  std::vector<std::pair<CLI::Option*, std::string>> negations;

  void value(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(app->add_option(flag, values[key], help), key);
  }
  void on(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    switches.emplace_back(app->add_flag(flag, help), key);
  }
  void off(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    negations.emplace_back(app->add_flag(flag, help), key);
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : read_config(config_path);
    for (const auto& [opt, key] : options) {
      if (opt->count() > 0) set_config_value(cfg, key, values.at(key));
    }
    for (const auto& [opt, key] : switches) {
      if (opt->count() > 0) set_config_value(cfg, key, "true");
    }
    for (const auto& [opt, key] : negations) {
      if (opt->count() > 0) set_config_value(cfg, key, "false");
    }
    return cfg;
  }
};

void add_common(CLI::App* app, ConfigFlags& flags) {
  app->add_option("--config", flags.config_path, "run configuration file (key = value)");
  flags.value(app, "--seed", "seed", "global seed");
}

// Removes files created by a subcommand unless it completes.
class OutputGuard {
 public:
  void track(const fs::path& p) {
    if (!fs::exists(p)) created_.push_back(p);
  }
  void commit() { created_.clear(); }
  ~OutputGuard() {
    std::error_code ec;
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) fs::remove_all(*it, ec);
  }

 private:
  std::vector<fs::path> created_;
};

void write_output(OutputGuard& guard, const fs::path& path, std::string_view text) {
  guard.track(path);
  write_text_file(path, text);
}

fs::path prepare_out_dir(OutputGuard& guard, const fs::path& dir) {
  guard.track(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> select_records(const RunConfig& cfg) {
  if (cfg.records_dir.empty()) throw ConfigError("no record directory given (--records-dir or records_dir)");
  return cfg.records.empty() ? list_records(cfg.records_dir) : cfg.records;
}

SymbolMap symbol_map_of(const RunConfig& cfg) {
  return cfg.symbol_map.empty() ? SymbolMap::standard() : SymbolMap::from_csv(read_file_text(cfg.symbol_map));
}

std::string counts_row(const std::string& name, const ClassCounts& c, std::size_t other) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %8zu %8zu %8zu %8zu %8zu %10zu\n", name.c_str(), c[0], c[1], c[2], c[3], c[4],
                other);
  return buf;
}

// ---- ingest ----------------------------------------------------------------

int run_ingest(const RunConfig& cfg, const std::string& out_dir) {
  OutputGuard guard;
  const auto ids = select_records(cfg);
  const auto map = symbol_map_of(cfg);
  const auto& excluded = default_excluded_records();
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %8s %8s %8s %8s %8s %10s\n", "record", "N", "S", "V", "F", "Q", "non-beat");
  os << buf;
  ClassCounts all{}, kept{};
  std::size_t other_all = 0, other_kept = 0;
  for (const auto& id : ids) {
    const auto rec = read_record(cfg.records_dir, id);
    const auto ann = read_annotations(cfg.records_dir, id, rec.sampling_rate, rec.num_samples);
    const auto beats = classify_beats(ann, map);
    const auto counts = count_classes(beats);
    const auto other = ann.size() - beats.size();
    const bool is_excluded = excluded.count(id) > 0;
    os << counts_row(id + (is_excluded ? "*" : ""), counts, other);
    for (std::size_t c = 0; c < counts.size(); ++c) {
      all[c] += counts[c];
      if (!is_excluded) kept[c] += counts[c];
    }
    other_all += other;
    if (!is_excluded) other_kept += other;
  }
  os << counts_row("total", all, other_all);
  os << counts_row("kept", kept, other_kept);
  os << ids.size() << " records; * marks paced records removed when exclude_paced is on\n";
  std::cout << os.str();
  if (!out_dir.empty()) {
    const auto dir = prepare_out_dir(guard, out_dir);
    write_output(guard, dir / "ingest.txt", os.str());
    write_output(guard, dir / kResolvedConfigName, format_config(cfg));
  }
  guard.commit();
  return kExitOk;
}

// ---- build -----------------------------------------------------------------

int run_build(const RunConfig& cfg, const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("build needs --out");
  auto options = build_options(cfg);
  const auto summary = build_dataset(options, out_dir);
  write_text_file(fs::path(out_dir) / kResolvedConfigName, format_config(cfg));
  std::size_t total = 0;
  for (auto c : summary.manifest.counts) total += c;
  std::cout << "Built " << summary.manifest.frame_ids.size() << " frames with " << total << " labeled beats from "
            << summary.records_used.size() << " records";
  if (!summary.records_skipped.empty()) std::cout << " (" << summary.records_skipped.size() << " too short)";
  std::cout << "\nGrayscale frames: " << summary.grayscale_frames << "\n\nLabeled beats per class\n"
            << class_count_comparison(summary.manifest.counts);
  return kExitOk;
}

// ---- split -----------------------------------------------------------------

std::string split_table(const SplitAssignment& split, const std::map<std::string, ClassCounts>& counts) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-6s %7s %7s %7s %7s %7s %7s\n", "part", "frames", "N", "S", "V", "F", "Q");
  os << buf;
  for (auto p : {Partition::train, Partition::val, Partition::test}) {
    if (split.count(p) == 0) continue;
    ClassCounts c{};
    for (const auto& id : split.members(p)) {
      const auto& fc = counts.at(id);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += fc[i];
    }
    std::snprintf(buf, sizeof buf, "%-6s %7zu %7zu %7zu %7zu %7zu %7zu\n", std::string(partition_name(p)).c_str(),
                  split.count(p), c[0], c[1], c[2], c[3], c[4]);
    os << buf;
  }
  return os.str();
}

int run_split(const RunConfig& cfg, const std::string& dataset, const std::string& out_dir) {
  OutputGuard guard;
  const auto labels = read_dataset_labels(dataset);
  std::vector<FrameClasses> frames;
  std::map<std::string, ClassCounts> counts;
  for (const auto& [id, boxes] : labels) {
    frames.push_back(frame_classes(id, boxes));
    counts[id] = frames.back().counts;
  }
  const auto holdout = stratified_holdout(frames, cfg.ratios, cfg.seed, cfg.strategy);
  const auto folds = kfold(frames, cfg.folds, cfg.seed, cfg.strategy);
  const fs::path dir = out_dir.empty() ? fs::path(dataset) / "splits" : fs::path(out_dir);
  guard.track(dir);
  fs::create_directories(dir);
  write_holdout_lists(dir, holdout);
  write_fold_lists(dir, folds);
  write_text_file(dir / kResolvedConfigName, format_config(cfg));
  std::cout << "Holdout split (" << strategy_name(cfg.strategy) << ", seed " << cfg.seed << ")\n"
            << split_table(holdout, counts) << "\n"
            << cfg.folds << "-fold assignment\n";
  for (const auto& f : folds) {
    std::cout << "fold " << f.fold + 1 << ": " << f.count(Partition::val) << " validation frames\n";
  }
  guard.commit();
  return kExitOk;
}

// ---- detect (oracle over a dataset) ----------------------------------------

std::vector<std::pair<std::string, std::vector<BoundingBox>>> labels_for_split(const std::string& dataset,
                                                                               const std::string& split) {
  auto labels = read_dataset_labels(dataset);
  if (split.empty() || split == "all") return labels;
  const auto ids = read_id_list(fs::path(dataset) / "splits" / (split + ".txt"));
  const std::set<std::string> keep(ids.begin(), ids.end());
  std::vector<std::pair<std::string, std::vector<BoundingBox>>> out;
  for (auto& entry : labels) {
    if (keep.count(entry.first)) out.push_back(std::move(entry));
  }
  if (out.size() != keep.size()) throw InputError("split list " + split + " names frames missing from the dataset");
  return out;
}

int run_detect(const std::string& dataset, const std::string& split, const std::string& out_file) {
  OutputGuard guard;
  DetectionsByFrame dets;
  for (const auto& [id, boxes] : labels_for_split(dataset, split)) {
    auto& v = dets[id];
    for (const auto& b : boxes) v.push_back({b, 1.0});
  }
  const auto text = format_detections(dets);
  if (out_file.empty() || out_file == "-") {
    std::cout << text;
  } else {
    write_output(guard, out_file, text);
  }
  guard.commit();
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

int run_eval(const RunConfig& cfg, const std::string& dataset, const std::string& split,
             const std::string& detections_file, const std::string& format, const std::string& out_dir) {
  OutputGuard guard;
  const auto fmt = parse_report_format(format);
  const auto labels = labels_for_split(dataset, split);
  const auto detections = read_detections_file(detections_file);
  std::size_t ignored = 0;
  const auto frames = join_frames(labels, detections, &ignored);
  auto report = evaluate(frames, eval_options(cfg));
  report.split = split.empty() ? "all" : split;
  report.seed = cfg.seed;
  std::cout << render_report(report, fmt);
  if (ignored > 0) std::cerr << ignored << " detections on frames outside the evaluated set were ignored\n";
  if (!out_dir.empty()) {
    const auto dir = prepare_out_dir(guard, out_dir);
    write_output(guard, dir / "report.json", render_report(report, ReportFormat::json));
    write_output(guard, dir / "report.csv", render_report(report, ReportFormat::csv));
    write_output(guard, dir / "report.txt", render_report(report, ReportFormat::text));
    write_output(guard, dir / kResolvedConfigName, format_config(cfg));
  }
  guard.commit();
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

int run_report(const std::vector<std::string>& inputs, const std::string& format, const std::string& out_file) {
  OutputGuard guard;
  const auto fmt = parse_report_format(format);
  if (inputs.empty()) throw ConfigError("report needs at least one report JSON file");
  std::string text;
  if (inputs.size() == 1) {
    text = render_report(parse_report_json(read_file_text(inputs[0])), fmt);
  } else {
    std::vector<FoldSummary> folds;
    for (const auto& path : inputs) folds.push_back(summarize_fold(parse_report_json(read_file_text(path))));
    text = render_cv_report(folds, fmt);
  }
  if (out_file.empty() || out_file == "-") std::cout << text;
  else write_output(guard, out_file, text);
  guard.commit();
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

class FileSink : public SessionSink {
 public:
  FileSink(std::ostream* detections, std::ostream* latency) : detections_(detections), latency_(latency) {
    if (latency_) *latency_ << "frame,preprocess_ms,inference_ms,postprocess_ms,total_ms,failed\n";
  }
  void on_frame(const FrameResult& r) override {
    if (detections_) {
      for (const auto& d : r.detections) *detections_ << format_detection_line(r.frame_id, d);
    }
    if (latency_) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f,%d\n", r.frame_id.c_str(), r.latency.preprocess_ms,
                    r.latency.inference_ms, r.latency.postprocess_ms, r.latency.total_ms, r.failed ? 1 : 0);
      *latency_ << buf;
    }
    if (r.failed) std::cerr << "frame " << r.frame_id << " failed: " << r.error << "\n";
  }

 private:
  std::ostream* detections_;
  std::ostream* latency_;
};

struct SimulateInput {
  std::string record;  // directory/id or id inside records_dir
  bool synthetic = false;
  std::string live;
  double live_fs = 360.0;
  std::string format = "text";
};

int run_simulate(const RunConfig& cfg, const SimulateInput& in, const std::string& out_dir) {
  OutputGuard guard;
  const auto fmt = parse_report_format(in.format);
  SignalRecord record;
  std::vector<BeatAnnotation> annotations;
  if (in.synthetic) {
    SynthOptions so;
    so.seed = cfg.seed + 1;
    auto synth = synthesize_record(so);
    record = std::move(synth.record);
    annotations = std::move(synth.annotations);
  } else if (!in.live.empty()) {
    if (in.live == "-") {
      record = read_live_samples(std::cin, in.live_fs);
    } else {
      std::ifstream f(in.live);
      if (!f) throw IoError("cannot open " + in.live);
      record = read_live_samples(f, in.live_fs);
    }
  } else {
    if (in.record.empty()) throw ConfigError("simulate needs --record, --synthetic or --live");
    fs::path p(in.record);
    fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(cfg.records_dir.empty() ? "." : cfg.records_dir);
    const std::string id = p.filename().string();
    record = read_record(dir, id);
    annotations = read_annotations(dir, id, record.sampling_rate, record.num_samples);
  }
  const auto beats = classify_beats(annotations, symbol_map_of(cfg));
  auto options = session_options(cfg);
  options.evaluate = !annotations.empty();

  const auto spec = parse_detector_spec(cfg.detector);
  std::unique_ptr<DetectorPort> detector;
  switch (spec.kind) {
    case DetectorSpec::Kind::oracle:
      detector = std::make_unique<OracleDetector>(OracleDetector::for_record(record, beats, options.stream));
      break;
    case DetectorSpec::Kind::subprocess:
      detector = std::make_unique<SubprocessDetector>(split_command_line(spec.argument));
      break;
    case DetectorSpec::Kind::weights:
      detector = std::make_unique<WeightsDetector>(spec.argument);
      break;
  }

  std::ofstream det_out, lat_out;
  if (!out_dir.empty()) {
    const auto dir = prepare_out_dir(guard, out_dir);
    guard.track(dir / "detections.txt");
    guard.track(dir / "latency.csv");
    det_out.open(dir / "detections.txt");
    lat_out.open(dir / "latency.csv");
    if (!det_out || !lat_out) throw IoError("cannot write into " + dir.string());
  }
  FileSink sink(out_dir.empty() ? nullptr : &det_out, out_dir.empty() ? nullptr : &lat_out);
  auto report = run_session(record, beats, *detector, options, &sink);
  if (report.eval) report.eval->seed = cfg.seed;
  std::cout << render_session_report(report, fmt);
  if (!out_dir.empty()) {
    det_out.close();
    lat_out.close();
    const fs::path dir(out_dir);
    write_output(guard, dir / "session.json", render_session_report(report, ReportFormat::json));
    write_output(guard, dir / "session.txt", render_session_report(report, ReportFormat::text));
    write_output(guard, dir / kResolvedConfigName, format_config(cfg));
  }
  guard.commit();
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

int run_synth(const RunConfig& cfg, const std::string& out_dir, int count, double duration, int first_id) {
  if (out_dir.empty()) throw ConfigError("synth needs --out");
  if (count < 1) throw ConfigError("--count must be at least 1");
  OutputGuard guard;
  prepare_out_dir(guard, out_dir);
  for (int i = 0; i < count; ++i) {
    SynthOptions o;
    o.record_id = std::to_string(first_id + i);
    o.duration_s = duration;
    o.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i) + 1;
    const auto r = write_synthetic_record(out_dir, o);
    const auto counts = count_classes(classify_beats(r.annotations));
    std::cout << o.record_id << ": " << r.record.duration_s() << " s, N " << counts[0] << " S " << counts[1] << " V "
              << counts[2] << " F " << counts[3] << " Q " << counts[4] << "\n";
  }
  guard.commit();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECG records to YOLO datasets, detector evaluation and stream replay"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string out;

  auto* ingest = app.add_subcommand("ingest", "parse a record directory and count beats per class");
  add_common(ingest, flags);
  ingest->add_option("--out", out, "directory for the summary and resolved config");
  flags.value(ingest, "records_dir,--records-dir", "records_dir", "WFDB record directory");
  flags.value(ingest, "--records", "records", "comma-separated record ids (default: all)");
  flags.value(ingest, "--symbol-map", "symbol_map", "CSV symbol,aami_class map");

  auto* build = app.add_subcommand("build", "render a YOLO dataset from a record directory");
  add_common(build, flags);
  build->add_option("--out", out, "dataset directory");
  flags.value(build, "--records-dir", "records_dir", "WFDB record directory");
  flags.value(build, "--records", "records", "comma-separated record ids (default: all)");
  flags.off(build, "--no-exclude", "exclude_paced", "keep paced records 102, 104, 107, 217");
  flags.value(build, "--symbol-map", "symbol_map", "CSV symbol,aami_class map");
  flags.value(build, "--frame-s", "frame_s", "window length in seconds");
  flags.value(build, "--dedup-spacing", "dedup_spacing_s", "minimum spacing between window centers (s)");
  flags.value(build, "--channel", "channel", "signal channel to render");
  flags.value(build, "--image-size", "image_size", "square image size in pixels");
  flags.value(build, "--line-width", "line_width", "trace width in pixels");
  flags.value(build, "--box-half-width-s", "box_half_width_s", "half width of beat boxes (s)");
  flags.on(build, "--debug-symbols", "debug_symbols", "draw beat symbols into a separate overlay");
  flags.off(build, "--no-augment", "augment", "skip grayscale and rotation augmentation");

  std::string dataset;
  auto* split = app.add_subcommand("split", "write holdout and k-fold frame lists");
  add_common(split, flags);
  split->add_option("--dataset", dataset, "dataset directory")->required();
  split->add_option("--out", out, "list directory (default: <dataset>/splits)");
  flags.value(split, "--ratios", "ratios", "train,val,test fractions");
  flags.value(split, "--k", "folds", "number of cross-validation folds");
  flags.value(split, "--strategy", "strategy", "image-stratified or patient-wise");

  std::string which_split;
  auto* detect = app.add_subcommand("detect", "write oracle detections (ground truth, confidence 1) for a dataset");
  add_common(detect, flags);
  detect->add_option("--dataset", dataset, "dataset directory")->required();
  detect->add_option("--split", which_split, "train, val, test or all")->default_val("all");
  detect->add_option("--out", out, "detections file (default: stdout)");

  std::string detections_file, format = "text";
  auto* eval = app.add_subcommand("eval", "score detections against dataset labels");
  add_common(eval, flags);
  eval->add_option("--dataset", dataset, "dataset directory")->required();
  eval->add_option("--detections", detections_file, "detections file")->required();
  eval->add_option("--split", which_split, "train, val, test or all")->default_val("all");
  eval->add_option("--format", format, "text, csv or json");
  eval->add_option("--out", out, "directory for report files and resolved config");
  flags.value(eval, "--iou", "match_iou", "IoU for per-class precision and recall");
  flags.value(eval, "--confusion-iou", "confusion_iou", "IoU for the confusion matrix");
  flags.value(eval, "--conf", "confidence_floor", "confidence floor for P/R and the confusion matrix");
  flags.value(eval, "--thresholds", "thresholds", "comma-separated IoU thresholds for mAP");

  std::vector<std::string> inputs;
  auto* report = app.add_subcommand("report", "render a JSON report, or a cross-validation table from several");
  add_common(report, flags);
  report->add_option("inputs", inputs, "report JSON files")->required();
  report->add_option("--format", format, "text, csv or json");
  report->add_option("--out", out, "output file (default: stdout)");

  SimulateInput sim;
  auto* simulate = app.add_subcommand("simulate", "replay a record through a detector and measure latency");
  add_common(simulate, flags);
  simulate->add_option("--record", sim.record, "record path without extension, e.g. data/100");
  simulate->add_flag("--synthetic", sim.synthetic, "use a generated 60 s record");
  simulate->add_option("--live", sim.live, "t_ms,adu sample stream file, or - for stdin");
  simulate->add_option("--fs", sim.live_fs, "sampling rate of the live stream");
  simulate->add_option("--format", sim.format, "text or json");
  simulate->add_option("--out", out, "directory for detections, latencies and the session report");
  flags.value(simulate, "--records-dir", "records_dir", "directory for bare record ids");
  flags.value(simulate, "--detector", "detector", "oracle, subprocess:<command> or weights:<file>");
  flags.value(simulate, "--speed", "speed", "realtime or max");
  flags.value(simulate, "--hop", "hop_s", "seconds between frames");
  flags.value(simulate, "--time-scale", "time_scale", "realtime: wall seconds per record second");
  flags.value(simulate, "--post", "post_processor", "none, nms or soft_nms");
  flags.value(simulate, "--nms-iou", "nms_iou", "IoU threshold for hard NMS");
  flags.value(simulate, "--frame-s", "frame_s", "window length in seconds");
  flags.value(simulate, "--iou", "match_iou", "IoU for per-class precision and recall");
  flags.value(simulate, "--conf", "confidence_floor", "confidence floor");

  int count = 3, first_id = 900;
  double duration = 60.0;
  auto* synth = app.add_subcommand("synth", "write synthetic WFDB records");
  add_common(synth, flags);
  synth->add_option("--out", out, "record directory")->required();
  synth->add_option("--count", count, "number of records");
  synth->add_option("--duration", duration, "record length in seconds");
  synth->add_option("--first-id", first_id, "id of the first record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const RunConfig cfg = flags.resolve();
    if (*ingest) return run_ingest(cfg, out);
    if (*build) return run_build(cfg, out);
    if (*split) return run_split(cfg, dataset, out);
    if (*detect) return run_detect(dataset, which_split, out);
    if (*eval) return run_eval(cfg, dataset, which_split, detections_file, format, out);
    if (*report) return run_report(inputs, format, out);
    if (*simulate) return run_simulate(cfg, sim, out);
    if (*synth) return run_synth(cfg, out, count, duration, first_id);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
