#pragma once

// Record replay as a sliding-window frame stream, pluggable detectors and the
// latency-measuring detection session.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/detect.hpp"
#include "ecgyolo/metrics.hpp"
#include "ecgyolo/render.hpp"
#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {

enum class Speed { realtime, max };
Speed parse_speed(std::string_view name);
std::string_view speed_name(Speed s) noexcept;

struct StreamOptions {
  double frame_s = 10.0;
  double hop_s = 1.0;
  Speed speed = Speed::max;
  double time_scale = 1.0;  // realtime only: wall seconds per record second
  int channel = 0;
  RenderStyle style;
};

// floor((num_samples - frame_len) / hop) + 1.
std::size_t frame_count(std::int64_t num_samples, std::int64_t frame_len, std::int64_t hop);

// Every window the stream emits, in order. Throws ConfigError for hop_s <= 0 and
// RecordTooShort when the record is shorter than one frame.
std::vector<FrameWindow> replay_windows(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                        const StreamOptions& options = {});

// Emits the windows in order, paced by the wall clock in realtime mode. `emit`
// receives each window and its scheduled emission time.
using Clock = std::chrono::steady_clock;
void replay(const SignalRecord& record, std::span<const ClassifiedBeat> beats, const StreamOptions& options,
            const std::function<void(FrameWindow&&, Clock::time_point)>& emit);

struct DetectorInput {
  std::string_view frame_id;
  const Image& image;
};

class DetectorPort {
 public:
  virtual ~DetectorPort() = default;
  virtual std::vector<Detection> detect(const DetectorInput& input) = 0;
  virtual std::string name() const = 0;
};

// Echoes ground truth with confidence 1.0. Stateless.
class OracleDetector : public DetectorPort {
 public:
  using Lookup = std::function<std::vector<BoundingBox>(std::string_view frame_id)>;
  explicit OracleDetector(Lookup lookup) : lookup_(std::move(lookup)) {}
  // Truth for every window of a replayed record.
  static OracleDetector for_record(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                   const StreamOptions& options = {});
  // Truth read from dataset labels.
  static OracleDetector for_labels(std::map<std::string, std::vector<BoundingBox>> labels);

  std::vector<Detection> detect(const DetectorInput& input) override;
  std::string name() const override { return "oracle"; }

 private:
  Lookup lookup_;
};

// Runs an external program speaking the frame line protocol on stdin/stdout:
//   request:  "FRAME <id> <png-byte-length>\n" followed by the PNG bytes
//   response: "DET <id> <n>\n" followed by n lines "class cx cy w h conf"
// The child persists across frames; a failed exchange throws and the next call
// starts a fresh child.
class SubprocessDetector : public DetectorPort {
 public:
  explicit SubprocessDetector(std::vector<std::string> argv, int timeout_ms = 10000);
  ~SubprocessDetector() override;
  SubprocessDetector(const SubprocessDetector&) = delete;
  SubprocessDetector& operator=(const SubprocessDetector&) = delete;

  std::vector<Detection> detect(const DetectorInput& input) override;
  std::string name() const override;

 private:
  void start();
  void stop() noexcept;
  std::string read_line();
  void write_all(const void* data, std::size_t size);

  std::vector<std::string> argv_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// YOLO-style exported graph (output [1, 4 + classes, anchors], pixel cxcywh).
// Available when built with OpenCV; otherwise construction throws UnsupportedFormat.
class WeightsDetector : public DetectorPort {
 public:
  explicit WeightsDetector(const std::filesystem::path& graph_file, double min_confidence = 0.001);
  ~WeightsDetector() override;
  std::vector<Detection> detect(const DetectorInput& input) override;
  std::string name() const override { return "weights"; }
  static bool available() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses a detector spec: "oracle", "subprocess:<command line>" or "weights:<file>".
struct DetectorSpec {
  enum class Kind { oracle, subprocess, weights } kind = Kind::oracle;
  std::string argument;
};
DetectorSpec parse_detector_spec(std::string_view spec);
std::vector<std::string> split_command_line(std::string_view command);

enum class PostProcessor { none, nms, soft_nms };
PostProcessor parse_post_processor(std::string_view name);
std::string_view post_processor_name(PostProcessor p) noexcept;

struct PostProcessOptions {
  PostProcessor kind = PostProcessor::soft_nms;
  double nms_iou = 0.7;
  double soft_sigma = 0.5;
  double score_floor = 0.001;
};
std::vector<Detection> post_process(std::span<const Detection> detections, const PostProcessOptions& options);

struct LatencyBreakdown {
  double preprocess_ms = 0.0;
  double inference_ms = 0.0;
  double postprocess_ms = 0.0;
  double total_ms = 0.0;
};

struct FrameResult {
  std::string frame_id;
  std::int64_t start_sample = 0;
  std::vector<Detection> detections;
  std::vector<BoundingBox> truths;
  LatencyBreakdown latency;
  bool failed = false;
  std::string error;
};

class SessionSink {
 public:
  virtual ~SessionSink() = default;
  virtual void on_frame(const FrameResult& result) = 0;
};

struct LatencyStats {
  double mean = 0.0, p50 = 0.0, p95 = 0.0, p99 = 0.0, max = 0.0;
};
// Linear interpolation between closest ranks.
LatencyStats latency_stats(std::vector<double> values);

struct SessionReport {
  std::string record_id;
  std::string detector;
  PostProcessor post_processor = PostProcessor::soft_nms;
  Speed speed = Speed::max;
  double frame_s = 10.0;
  double hop_s = 1.0;
  std::size_t frames_emitted = 0;
  std::size_t frames_processed = 0;
  std::size_t frames_dropped = 0;
  std::size_t frames_failed = 0;
  LatencyStats preprocess, inference, postprocess, total;
  LatencyStats overhead;  // total minus inference
  double wall_s = 0.0;
  double max_pacing_drift_ms = 0.0;
  std::optional<EvalReport> eval;
};

struct SessionOptions {
  StreamOptions stream;
  PostProcessOptions post;
  EvalOptions eval;
  bool evaluate = true;
};

// Producer renders frames and hands them to the detector through a one-slot
// handoff. In realtime mode a frame arriving while the slot is full is dropped;
// in max mode the producer waits.
SessionReport run_session(const SignalRecord& record, std::span<const ClassifiedBeat> beats, DetectorPort& detector,
                          const SessionOptions& options, SessionSink* sink = nullptr);

// JSON (evaluation report fields plus a "session" object) or text.
std::string render_session_report(const SessionReport& report, ReportFormat format);

// Live ingestion: newline-delimited "t_ms,adu" pairs. Time stamps must be
// non-decreasing; one channel at `sampling_rate`.
SignalRecord read_live_samples(std::istream& in, double sampling_rate, std::string record_id = "live");

}  // namespace ecgyolo
