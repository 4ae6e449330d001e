#include "ecgyolo/stream.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ecgyolo/errors.hpp"
#include "ecgyolo/formats.hpp"

#ifdef ECGYOLO_HAVE_OPENCV
#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>
#endif

namespace ecgyolo {
namespace {

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

std::int64_t hop_samples(double hop_s, double sampling_rate) {
  if (!(hop_s > 0.0)) throw ConfigError("hop must be positive, got " + std::to_string(hop_s));
  const auto hop = static_cast<std::int64_t>(std::llround(hop_s * sampling_rate));
  if (hop <= 0) throw ConfigError("hop of " + std::to_string(hop_s) + " s is shorter than one sample");
  return hop;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Speed parse_speed(std::string_view name) {
  if (name == "realtime") return Speed::realtime;
  if (name == "max") return Speed::max;
  throw ConfigError("unknown speed '" + std::string(name) + "' (realtime, max)");
}

std::string_view speed_name(Speed s) noexcept { return s == Speed::realtime ? "realtime" : "max"; }

std::size_t frame_count(std::int64_t num_samples, std::int64_t frame_len, std::int64_t hop) {
  if (hop <= 0) throw ConfigError("hop must be positive");
  if (frame_len <= 0) throw ConfigError("frame length must be positive");
  if (num_samples < frame_len) return 0;
  return static_cast<std::size_t>((num_samples - frame_len) / hop) + 1;
}

std::vector<FrameWindow> replay_windows(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                        const StreamOptions& options) {
  std::vector<FrameWindow> out;
  StreamOptions fast = options;
  fast.speed = Speed::max;
  replay(record, beats, fast, [&](FrameWindow&& w, Clock::time_point) { out.push_back(std::move(w)); });
  return out;
}

void replay(const SignalRecord& record, std::span<const ClassifiedBeat> beats, const StreamOptions& options,
            const std::function<void(FrameWindow&&, Clock::time_point)>& emit) {
  const auto hop = hop_samples(options.hop_s, record.sampling_rate);
  const auto length = frame_length_samples(options.frame_s, record.sampling_rate);
  if (length <= 0) throw ConfigError("frame length must be positive");
  if (record.num_samples < length) {
    throw RecordTooShort("record " + record.record_id + " lasts " + std::to_string(record.duration_s()) +
                         " s, shorter than one " + std::to_string(options.frame_s) + " s frame");
  }
  if (options.speed == Speed::realtime && !(options.time_scale > 0.0)) {
    throw ConfigError("time scale must be positive");
  }
  const auto n = frame_count(record.num_samples, length, hop);
  const auto t0 = Clock::now();
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t start = static_cast<std::int64_t>(k) * hop;
    Clock::time_point due = Clock::now();
    if (options.speed == Speed::realtime) {
      // The last sample of the window has been "captured" at (start + length) / fs.
      const double record_s = static_cast<double>(start + length) / record.sampling_rate;
      due = t0 + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(record_s * options.time_scale));
      std::this_thread::sleep_until(due);
    }
    emit(make_window(record, beats, start, length, options.channel), due);
  }
}

OracleDetector OracleDetector::for_record(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                          const StreamOptions& options) {
  std::map<std::string, std::vector<BoundingBox>> truth;
  for (const auto& w : replay_windows(record, beats, options)) truth.emplace(w.id(), compute_boxes(w, options.style));
  return for_labels(std::move(truth));
}

OracleDetector OracleDetector::for_labels(std::map<std::string, std::vector<BoundingBox>> labels) {
  auto shared = std::make_shared<const std::map<std::string, std::vector<BoundingBox>>>(std::move(labels));
  return OracleDetector([shared](std::string_view id) {
    auto it = shared->find(std::string(id));
    if (it == shared->end()) throw Error("oracle has no ground truth for frame " + std::string(id));
    return it->second;
  });
}

std::vector<Detection> OracleDetector::detect(const DetectorInput& input) {
  std::vector<Detection> out;
  for (const auto& b : lookup_(input.frame_id)) out.push_back({b, 1.0});
  return out;
}

SubprocessDetector::SubprocessDetector(std::vector<std::string> argv, int timeout_ms)
    : argv_(std::move(argv)), timeout_ms_(timeout_ms) {
  if (argv_.empty()) throw ConfigError("subprocess detector needs a command");
}

SubprocessDetector::~SubprocessDetector() { stop(); }

std::string SubprocessDetector::name() const { return "subprocess:" + argv_.front(); }

void SubprocessDetector::start() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(std::string("socketpair: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    _exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  to_child_ = fds[0];
  from_child_ = fds[0];
  buffer_.clear();
}

void SubprocessDetector::stop() noexcept {
  if (to_child_ >= 0) {
    ::shutdown(to_child_, SHUT_WR);
    ::close(to_child_);
  }
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void SubprocessDetector::write_all(const void* data, std::size_t size) {
  const auto* p = static_cast<const char*>(data);
  while (size > 0) {
    const auto n = ::send(to_child_, p, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("writing to detector: ") + std::strerror(errno));
    }
    p += n;
    size -= static_cast<std::size_t>(n);
  }
}

std::string SubprocessDetector::read_line() {
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) throw Error("detector did not answer within " + std::to_string(timeout_ms_) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(left));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[4096];
    const auto n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("reading from detector: ") + std::strerror(errno));
    }
    if (n == 0) throw Error("detector closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<Detection> SubprocessDetector::detect(const DetectorInput& input) {
  if (pid_ < 0) start();
  try {
    const auto png = encode_png(input.image);
    const std::string head = "FRAME " + std::string(input.frame_id) + " " + std::to_string(png.size()) + "\n";
    write_all(head.data(), head.size());
    write_all(png.data(), png.size());

    std::istringstream hs(read_line());
    std::string tag, id;
    long long n = -1;
    if (!(hs >> tag >> id >> n) || tag != "DET" || n < 0) throw Error("malformed detector reply header");
    if (id != input.frame_id) throw Error("detector answered for frame " + id + ", expected " + std::string(input.frame_id));
    std::vector<Detection> out;
    for (long long i = 0; i < n; ++i) {
      const std::string line = read_line();
      std::istringstream ls(line);
      Detection d;
      if (!(ls >> d.box.class_id >> d.box.cx >> d.box.cy >> d.box.w >> d.box.h >> d.confidence)) {
        throw Error("malformed detection line '" + line + "'");
      }
      if (d.box.class_id < 0 || d.box.class_id >= kNumClasses || !is_valid(d.box) || !(d.confidence >= 0.0) ||
          d.confidence > 1.0) {
        throw Error("detection out of range: '" + line + "'");
      }
      out.push_back(d);
    }
    return out;
  } catch (...) {
    stop();
    throw;
  }
}

#ifdef ECGYOLO_HAVE_OPENCV
struct WeightsDetector::Impl {
  cv::dnn::Net net;
  double min_confidence = 0.001;
};

WeightsDetector::WeightsDetector(const std::filesystem::path& graph_file, double min_confidence)
    : impl_(std::make_unique<Impl>()) {
  if (!std::filesystem::exists(graph_file)) throw IoError("no such graph file: " + graph_file.string());
  try {
    impl_->net = cv::dnn::readNetFromONNX(graph_file.string());
  } catch (const cv::Exception& e) {
    throw UnsupportedFormat("cannot load graph " + graph_file.string() + ": " + e.what());
  }
  impl_->min_confidence = min_confidence;
}

std::vector<Detection> WeightsDetector::detect(const DetectorInput& input) {
  const auto& image = input.image;
  cv::Mat rgb(image.height, image.width, CV_8UC3, const_cast<std::uint8_t*>(image.rgb.data()));
  constexpr int kInput = 640;
  cv::Mat blob = cv::dnn::blobFromImage(rgb, 1.0 / 255.0, cv::Size(kInput, kInput), cv::Scalar(), false, false);
  cv::Mat out;
  try {
    impl_->net.setInput(blob);
    out = impl_->net.forward();
  } catch (const cv::Exception& e) {
    throw Error(std::string("graph inference failed: ") + e.what());
  }
  if (out.dims != 3 || out.size[0] != 1) throw Error("graph output must have shape [1, 4 + classes, anchors]");
  int rows = out.size[1];
  int cols = out.size[2];
  cv::Mat m(rows, cols, CV_32F, out.ptr<float>());
  // [1, 4 + classes, anchors] or its transpose; prefer the axis matching our class count.
  const bool transposed = cols == 4 + kNumClasses ? rows != 4 + kNumClasses : rows > cols && rows != 4 + kNumClasses;
  if (transposed) {
    m = m.t();
    std::swap(rows, cols);
  }
  const int classes = rows - 4;
  if (classes <= 0) throw Error("graph output has no class rows");
  std::vector<Detection> dets;
  for (int a = 0; a < cols; ++a) {
    int best = 0;
    float score = m.at<float>(4, a);
    for (int c = 1; c < classes; ++c) {
      if (m.at<float>(4 + c, a) > score) {
        score = m.at<float>(4 + c, a);
        best = c;
      }
    }
    if (score < impl_->min_confidence || best >= kNumClasses) continue;
    BoundingBox b{best, m.at<float>(0, a) / kInput, m.at<float>(1, a) / kInput, m.at<float>(2, a) / kInput,
                  m.at<float>(3, a) / kInput};
    b = clip_to_unit(b);
    if (!is_valid(b)) continue;
    dets.push_back({b, std::min(1.0, static_cast<double>(score))});
  }
  return dets;
}

bool WeightsDetector::available() noexcept { return true; }
#else
struct WeightsDetector::Impl {};

WeightsDetector::WeightsDetector(const std::filesystem::path&, double) {
  throw UnsupportedFormat("this build has no graph runtime; rebuild with OpenCV to use weights detectors");
}

std::vector<Detection> WeightsDetector::detect(const DetectorInput&) { return {}; }

bool WeightsDetector::available() noexcept { return false; }
#endif

WeightsDetector::~WeightsDetector() = default;

std::vector<std::string> split_command_line(std::string_view command) {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (quote) {
      if (c == quote) quote = 0;
      else if (c == '\\' && quote == '"' && i + 1 < command.size()) cur += command[++i];
      else cur += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == '\\' && i + 1 < command.size()) {
      cur += command[++i];
      in_word = true;
    } else if (c == ' ' || c == '\t') {
      if (in_word) out.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quote) throw ConfigError("unterminated quote in command line");
  if (in_word) out.push_back(std::move(cur));
  return out;
}

DetectorSpec parse_detector_spec(std::string_view spec) {
  if (spec == "oracle") return {DetectorSpec::Kind::oracle, {}};
  const auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    const auto kind = spec.substr(0, colon);
    std::string arg(spec.substr(colon + 1));
    if (arg.empty()) throw ConfigError("detector spec '" + std::string(spec) + "' has no argument");
    if (kind == "subprocess") return {DetectorSpec::Kind::subprocess, arg};
    if (kind == "weights") return {DetectorSpec::Kind::weights, arg};
  }
  throw ConfigError("unknown detector '" + std::string(spec) + "' (oracle, subprocess:<command>, weights:<file>)");
}

PostProcessor parse_post_processor(std::string_view name) {
  if (name == "none") return PostProcessor::none;
  if (name == "nms") return PostProcessor::nms;
  if (name == "soft_nms" || name == "soft-nms") return PostProcessor::soft_nms;
  throw ConfigError("unknown post-processor '" + std::string(name) + "' (none, nms, soft_nms)");
}

std::string_view post_processor_name(PostProcessor p) noexcept {
  switch (p) {
    case PostProcessor::none: return "none";
    case PostProcessor::nms: return "nms";
    case PostProcessor::soft_nms: return "soft_nms";
  }
  return "none";
}

std::vector<Detection> post_process(std::span<const Detection> detections, const PostProcessOptions& options) {
  switch (options.kind) {
    case PostProcessor::nms: return nms(detections, options.nms_iou);
    case PostProcessor::soft_nms: return soft_nms(detections, options.soft_sigma, options.score_floor);
    case PostProcessor::none: break;
  }
  std::vector<Detection> out(detections.begin(), detections.end());
  std::stable_sort(out.begin(), out.end(), ranks_before);
  return out;
}

LatencyStats latency_stats(std::vector<double> values) {
  LatencyStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
  };
  s.p50 = q(0.50);
  s.p95 = q(0.95);
  s.p99 = q(0.99);
  s.max = values.back();
  return s;
}

SessionReport run_session(const SignalRecord& record, std::span<const ClassifiedBeat> beats, DetectorPort& detector,
                          const SessionOptions& options, SessionSink* sink) {
  struct Pending {
    LabeledFrame frame;
    std::int64_t start_sample = 0;
    Clock::time_point started;
    double preprocess_ms = 0.0;
  };

  SessionReport report;
  report.record_id = record.record_id;
  report.detector = detector.name();
  report.post_processor = options.post.kind;
  report.speed = options.stream.speed;
  report.frame_s = options.stream.frame_s;
  report.hop_s = options.stream.hop_s;

  std::mutex mu;
  std::condition_variable cv;
  std::optional<Pending> slot;
  bool producer_done = false;
  std::exception_ptr producer_error;
  std::size_t emitted = 0;
  std::size_t dropped = 0;
  double max_drift = 0.0;

  const auto session_start = Clock::now();
  std::thread producer([&] {
    try {
      replay(record, beats, options.stream, [&](FrameWindow&& window, Clock::time_point due) {
        const auto started = Clock::now();
        if (options.stream.speed == Speed::realtime) max_drift = std::max(max_drift, ms_between(due, started));
        Pending p;
        p.start_sample = window.start_sample;
        p.frame = render_frame(window, options.stream.style);
        p.started = started;
        p.preprocess_ms = ms_between(started, Clock::now());
        std::unique_lock lock(mu);
        ++emitted;
        if (options.stream.speed == Speed::realtime) {
          if (slot) {
            ++dropped;
            return;
          }
        } else {
          cv.wait(lock, [&] { return !slot.has_value(); });
        }
        slot = std::move(p);
        cv.notify_all();
      });
    } catch (...) {
      producer_error = std::current_exception();
    }
    std::lock_guard lock(mu);
    producer_done = true;
    cv.notify_all();
  });

  std::vector<EvalFrame> eval_frames;
  std::vector<double> pre, inf, post, total, overhead;
  for (;;) {
    Pending p;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slot.has_value() || producer_done; });
      if (!slot) break;
      p = std::move(*slot);
      slot.reset();
      cv.notify_all();
    }
    FrameResult r;
    r.frame_id = p.frame.id;
    r.start_sample = p.start_sample;
    r.truths = p.frame.labels;
    r.latency.preprocess_ms = p.preprocess_ms;
    const auto t_inf = Clock::now();
    std::vector<Detection> raw;
    try {
      raw = detector.detect({p.frame.id, p.frame.image});
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    const auto t_post = Clock::now();
    if (!r.failed) r.detections = post_process(raw, options.post);
    const auto t_end = Clock::now();
    r.latency.inference_ms = ms_between(t_inf, t_post);
    r.latency.postprocess_ms = ms_between(t_post, t_end);
    r.latency.total_ms = ms_between(p.started, t_end);

    ++report.frames_processed;
    if (r.failed) ++report.frames_failed;
    pre.push_back(r.latency.preprocess_ms);
    inf.push_back(r.latency.inference_ms);
    post.push_back(r.latency.postprocess_ms);
    total.push_back(r.latency.total_ms);
    overhead.push_back(std::max(0.0, r.latency.total_ms - r.latency.inference_ms));
    if (sink) sink->on_frame(r);
    eval_frames.push_back({std::move(r.frame_id), std::move(r.truths), std::move(r.detections)});
  }
  producer.join();
  if (producer_error) std::rethrow_exception(producer_error);

  report.wall_s = std::chrono::duration<double>(Clock::now() - session_start).count();
  report.frames_emitted = emitted;
  report.frames_dropped = dropped;
  report.max_pacing_drift_ms = max_drift;
  report.preprocess = latency_stats(std::move(pre));
  report.inference = latency_stats(std::move(inf));
  report.postprocess = latency_stats(std::move(post));
  report.total = latency_stats(std::move(total));
  report.overhead = latency_stats(std::move(overhead));
  if (options.evaluate) {
    report.eval = evaluate(eval_frames, options.eval);
    report.eval->split = "stream:" + record.record_id;
  }
  return report;
}

std::string render_session_report(const SessionReport& report, ReportFormat format) {
  using json = nlohmann::json;
  auto stats_json = [](const LatencyStats& s) {
    return json{{"mean", s.mean}, {"p50", s.p50}, {"p95", s.p95}, {"p99", s.p99}, {"max", s.max}};
  };
  if (format == ReportFormat::json || format == ReportFormat::csv) {
    json j = report.eval ? json::parse(render_report(*report.eval, ReportFormat::json)) : json::object();
    j["session"] = {{"record", report.record_id},
                    {"detector", report.detector},
                    {"post_processor", post_processor_name(report.post_processor)},
                    {"speed", speed_name(report.speed)},
                    {"frame_s", report.frame_s},
                    {"hop_s", report.hop_s},
                    {"frames_emitted", report.frames_emitted},
                    {"frames_processed", report.frames_processed},
                    {"frames_dropped", report.frames_dropped},
                    {"frames_failed", report.frames_failed},
                    {"wall_s", report.wall_s},
                    {"max_pacing_drift_ms", report.max_pacing_drift_ms},
                    {"latency_ms",
                     {{"preprocess", stats_json(report.preprocess)},
                      {"inference", stats_json(report.inference)},
                      {"postprocess", stats_json(report.postprocess)},
                      {"total", stats_json(report.total)},
                      {"pipeline_overhead", stats_json(report.overhead)}}}};
    return j.dump(1) + "\n";
  }

  std::ostringstream os;
  char buf[200];
  os << "Session " << report.record_id << ": detector " << report.detector << ", post-processor "
     << post_processor_name(report.post_processor) << ", speed " << speed_name(report.speed) << "\n";
  std::snprintf(buf, sizeof buf, "Frames: %zu emitted, %zu processed, %zu dropped, %zu failed (%.1f s frames, %.3f s hop)\n",
                report.frames_emitted, report.frames_processed, report.frames_dropped, report.frames_failed,
                report.frame_s, report.hop_s);
  os << buf;
  std::snprintf(buf, sizeof buf, "Wall time %.3f s\n", report.wall_s);
  os << buf;
  if (report.speed == Speed::realtime) {
    std::snprintf(buf, sizeof buf, "Max pacing drift %.3f ms\n", report.max_pacing_drift_ms);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "\n%-18s %10s %10s %10s %10s %10s\n", "Latency (ms)", "mean", "p50", "p95", "p99",
                "max");
  os << buf;
  auto row = [&](const char* name, const LatencyStats& s) {
    std::snprintf(buf, sizeof buf, "%-18s %10.3f %10.3f %10.3f %10.3f %10.3f\n", name, s.mean, s.p50, s.p95, s.p99,
                  s.max);
    os << buf;
  };
  row("preprocess", report.preprocess);
  row("inference", report.inference);
  row("postprocess", report.postprocess);
  row("total", report.total);
  row("pipeline overhead", report.overhead);
  if (report.eval) os << '\n' << render_report(*report.eval, ReportFormat::text);
  return os.str();
}

SignalRecord read_live_samples(std::istream& in, double sampling_rate, std::string record_id) {
  if (!(sampling_rate > 0.0)) throw ConfigError("sampling rate must be positive");
  SignalRecord r;
  r.record_id = std::move(record_id);
  r.sampling_rate = sampling_rate;
  ChannelInfo ch;
  ch.name = "live";
  r.channels.push_back(ch);
  r.samples.resize(1);
  std::string line;
  std::size_t line_no = 0;
  double last_t = -INFINITY;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (line_no == 1 && text == "t_ms,adu") continue;
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ParseError("expected 't_ms,adu'", line_no, 1);
    double t = 0.0;
    long adu = 0;
    try {
      std::size_t used = 0;
      const std::string ts = trim(std::string_view(text).substr(0, comma));
      t = std::stod(ts, &used);
      if (used != ts.size()) throw std::invalid_argument("t");
      const std::string as = trim(std::string_view(text).substr(comma + 1));
      adu = std::stol(as, &used);
      if (used != as.size()) throw std::invalid_argument("adu");
    } catch (const std::logic_error&) {
      throw ParseError("expected 't_ms,adu' with numeric fields", line_no, 1);
    }
    if (t < last_t) throw ParseError("time stamps must not decrease", line_no, 1);
    if (adu < -2048 || adu > 2047) throw ParseError("sample outside the 12-bit range", line_no, comma + 2);
    last_t = t;
    r.samples[0].push_back(static_cast<std::int16_t>(adu));
  }
  r.num_samples = static_cast<std::int64_t>(r.samples[0].size());
  return r;
}

}  // namespace ecgyolo
