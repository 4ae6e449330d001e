#include "ecgyolo/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "ecgyolo/errors.hpp"
#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string num(double v) {
  // Shortest text that parses back to the same double.
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto s = trim(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  std::int64_t out = 0;
  const auto s = trim(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto s = trim(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + s + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  const auto s = trim(v);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + s + "'");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is{std::string(v)};
  while (std::getline(is, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join(const std::vector<double>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + num(items[i]);
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double("list", item));
  return out;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "records_dir") c.records_dir = value;
  else if (key == "records") c.records = split_list(value);
  else if (key == "exclude_paced") c.exclude_paced = to_bool(key, value);
  else if (key == "symbol_map") c.symbol_map = value;
  else if (key == "frame_s") {
    c.frame_s = to_double(key, value);
    require(c.frame_s > 0, "frame_s must be positive");
  } else if (key == "dedup_spacing_s") {
    c.dedup_spacing_s = to_double(key, value);
    require(c.dedup_spacing_s >= 0, "dedup_spacing_s must not be negative");
  } else if (key == "channel") {
    c.channel = static_cast<int>(to_int(key, value));
    require(c.channel >= 0, "channel must not be negative");
  } else if (key == "image_size") {
    c.image_size = static_cast<int>(to_int(key, value));
    require(c.image_size >= 16 && c.image_size <= 8192, "image_size must be within [16, 8192]");
  } else if (key == "line_width") {
    c.line_width = to_double(key, value);
    require(c.line_width > 0, "line_width must be positive");
  } else if (key == "box_half_width_s") {
    c.box_half_width_s = to_double(key, value);
    require(c.box_half_width_s > 0, "box_half_width_s must be positive");
  } else if (key == "box_padding") {
    c.box_padding = to_double(key, value);
    require(c.box_padding >= 0 && c.box_padding < 1, "box_padding must be within [0, 1)");
  } else if (key == "min_box_height") {
    c.min_box_height = to_double(key, value);
    require(c.min_box_height > 0 && c.min_box_height <= 1, "min_box_height must be within (0, 1]");
  } else if (key == "debug_symbols") c.debug_symbols = to_bool(key, value);
  else if (key == "augment") c.augment = to_bool(key, value);
  else if (key == "grayscale_probability") {
    c.grayscale_probability = to_double(key, value);
    require(c.grayscale_probability >= 0 && c.grayscale_probability <= 1, "grayscale_probability must be within [0, 1]");
  } else if (key == "max_rotation_deg") {
    c.max_rotation_deg = to_double(key, value);
    require(c.max_rotation_deg >= 0 && c.max_rotation_deg <= 45, "max_rotation_deg must be within [0, 45]");
  } else if (key == "ratios") {
    const auto r = parse_double_list(value);
    require(r.size() == 3, "ratios needs three values (train,val,test)");
    c.ratios = {r[0], r[1], r[2]};
  } else if (key == "folds") {
    c.folds = static_cast<int>(to_int(key, value));
    require(c.folds >= 2, "folds must be at least 2");
  } else if (key == "strategy") c.strategy = parse_strategy(value);
  else if (key == "match_iou") {
    c.match_iou = to_double(key, value);
    require(c.match_iou > 0 && c.match_iou <= 1, "match_iou must be within (0, 1]");
  } else if (key == "confusion_iou") {
    c.confusion_iou = to_double(key, value);
    require(c.confusion_iou > 0 && c.confusion_iou <= 1, "confusion_iou must be within (0, 1]");
  } else if (key == "confidence_floor") {
    c.confidence_floor = to_double(key, value);
    require(c.confidence_floor >= 0 && c.confidence_floor <= 1, "confidence_floor must be within [0, 1]");
  } else if (key == "thresholds") {
    c.thresholds = parse_double_list(value);
    require(!c.thresholds.empty(), "thresholds must list at least one IoU");
    for (double t : c.thresholds) require(t > 0 && t <= 1, "IoU thresholds must be within (0, 1]");
  } else if (key == "hop_s") {
    c.hop_s = to_double(key, value);
    require(c.hop_s > 0, "hop_s must be positive");
  } else if (key == "speed") c.speed = parse_speed(value);
  else if (key == "time_scale") {
    c.time_scale = to_double(key, value);
    require(c.time_scale > 0, "time_scale must be positive");
  } else if (key == "post_processor") c.post_processor = parse_post_processor(value);
  else if (key == "nms_iou") {
    c.nms_iou = to_double(key, value);
    require(c.nms_iou > 0 && c.nms_iou <= 1, "nms_iou must be within (0, 1]");
  } else if (key == "detector") {
    parse_detector_spec(value);
    c.detector = value;
  } else if (key == "seed") c.seed = to_uint(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      set_config_value(c, trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

RunConfig read_config(const std::filesystem::path& path) { return parse_config(read_file_text(path)); }

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  kv("records_dir", c.records_dir);
  kv("records", join(c.records));
  kv("exclude_paced", b(c.exclude_paced));
  kv("symbol_map", c.symbol_map);
  kv("frame_s", num(c.frame_s));
  kv("dedup_spacing_s", num(c.dedup_spacing_s));
  kv("channel", std::to_string(c.channel));
  kv("image_size", std::to_string(c.image_size));
  kv("line_width", num(c.line_width));
  kv("box_half_width_s", num(c.box_half_width_s));
  kv("box_padding", num(c.box_padding));
  kv("min_box_height", num(c.min_box_height));
  kv("debug_symbols", b(c.debug_symbols));
  kv("augment", b(c.augment));
  kv("grayscale_probability", num(c.grayscale_probability));
  kv("max_rotation_deg", num(c.max_rotation_deg));
  kv("ratios", join(std::vector<double>(c.ratios.begin(), c.ratios.end())));
  kv("folds", std::to_string(c.folds));
  kv("strategy", std::string(strategy_name(c.strategy)));
  kv("match_iou", num(c.match_iou));
  kv("confusion_iou", num(c.confusion_iou));
  kv("confidence_floor", num(c.confidence_floor));
  kv("thresholds", join(c.thresholds));
  kv("hop_s", num(c.hop_s));
  kv("speed", std::string(speed_name(c.speed)));
  kv("time_scale", num(c.time_scale));
  kv("post_processor", std::string(post_processor_name(c.post_processor)));
  kv("nms_iou", num(c.nms_iou));
  kv("detector", c.detector);
  kv("seed", std::to_string(c.seed));
  return os.str();
}

WindowOptions window_options(const RunConfig& c) { return {c.frame_s, c.dedup_spacing_s, c.channel}; }

RenderStyle render_style(const RunConfig& c) {
  RenderStyle s;
  s.width = c.image_size;
  s.height = c.image_size;
  s.line_width = c.line_width;
  s.box_half_width_s = c.box_half_width_s;
  s.box_padding = c.box_padding;
  s.min_box_height = c.min_box_height;
  s.debug_symbols = c.debug_symbols;
  return s;
}

AugmentOptions augment_options(const RunConfig& c) { return {c.grayscale_probability, c.max_rotation_deg}; }

BuildOptions build_options(const RunConfig& c) {
  BuildOptions o;
  o.records_dir = c.records_dir;
  o.record_ids = c.records;
  if (!c.exclude_paced) o.excluded_records.clear();
  if (!c.symbol_map.empty()) o.symbol_map = SymbolMap::from_csv(read_file_text(c.symbol_map));
  o.window = window_options(c);
  o.style = render_style(c);
  o.augment = c.augment;
  o.augment_options = augment_options(c);
  o.seed = c.seed;
  return o;
}

EvalOptions eval_options(const RunConfig& c) {
  EvalOptions o;
  o.match_iou = c.match_iou;
  o.confusion_iou = c.confusion_iou;
  o.confidence_floor = c.confidence_floor;
  o.thresholds = c.thresholds;
  return o;
}

SessionOptions session_options(const RunConfig& c) {
  SessionOptions o;
  o.stream.frame_s = c.frame_s;
  o.stream.hop_s = c.hop_s;
  o.stream.speed = c.speed;
  o.stream.time_scale = c.time_scale;
  o.stream.channel = c.channel;
  o.stream.style = render_style(c);
  o.post.kind = c.post_processor;
  o.post.nms_iou = c.nms_iou;
  o.eval = eval_options(c);
  return o;
}

}  // namespace ecgyolo
