#pragma once

// Run configuration: a flat `key = value` text file. Flags given on the command
// line override file values; every run writes the resolved file next to its
// outputs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecgyolo/dataset.hpp"
#include "ecgyolo/metrics.hpp"
#include "ecgyolo/split.hpp"
#include "ecgyolo/stream.hpp"

namespace ecgyolo {

struct RunConfig {
  // data
  std::string records_dir;
  std::vector<std::string> records;  // empty: all records in records_dir
  bool exclude_paced = true;         // drop records 102, 104, 107, 217
  std::string symbol_map;            // optional CSV overriding the standard map

  // windows and rendering
  double frame_s = 10.0;
  double dedup_spacing_s = 2.5;
  int channel = 0;
  int image_size = 640;
  double line_width = 2.0;
  double box_half_width_s = 0.35;
  double box_padding = 0.02;
  double min_box_height = 0.02;
  bool debug_symbols = false;

  // augmentation
  bool augment = true;
  double grayscale_probability = 0.75;
  double max_rotation_deg = 1.0;

  // splits
  std::array<double, 3> ratios{0.82, 0.12, 0.06};
  int folds = 10;
  SplitStrategy strategy = SplitStrategy::image_stratified;

  // evaluation
  double match_iou = 0.5;
  double confusion_iou = 0.45;
  double confidence_floor = 0.25;
  std::vector<double> thresholds = default_iou_thresholds();

  // streaming
  double hop_s = 1.0;
  Speed speed = Speed::max;
  double time_scale = 1.0;
  PostProcessor post_processor = PostProcessor::soft_nms;
  double nms_iou = 0.7;
  std::string detector = "oracle";

  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Applies one `key = value` assignment; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

RunConfig parse_config(std::string_view text);
RunConfig read_config(const std::filesystem::path& path);
// Every key, one per line, in a fixed order; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

inline constexpr const char* kResolvedConfigName = "run.cfg";

WindowOptions window_options(const RunConfig& config);
RenderStyle render_style(const RunConfig& config);
AugmentOptions augment_options(const RunConfig& config);
BuildOptions build_options(const RunConfig& config);
EvalOptions eval_options(const RunConfig& config);
SessionOptions session_options(const RunConfig& config);

std::vector<double> parse_double_list(std::string_view text);

}  // namespace ecgyolo
