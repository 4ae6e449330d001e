#pragma once

// Text interchange formats: YOLO label files and the detections file.
//
// Label file: one `class cx cy w h` line per box.
// Detections file: one `frame_id class cx cy w h confidence` line per detection.
// Numbers use 6-decimal fixed point, fields are separated by single spaces and
// every line ends with '\n'. Blank lines and lines starting with '#' are skipped
// when reading.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgyolo/detect.hpp"

namespace ecgyolo {

std::string fixed6(double value);

std::string format_label_line(const BoundingBox& box);
std::string format_label_file(std::span<const BoundingBox> boxes);
std::vector<BoundingBox> parse_label_file(std::string_view text);

std::string format_detection_line(std::string_view frame_id, const Detection& detection);
// frame id -> detections, in file order per frame.
using DetectionsByFrame = std::map<std::string, std::vector<Detection>>;
DetectionsByFrame parse_detections(std::string_view text);
std::string format_detections(const DetectionsByFrame& detections);

DetectionsByFrame read_detections_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ecgyolo
