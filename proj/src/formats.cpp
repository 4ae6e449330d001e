#include "ecgyolo/formats.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/errors.hpp"
#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no, std::size_t field) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("bad number '" + std::string(s) + "'", line_no, field);
  return v;
}

int parse_class(std::string_view s, std::size_t line_no) {
  int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !class_from_id(v)) {
    throw ParseError("bad class id '" + std::string(s) + "'", line_no, 1);
  }
  return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

}  // namespace

std::string fixed6(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_label_line(const BoundingBox& b) {
  // Rounding the center and the size separately can push an edge box past the
  // frame by a few 1e-7; trim the size so the written box stays inside.
  auto fit = [](double center, double size) {
    const double c = std::round(center * 1e6) / 1e6;
    const double room = std::floor(2.0 * std::min(c, 1.0 - c) * 1e6 + 1e-6) / 1e6;
    return std::pair{c, std::max(0.0, std::min(std::round(size * 1e6) / 1e6, room))};
  };
  const auto [cx, w] = fit(b.cx, b.w);
  const auto [cy, h] = fit(b.cy, b.h);
  return std::to_string(b.class_id) + ' ' + fixed6(cx) + ' ' + fixed6(cy) + ' ' + fixed6(w) + ' ' + fixed6(h) + '\n';
}

std::string format_label_file(std::span<const BoundingBox> boxes) {
  std::string out;
  for (const auto& b : boxes) out += format_label_line(b);
  return out;
}

std::vector<BoundingBox> parse_label_file(std::string_view text) {
  std::vector<BoundingBox> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_fields(line);
    if (f.size() != 5) throw ParseError("label line needs 5 fields", line_no, 1);
    out.push_back({parse_class(f[0], line_no), parse_double(f[1], line_no, 2), parse_double(f[2], line_no, 3),
                   parse_double(f[3], line_no, 4), parse_double(f[4], line_no, 5)});
  });
  return out;
}

std::string format_detection_line(std::string_view frame_id, const Detection& d) {
  std::string out(frame_id);
  out += ' ';
  out += format_label_line(d.box);
  out.pop_back();
  out += ' ' + fixed6(d.confidence) + '\n';
  return out;
}

DetectionsByFrame parse_detections(std::string_view text) {
  DetectionsByFrame out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_fields(line);
    if (f.size() != 7) throw ParseError("detection line needs 7 fields", line_no, 1);
    Detection d;
    d.box = {parse_class(f[1], line_no), parse_double(f[2], line_no, 3), parse_double(f[3], line_no, 4),
             parse_double(f[4], line_no, 5), parse_double(f[5], line_no, 6)};
    d.confidence = parse_double(f[6], line_no, 7);
    if (d.confidence < 0.0 || d.confidence > 1.0) throw ParseError("confidence outside [0, 1]", line_no, 7);
    out[std::string(f[0])].push_back(d);
  });
  return out;
}

std::string format_detections(const DetectionsByFrame& detections) {
  std::string out;
  for (const auto& [frame, dets] : detections) {
    for (const auto& d : dets) out += format_detection_line(frame, d);
  }
  return out;
}

DetectionsByFrame read_detections_file(const std::filesystem::path& path) {
  try {
    return parse_detections(read_file_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ecgyolo
