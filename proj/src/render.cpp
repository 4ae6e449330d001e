#include "ecgyolo/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {
namespace {

// 5x7 bitmap glyphs for the debug symbol layer, one 5-bit row per entry.
struct Glyph {
  char symbol;
  std::array<std::uint8_t, 7> rows;
};

constexpr std::array<Glyph, 15> kGlyphs = {{
    {'N', {0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001, 0b10001}},
    {'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
    {'R', {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001}},
    {'e', {0b00000, 0b00000, 0b01110, 0b10001, 0b11111, 0b10000, 0b01110}},
    {'j', {0b00010, 0b00000, 0b00110, 0b00010, 0b00010, 0b10010, 0b01100}},
    {'A', {0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
    {'a', {0b00000, 0b00000, 0b01110, 0b00001, 0b01111, 0b10001, 0b01111}},
    {'J', {0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100}},
    {'S', {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110}},
    {'V', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100}},
    {'E', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111}},
    {'F', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000}},
    {'/', {0b00001, 0b00010, 0b00010, 0b00100, 0b01000, 0b01000, 0b10000}},
    {'f', {0b00110, 0b01001, 0b01000, 0b11100, 0b01000, 0b01000, 0b01000}},
    {'Q', {0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101}},
}};

constexpr std::array<std::uint8_t, 7> kUnknownGlyph = {0b11111, 0b10001, 0b10001, 0b10001,
                                                       0b10001, 0b10001, 0b11111};

const std::array<std::uint8_t, 7>& glyph_for(char c) {
  for (const auto& g : kGlyphs) {
    if (g.symbol == c) return g.rows;
  }
  return kUnknownGlyph;
}

void draw_glyph(std::vector<std::uint8_t>& layer, int width, int height, char symbol, int left, int top) {
  constexpr int scale = 2;
  const auto& rows = glyph_for(symbol);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (!(rows[static_cast<std::size_t>(r)] & (1u << (4 - c)))) continue;
      for (int dy = 0; dy < scale; ++dy) {
        for (int dx = 0; dx < scale; ++dx) {
          const int x = left + c * scale + dx;
          const int y = top + r * scale + dy;
          if (x >= 0 && x < width && y >= 0 && y < height) layer[static_cast<std::size_t>(y) * width + x] = 1;
        }
      }
    }
  }
}

// Paints every pixel whose center lies within `radius` of segment p0-p1.
void stroke_segment(std::vector<std::uint8_t>& mask, int width, int height, double x0, double y0, double x1,
                    double y1, double radius) {
  const int px_lo = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - radius)));
  const int px_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(x0, x1) + radius)));
  const int py_lo = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - radius)));
  const int py_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(y0, y1) + radius)));
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  const double r2 = radius * radius;
  for (int py = py_lo; py <= py_hi; ++py) {
    const double cy = py + 0.5;
    for (int px = px_lo; px <= px_hi; ++px) {
      const double cx = px + 0.5;
      double t = len2 > 0.0 ? ((cx - x0) * dx + (cy - y0) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double ex = x0 + t * dx - cx;
      const double ey = y0 + t * dy - cy;
      if (ex * ex + ey * ey <= r2) mask[static_cast<std::size_t>(py) * width + px] = 1;
    }
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// mt19937_64 output is fully specified; std distributions are not.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string FrameWindow::id() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%09lld", static_cast<long long>(start_sample));
  return record_id + buf;
}

std::int64_t frame_length_samples(double frame_s, double sampling_rate) {
  return static_cast<std::int64_t>(std::llround(frame_s * sampling_rate));
}

FrameWindow make_window(const SignalRecord& record, std::span<const ClassifiedBeat> beats, std::int64_t start,
                        std::int64_t length, int channel) {
  if (channel < 0 || channel >= record.num_channels()) {
    throw ConfigError("record " + record.record_id + " has no channel " + std::to_string(channel));
  }
  if (start < 0 || length <= 0 || start + length > record.num_samples) {
    throw Error("window [" + std::to_string(start) + ", " + std::to_string(start + length) + ") outside record " +
                record.record_id);
  }
  FrameWindow w;
  w.record_id = record.record_id;
  w.start_sample = start;
  w.length_samples = length;
  w.sampling_rate = record.sampling_rate;
  const auto& src = record.samples[static_cast<std::size_t>(channel)];
  w.samples.assign(src.begin() + start, src.begin() + start + length);
  auto first = std::lower_bound(beats.begin(), beats.end(), start,
                                [](const ClassifiedBeat& b, std::int64_t s) { return b.sample_index < s; });
  for (auto it = first; it != beats.end() && it->sample_index < start + length; ++it) {
    w.beats.push_back({it->sample_index - start, it->aami, it->symbol});
  }
  return w;
}

std::vector<FrameWindow> extract_windows(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                         const WindowOptions& options) {
  if (options.dedup_spacing_s < 0.0) throw ConfigError("dedup spacing must be >= 0");
  const std::int64_t length = frame_length_samples(options.frame_s, record.sampling_rate);
  if (length <= 0) throw ConfigError("frame length must be positive");
  if (record.num_samples < length) {
    throw RecordTooShort("record " + record.record_id + " has " + std::to_string(record.num_samples) +
                         " samples, a window needs " + std::to_string(length));
  }
  const double min_spacing = options.dedup_spacing_s * record.sampling_rate;
  const std::int64_t last_start = record.num_samples - length;

  std::vector<FrameWindow> out;
  std::vector<std::int64_t> centers;
  for (const auto& beat : beats) {
    if (beat.aami == AamiClass::N) continue;
    const std::int64_t start = std::clamp<std::int64_t>(beat.sample_index - length / 2, 0, last_start);
    const std::int64_t center = start + length / 2;
    const bool duplicate = std::any_of(centers.begin(), centers.end(), [&](std::int64_t c) {
      return static_cast<double>(std::llabs(center - c)) < min_spacing;
    });
    if (duplicate) continue;
    centers.push_back(center);
    out.push_back(make_window(record, beats, start, length, options.channel));
  }
  return out;
}

AmplitudeScale::AmplitudeScale(std::span<const std::int16_t> samples, double vertical_margin)
    : margin_(vertical_margin) {
  if (!samples.empty()) {
    auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    min_ = *lo;
    max_ = *hi;
  }
}

double AmplitudeScale::y(double adu) const noexcept {
  if (max_ <= min_) return 0.5;
  return margin_ + (max_ - adu) / (max_ - min_) * (1.0 - 2.0 * margin_);
}

std::vector<BoundingBox> compute_boxes(const FrameWindow& window, const RenderStyle& style) {
  const AmplitudeScale scale(window.samples, style.vertical_margin);
  const double length = static_cast<double>(window.length_samples);
  const double half = style.box_half_width_s * window.sampling_rate;
  const auto last = static_cast<std::int64_t>(window.samples.size()) - 1;

  std::vector<BoundingBox> boxes;
  boxes.reserve(window.beats.size());
  for (const auto& beat : window.beats) {
    const double r = static_cast<double>(beat.index);
    const auto lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(r - half)), 0, last);
    const auto hi = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(r + half)), 0, last);
    auto [mn, mx] = std::minmax_element(window.samples.begin() + lo, window.samples.begin() + hi + 1);
    double top = scale.y(*mx) - style.box_padding / 2;
    double bottom = scale.y(*mn) + style.box_padding / 2;
    if (bottom - top < style.min_box_height) {
      const double mid = (top + bottom) / 2;
      top = mid - style.min_box_height / 2;
      bottom = mid + style.min_box_height / 2;
    }
    const BoundingBox raw =
        BoundingBox::from_corners(class_id(beat.aami), (r - half) / length, top, (r + half) / length, bottom);
    boxes.push_back(clip_to_unit(raw));
  }
  return boxes;
}

LabeledFrame render_frame(const FrameWindow& window, const RenderStyle& style) {
  if (style.width <= 0 || style.height <= 0) throw ConfigError("frame size must be positive");
  if (style.line_width <= 0.0) throw ConfigError("line width must be positive");
  const int w = style.width;
  const int h = style.height;
  const AmplitudeScale scale(window.samples, style.vertical_margin);
  const double length = static_cast<double>(window.length_samples);

  std::vector<std::uint8_t> ink(static_cast<std::size_t>(w) * h, 0);
  const double radius = style.line_width / 2;
  auto px = [&](std::size_t i) { return static_cast<double>(i) / length * w; };
  auto py = [&](std::size_t i) { return scale.y(window.samples[i]) * h; };
  if (window.samples.size() == 1) stroke_segment(ink, w, h, px(0), py(0), px(0), py(0), radius);
  for (std::size_t i = 1; i < window.samples.size(); ++i) {
    stroke_segment(ink, w, h, px(i - 1), py(i - 1), px(i), py(i), radius);
  }

  LabeledFrame frame;
  frame.id = window.id();
  frame.labels = compute_boxes(window, style);
  frame.provenance.record_id = window.record_id;
  frame.provenance.start_sample = window.start_sample;

  if (style.debug_symbols) {
    frame.overlay.assign(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t b = 0; b < window.beats.size(); ++b) {
      const auto& box = frame.labels[b];
      const int left = static_cast<int>(std::lround(box.cx * w)) - 5;
      const int top = std::max(0, static_cast<int>(std::lround(box.top() * h)) - 16);
      draw_glyph(frame.overlay, w, h, window.beats[b].symbol, left, top);
    }
  }

  frame.image = Image(w, h, style.background);
  for (std::size_t i = 0; i < ink.size(); ++i) {
    if (ink[i]) {
      frame.image.rgb[i * 3] = style.foreground;
      frame.image.rgb[i * 3 + 1] = style.foreground;
      frame.image.rgb[i * 3 + 2] = style.foreground;
    }
  }
  return frame;
}

AugmentDraw draw_augmentation(std::uint64_t seed, const AugmentOptions& options) {
  std::mt19937_64 rng(seed);
  AugmentDraw d;
  d.grayscale = unit_draw(rng) < options.grayscale_probability;
  d.angle_deg = (2.0 * unit_draw(rng) - 1.0) * options.max_rotation_deg;
  return d;
}

BoundingBox rotate_box(const BoundingBox& box, double angle_deg, int width, int height) {
  if (angle_deg == 0.0) return box;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  const std::array<std::array<double, 2>, 4> corners = {{{box.left(), box.top()},
                                                         {box.right(), box.top()},
                                                         {box.right(), box.bottom()},
                                                         {box.left(), box.bottom()}}};
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& p : corners) {
    const double dx = p[0] * width - cx;
    const double dy = p[1] * height - cy;
    const double rx = (cx + c * dx - s * dy) / width;
    const double ry = (cy + s * dx + c * dy) / height;
    x0 = std::min(x0, rx);
    x1 = std::max(x1, rx);
    y0 = std::min(y0, ry);
    y1 = std::max(y1, ry);
  }
  return clip_to_unit(BoundingBox::from_corners(box.class_id, x0, y0, x1, y1));
}

Image rotate_image(const Image& image, double angle_deg, std::uint8_t fill) {
  if (angle_deg == 0.0) return image;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cx = image.width / 2.0;
  const double cy = image.height / 2.0;
  Image out(image.width, image.height, fill);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      // inverse rotation of the output pixel center
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double sx = cx + c * dx + s * dy;
      const double sy = cy - s * dx + c * dy;
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      if (ix < 0 || iy < 0 || ix >= image.width || iy >= image.height) continue;
      const std::size_t src = (static_cast<std::size_t>(iy) * image.width + ix) * 3;
      const std::size_t dst = (static_cast<std::size_t>(y) * image.width + x) * 3;
      std::copy_n(image.rgb.begin() + static_cast<std::ptrdiff_t>(src), 3,
                  out.rgb.begin() + static_cast<std::ptrdiff_t>(dst));
    }
  }
  return out;
}

Image to_grayscale(const Image& image) {
  Image out = image;
  for (std::size_t i = 0; i + 2 < out.rgb.size(); i += 3) {
    const unsigned g = (299u * out.rgb[i] + 587u * out.rgb[i + 1] + 114u * out.rgb[i + 2] + 500u) / 1000u;
    out.rgb[i] = out.rgb[i + 1] = out.rgb[i + 2] = static_cast<std::uint8_t>(g);
  }
  return out;
}

LabeledFrame augment(const LabeledFrame& frame, std::uint64_t seed, const AugmentOptions& options) {
  const AugmentDraw draw = draw_augmentation(seed, options);
  LabeledFrame out;
  out.id = frame.id;
  out.provenance = frame.provenance;
  out.provenance.augmented = true;
  out.provenance.seed = seed;
  out.provenance.grayscale_applied = draw.grayscale;
  out.provenance.rotation_deg = draw.angle_deg;

  const Image base = draw.grayscale ? to_grayscale(frame.image) : frame.image;
  out.image = rotate_image(base, draw.angle_deg, 255);
  if (!frame.overlay.empty()) {
    Image layer(frame.image.width, frame.image.height, 0);
    for (std::size_t i = 0; i < frame.overlay.size(); ++i) layer.rgb[i * 3] = frame.overlay[i];
    layer = rotate_image(layer, draw.angle_deg, 0);
    out.overlay.resize(frame.overlay.size());
    for (std::size_t i = 0; i < out.overlay.size(); ++i) out.overlay[i] = layer.rgb[i * 3];
  }
  out.labels.reserve(frame.labels.size());
  for (const auto& box : frame.labels) {
    out.labels.push_back(rotate_box(box, draw.angle_deg, frame.image.width, frame.image.height));
  }
  return out;
}

std::uint64_t frame_seed(std::uint64_t run_seed, std::string_view frame_id) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char ch : frame_id) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return splitmix64(run_seed ^ splitmix64(h));
}

}  // namespace ecgyolo
