#pragma once

// Windowing of records around ectopic beats, rasterization of a window to an
// image, per-beat bounding boxes and the image/box augmentations.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/detect.hpp"
#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {

struct WindowBeat {
  std::int64_t index = 0;  // relative to the window start
  AamiClass aami = AamiClass::N;
  char symbol = 'N';

  friend bool operator==(const WindowBeat&, const WindowBeat&) = default;
};

struct FrameWindow {
  std::string record_id;
  std::int64_t start_sample = 0;
  std::int64_t length_samples = 0;
  double sampling_rate = 360.0;
  std::vector<std::int16_t> samples;
  std::vector<WindowBeat> beats;

  // "<record>_<start sample, 9 digits>"; unique per record and start.
  std::string id() const;
};

struct WindowOptions {
  double frame_s = 10.0;
  double dedup_spacing_s = 2.5;
  int channel = 0;
};

std::int64_t frame_length_samples(double frame_s, double sampling_rate);

// Slices [start, start + length) of one channel and collects the beats inside it.
FrameWindow make_window(const SignalRecord& record, std::span<const ClassifiedBeat> beats, std::int64_t start,
                        std::int64_t length, int channel = 0);

// One window per non-N beat, centered on it, shifted to fit inside the record,
// skipping windows whose center is closer than dedup_spacing_s to an emitted one.
std::vector<FrameWindow> extract_windows(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                         const WindowOptions& options = {});

struct RenderStyle {
  int width = 640;
  int height = 640;
  double line_width = 2.0;  // pixels
  std::uint8_t foreground = 0;
  std::uint8_t background = 255;
  double vertical_margin = 0.05;  // fraction of height kept free above and below the trace
  double box_half_width_s = 0.35;
  double box_padding = 0.02;     // total vertical padding, fraction of frame height
  double min_box_height = 0.02;  // fraction of frame height
  bool debug_symbols = false;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h, std::uint8_t fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::uint8_t at(int x, int y, int channel) const {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
  friend bool operator==(const Image&, const Image&) = default;
};

struct Provenance {
  std::string record_id;
  std::int64_t start_sample = 0;
  bool augmented = false;
  std::uint64_t seed = 0;
  bool grayscale_applied = false;
  double rotation_deg = 0.0;
};

struct LabeledFrame {
  std::string id;
  Image image;
  // Symbol annotation layer (one byte per pixel); empty unless debug_symbols.
  std::vector<std::uint8_t> overlay;
  std::vector<BoundingBox> labels;
  Provenance provenance;
};

// Normalized vertical position of an amplitude under the window's min-max scaling.
class AmplitudeScale {
 public:
  AmplitudeScale(std::span<const std::int16_t> samples, double vertical_margin);
  double y(double adu) const noexcept;

 private:
  double min_ = 0.0;
  double max_ = 0.0;
  double margin_ = 0.0;
};

std::vector<BoundingBox> compute_boxes(const FrameWindow& window, const RenderStyle& style = {});
LabeledFrame render_frame(const FrameWindow& window, const RenderStyle& style = {});

struct AugmentOptions {
  double grayscale_probability = 0.75;
  double max_rotation_deg = 1.0;
};

struct AugmentDraw {
  bool grayscale = false;
  double angle_deg = 0.0;
};

// The random choices augment() makes for a seed.
AugmentDraw draw_augmentation(std::uint64_t seed, const AugmentOptions& options = {});

// Axis-aligned hull of the box's corners rotated about the frame center, clipped.
BoundingBox rotate_box(const BoundingBox& box, double angle_deg, int width = 640, int height = 640);
Image rotate_image(const Image& image, double angle_deg, std::uint8_t fill = 255);
Image to_grayscale(const Image& image);

LabeledFrame augment(const LabeledFrame& frame, std::uint64_t seed, const AugmentOptions& options = {});

// Per-frame seed derived from the run seed and the frame identity.
std::uint64_t frame_seed(std::uint64_t run_seed, std::string_view frame_id) noexcept;

std::vector<std::uint8_t> encode_png(const Image& image);

}  // namespace ecgyolo
