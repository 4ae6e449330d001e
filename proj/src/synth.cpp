#include "ecgyolo/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {
namespace {

struct Wave {
  double offset_s;
  double amplitude_mv;
  double width_s;
};

struct BeatShape {
  char symbol;
  double rr_factor;    // multiplier on the interval preceding the beat
  double next_factor;  // multiplier on the interval following it
  std::array<Wave, 6> waves;
  int num_waves;
};

const BeatShape& shape_for(char symbol) {
  static const BeatShape normal{'N', 1.0, 1.0,
                                {{{-0.20, 0.15, 0.025},
                                  {-0.035, -0.10, 0.010},
                                  {0.0, 1.20, 0.012},
                                  {0.035, -0.25, 0.012},
                                  {0.25, 0.30, 0.045}}},
                                5};
  static const BeatShape atrial{'A', 0.65, 1.05,
                                {{{-0.16, -0.08, 0.020},
                                  {-0.035, -0.10, 0.010},
                                  {0.0, 1.10, 0.012},
                                  {0.035, -0.25, 0.012},
                                  {0.24, 0.25, 0.040}}},
                                5};
  static const BeatShape ventricular{'V', 0.70, 1.35,
                                     {{{0.0, 1.60, 0.035}, {0.08, -0.60, 0.040}, {0.32, -0.45, 0.060}}},
                                     3};
  static const BeatShape fusion{'F', 0.90, 1.10,
                                {{{-0.20, 0.06, 0.025},
                                  {0.0, 1.40, 0.022},
                                  {0.05, -0.40, 0.025},
                                  {0.28, -0.10, 0.050}}},
                                4};
  static const BeatShape paced{'/', 1.0, 1.0,
                               {{{-0.06, 1.00, 0.002},
                                 {0.0, 1.00, 0.030},
                                 {0.07, -0.50, 0.035},
                                 {0.30, 0.35, 0.050}}},
                               4};
  switch (symbol) {
    case 'A': return atrial;
    case 'V': return ventricular;
    case 'F': return fusion;
    case '/': return paced;
    default: return normal;
  }
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    // Box-Muller keeps the stream identical across standard libraries.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

SynthRecord synthesize_record(const SynthOptions& o) {
  if (!(o.sampling_rate > 0) || !(o.duration_s > 0) || o.num_channels < 1 || o.num_channels > 4 ||
      !(o.heart_rate_bpm > 0)) {
    throw ConfigError("invalid synthetic record options");
  }
  const double p_total = o.p_supraventricular + o.p_ventricular + o.p_fusion + o.p_paced;
  if (p_total < 0 || p_total > 1) throw ConfigError("ectopic beat probabilities must sum to at most 1");

  Rng rng(o.seed);
  const auto n = static_cast<std::int64_t>(std::llround(o.duration_s * o.sampling_rate));
  const double base_rr = 60.0 / o.heart_rate_bpm;

  struct Beat {
    double t;
    char symbol;
  };
  std::vector<Beat> beats;
  double t = 0.6;
  double next_factor = 1.0;
  while (true) {
    const double u = rng.uniform();
    char symbol = 'N';
    double acc = o.p_supraventricular;
    if (u < acc) symbol = 'A';
    else if (u < (acc += o.p_ventricular)) symbol = 'V';
    else if (u < (acc += o.p_fusion)) symbol = 'F';
    else if (u < (acc += o.p_paced)) symbol = '/';
    const auto& shape = shape_for(symbol);
    const double jitter = 1.0 + 0.06 * (rng.uniform() - 0.5);
    if (!beats.empty()) t += base_rr * jitter * shape.rr_factor * next_factor;
    if (t > o.duration_s - 0.5) break;
    beats.push_back({t, symbol});
    next_factor = shape.next_factor;
  }

  SynthRecord out;
  auto& rec = out.record;
  rec.record_id = o.record_id;
  rec.sampling_rate = o.sampling_rate;
  rec.num_samples = n;
  static const char* kNames[] = {"MLII", "V1", "V2", "V5"};
  std::vector<std::vector<double>> mv(static_cast<std::size_t>(o.num_channels), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int c = 0; c < o.num_channels; ++c) {
    ChannelInfo ch;
    ch.name = kNames[c];
    ch.adc_gain = 200.0;
    ch.adc_baseline = 0;
    ch.adc_zero = 0;
    ch.adc_resolution = 12;
    rec.channels.push_back(ch);
  }

  for (const auto& beat : beats) {
    const auto& shape = shape_for(beat.symbol);
    const double scale = 1.0 + 0.05 * (rng.uniform() - 0.5);
    const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>((beat.t - 0.6) * o.sampling_rate));
    const auto hi = std::min<std::int64_t>(n, static_cast<std::int64_t>((beat.t + 0.7) * o.sampling_rate) + 1);
    for (int w = 0; w < shape.num_waves; ++w) {
      const auto& wave = shape.waves[static_cast<std::size_t>(w)];
      const double center = beat.t + wave.offset_s;
      for (std::int64_t i = lo; i < hi; ++i) {
        const double d = (static_cast<double>(i) / o.sampling_rate - center) / wave.width_s;
        if (std::abs(d) > 8.0) continue;
        const double v = wave.amplitude_mv * scale * std::exp(-0.5 * d * d);
        for (int c = 0; c < o.num_channels; ++c) {
          // Secondary leads see a damped, partly inverted projection.
          const double gain = c == 0 ? 1.0 : (w % 2 == 0 ? 0.6 : -0.4) / static_cast<double>(c);
          mv[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] += gain * v;
        }
      }
    }
  }

  rec.samples.resize(static_cast<std::size_t>(o.num_channels));
  for (int c = 0; c < o.num_channels; ++c) {
    auto& dst = rec.samples[static_cast<std::size_t>(c)];
    dst.resize(static_cast<std::size_t>(n));
    const double phase = 0.7 * c;
    for (std::int64_t i = 0; i < n; ++i) {
      const double ts = static_cast<double>(i) / o.sampling_rate;
      const double wander = 0.05 * std::sin(2.0 * std::numbers::pi * 0.25 * ts + phase);
      const double v = mv[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] + wander + o.noise_mv * rng.normal();
      const long adu = std::lround(200.0 * v);
      dst[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(std::clamp<long>(adu, -2048, 2047));
    }
  }

  BeatAnnotation rhythm;
  rhythm.sample_index = 1;
  rhythm.symbol = '+';
  rhythm.code = *code_for_symbol('+');
  rhythm.is_beat = false;
  rhythm.time_s = 1.0 / o.sampling_rate;
  rhythm.aux = "(N";
  out.annotations.push_back(rhythm);
  for (const auto& beat : beats) {
    BeatAnnotation a;
    a.sample_index = static_cast<std::int64_t>(std::llround(beat.t * o.sampling_rate));
    a.symbol = beat.symbol;
    a.code = *code_for_symbol(beat.symbol);
    a.is_beat = true;
    a.time_s = static_cast<double>(a.sample_index) / o.sampling_rate;
    out.annotations.push_back(a);
  }
  return out;
}

SynthRecord write_synthetic_record(const std::filesystem::path& dir, const SynthOptions& options) {
  auto out = synthesize_record(options);
  write_record(dir, out.record, out.annotations);
  return out;
}

}  // namespace ecgyolo
