#pragma once

// Synthetic ECG records: each beat is a sum of Gaussian P, Q, R, S and T waves
// whose shape and timing depend on the beat type. Used for tests and demos.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {

struct SynthOptions {
  std::string record_id = "900";
  double duration_s = 60.0;
  double sampling_rate = 360.0;
  int num_channels = 2;
  double heart_rate_bpm = 72.0;
  // Probability that a beat is of the given ectopic type instead of N.
  double p_supraventricular = 0.08;  // 'A'
  double p_ventricular = 0.08;       // 'V'
  double p_fusion = 0.03;            // 'F'
  double p_paced = 0.03;             // '/'
  double noise_mv = 0.01;
  std::uint64_t seed = 1;
};

struct SynthRecord {
  SignalRecord record;
  std::vector<BeatAnnotation> annotations;  // beats plus a leading rhythm marker
};

SynthRecord synthesize_record(const SynthOptions& options);

// Writes `<id>.hea/.dat/.atr` into dir.
SynthRecord write_synthetic_record(const std::filesystem::path& dir, const SynthOptions& options);

}  // namespace ecgyolo
