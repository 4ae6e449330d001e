#pragma once

// Reader for MIT-BIH style WFDB records: `.hea` text headers, format 212
// signal files and MIT binary annotation files. The matching writers exist
// so tests and the synthetic-record generator can produce bit-exact inputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecgyolo {

struct ChannelInfo {
  std::string name;       // signal description, e.g. "MLII"
  std::string file_name;  // e.g. "100.dat"
  int format = 212;
  double adc_gain = 200.0;  // adu per physical unit
  int adc_baseline = 0;     // adu value of 0 physical units
  std::string units = "mV";
  int adc_resolution = 12;
  int adc_zero = 0;
  int initial_value = 0;
  std::optional<int> checksum;
  std::int64_t byte_offset = 0;
};

struct RecordHeader {
  std::string record_id;
  int num_channels = 0;
  double sampling_rate = 250.0;
  std::int64_t num_samples = 0;
  std::vector<ChannelInfo> channels;
};

struct SignalRecord {
  std::string record_id;
  double sampling_rate = 360.0;
  std::int64_t num_samples = 0;
  std::vector<ChannelInfo> channels;
  std::vector<std::vector<std::int16_t>> samples;  // [channel][sample], adu

  int num_channels() const noexcept { return static_cast<int>(channels.size()); }
  double duration_s() const noexcept { return static_cast<double>(num_samples) / sampling_rate; }
  double to_millivolts(int channel, std::int16_t adu) const;
  std::vector<double> physical(int channel) const;
};

struct BeatAnnotation {
  std::int64_t sample_index = 0;
  char symbol = 'N';
  int code = 1;  // WFDB annotation type code
  bool is_beat = true;
  double time_s = 0.0;
  int subtype = 0;
  int channel = 0;
  int num = 0;
  std::string aux;

  friend bool operator==(const BeatAnnotation&, const BeatAnnotation&) = default;
};

// WFDB annotation code table (codes 0..49).
char symbol_for_code(int code);
std::optional<int> code_for_symbol(char symbol);
bool is_beat_code(int code);

RecordHeader parse_header(std::string_view header_text);
std::string format_header(const RecordHeader& header);

// Two 12-bit two's-complement samples per 3 bytes, channels interleaved.
std::vector<std::vector<std::int16_t>> decode_format212(std::span<const std::uint8_t> bytes,
                                                        std::int64_t num_samples, int num_channels);
std::vector<std::uint8_t> encode_format212(const std::vector<std::vector<std::int16_t>>& channels);

std::vector<BeatAnnotation> parse_annotations(std::span<const std::uint8_t> bytes, double sampling_rate,
                                              std::optional<std::int64_t> num_samples = std::nullopt);
std::vector<std::uint8_t> encode_annotations(std::span<const BeatAnnotation> annotations);

// `sample_index,symbol` rows after a mandatory header row.
std::vector<BeatAnnotation> parse_annotation_csv(std::string_view text, double sampling_rate,
                                                 std::optional<std::int64_t> num_samples = std::nullopt);

// Sum of all samples modulo 2^16, as stored in the header checksum field.
int signal_checksum(std::span<const std::int16_t> samples);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

SignalRecord read_record(const std::filesystem::path& dir, const std::string& record_id);

// Reads `<id>.atr`, falling back to `<id>.atr.csv`.
std::vector<BeatAnnotation> read_annotations(const std::filesystem::path& dir, const std::string& record_id,
                                             double sampling_rate,
                                             std::optional<std::int64_t> num_samples = std::nullopt);

// Writes `<id>.hea`, `<id>.dat` and (when given) `<id>.atr`.
void write_record(const std::filesystem::path& dir, const SignalRecord& record,
                  std::span<const BeatAnnotation> annotations = {});

// Record ids in a directory, i.e. stems of `*.hea` files, sorted.
std::vector<std::string> list_records(const std::filesystem::path& dir);

}  // namespace ecgyolo
