#include "ecgyolo/wfdb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {
namespace {

// WFDB annotation codes 0..49; '\0' marks an unassigned code.
constexpr std::array<char, 50> kCodeSymbols = {
    ' ', 'N', 'L', 'R', 'a', 'V', 'F', 'J', 'A', 'S',   //  0..9
    'E', 'j', '/', 'Q', '~', '\0', '|', '\0', 's', 'T',  // 10..19
    '*', 'D', '"', '=', 'p', 'B', '^', 't', '+', 'u',    // 20..29
    '?', '!', '[', ']', 'e', 'n', '@', 'x', 'f', '(',    // 30..39
    ')', 'r', '\0', '\0', '\0', '\0', '\0', '\0', '\0', '\0'};

constexpr int kSkip = 59;
constexpr int kNum = 60;
constexpr int kSub = 61;
constexpr int kChn = 62;
constexpr int kAux = 63;
constexpr int kMaxAnnotationCode = 49;

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// Leading numeric prefix of tokens like "360/2(0)" or "200.0(1024)/mV".
template <typename T>
std::optional<T> parse_prefix(std::string_view text, std::string_view& rest) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc()) return std::nullopt;
  rest = text.substr(static_cast<std::size_t>(ptr - text.data()));
  return value;
}

std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::int16_t sign_extend12(unsigned value) {
  value &= 0xFFFu;
  return static_cast<std::int16_t>(value & 0x800u ? static_cast<int>(value) - 0x1000 : static_cast<int>(value));
}

int signed_byte(int value) { return static_cast<std::int8_t>(static_cast<std::uint8_t>(value & 0xFF)); }

ChannelInfo parse_signal_line(std::string_view line, std::size_t line_no) {
  auto tokens = tokenize(line);
  if (tokens.size() < 2) throw ParseError("signal line needs a file name and a format", line_no, 1);
  ChannelInfo ch;
  ch.file_name = std::string(tokens[0].text);

  std::string_view fmt = tokens[1].text;
  std::string_view rest;
  auto format = parse_prefix<int>(fmt, rest);
  if (!format) throw ParseError("bad storage format '" + std::string(fmt) + "'", line_no, tokens[1].column);
  ch.format = *format;
  if (ch.format != 212) {
    throw UnsupportedFormat("storage format " + std::to_string(ch.format) + " is not supported (only 212)");
  }
  while (!rest.empty()) {
    char tag = rest.front();
    rest.remove_prefix(1);
    std::string_view tail;
    auto value = parse_prefix<std::int64_t>(rest, tail);
    if (!value) throw ParseError("bad format modifier in '" + std::string(fmt) + "'", line_no, tokens[1].column);
    if (tag == 'x') {
      if (*value != 1) throw UnsupportedFormat("multiple samples per frame are not supported");
    } else if (tag == ':') {
      if (*value != 0) throw UnsupportedFormat("signal skew is not supported");
    } else if (tag == '+') {
      ch.byte_offset = *value;
    } else {
      throw ParseError("bad format modifier in '" + std::string(fmt) + "'", line_no, tokens[1].column);
    }
    rest = tail;
  }

  bool baseline_given = false;
  std::size_t next = 2;
  if (tokens.size() > next) {
    std::string_view g = tokens[next].text;
    auto gain = parse_prefix<double>(g, rest);
    if (!gain) throw ParseError("bad ADC gain '" + std::string(g) + "'", line_no, tokens[next].column);
    ch.adc_gain = *gain;
    if (!rest.empty() && rest.front() == '(') {
      std::string_view tail;
      auto base = parse_prefix<int>(rest.substr(1), tail);
      if (!base || tail.empty() || tail.front() != ')') {
        throw ParseError("bad baseline in '" + std::string(g) + "'", line_no, tokens[next].column);
      }
      ch.adc_baseline = *base;
      baseline_given = true;
      rest = tail.substr(1);
    }
    if (!rest.empty()) {
      if (rest.front() != '/') throw ParseError("bad units in '" + std::string(g) + "'", line_no, tokens[next].column);
      ch.units = std::string(rest.substr(1));
    }
    ++next;
  }
  if (ch.adc_gain == 0.0) ch.adc_gain = 200.0;

  auto int_field = [&](int& field) {
    if (tokens.size() <= next) return false;
    auto v = parse_number<int>(tokens[next].text);
    if (!v) throw ParseError("expected an integer, got '" + std::string(tokens[next].text) + "'", line_no,
                             tokens[next].column);
    field = *v;
    ++next;
    return true;
  };
  int_field(ch.adc_resolution);
  int_field(ch.adc_zero);
  int_field(ch.initial_value);
  int checksum = 0;
  if (int_field(checksum)) ch.checksum = checksum;
  int block_size = 0;
  int_field(block_size);
  if (tokens.size() > next) {
    std::string_view desc = line.substr(tokens[next].column - 1);
    while (!desc.empty() && std::isspace(static_cast<unsigned char>(desc.back()))) desc.remove_suffix(1);
    ch.name = std::string(desc);
  }
  if (!baseline_given) ch.adc_baseline = ch.adc_zero;
  return ch;
}

}  // namespace

double SignalRecord::to_millivolts(int channel, std::int16_t adu) const {
  const auto& ch = channels.at(static_cast<std::size_t>(channel));
  return (static_cast<double>(adu) - ch.adc_baseline) / ch.adc_gain;
}

std::vector<double> SignalRecord::physical(int channel) const {
  const auto& src = samples.at(static_cast<std::size_t>(channel));
  std::vector<double> out(src.size());
  std::transform(src.begin(), src.end(), out.begin(), [&](std::int16_t v) { return to_millivolts(channel, v); });
  return out;
}

char symbol_for_code(int code) {
  if (code < 0 || code > kMaxAnnotationCode) return '\0';
  return kCodeSymbols[static_cast<std::size_t>(code)];
}

std::optional<int> code_for_symbol(char symbol) {
  if (symbol == '\0') return std::nullopt;
  for (int code = 0; code <= kMaxAnnotationCode; ++code) {
    if (kCodeSymbols[static_cast<std::size_t>(code)] == symbol) return code;
  }
  return std::nullopt;
}

bool is_beat_code(int code) {
  // WFDB isqrs table
  return (code >= 1 && code <= 13) || code == 25 || code == 30 || code == 34 || code == 35 || code == 38 ||
         code == 41;
}

RecordHeader parse_header(std::string_view text) {
  RecordHeader header;
  std::size_t line_no = 0;
  bool have_record_line = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = tokenize(line);
    if (tokens.empty() || tokens.front().text.front() == '#') continue;

    if (!have_record_line) {
      have_record_line = true;
      std::string_view name = tokens[0].text;
      if (name.find('/') != std::string_view::npos) {
        throw UnsupportedFormat("multi-segment record '" + std::string(name) + "' is not supported");
      }
      header.record_id = std::string(name);
      if (tokens.size() < 2) throw ParseError("missing signal count", line_no, tokens[0].column + name.size());
      auto nsig = parse_number<int>(tokens[1].text);
      if (!nsig || *nsig < 0) {
        throw ParseError("bad signal count '" + std::string(tokens[1].text) + "'", line_no, tokens[1].column);
      }
      header.num_channels = *nsig;
      if (tokens.size() > 2) {
        std::string_view rest;
        auto fs = parse_prefix<double>(tokens[2].text, rest);
        if (!fs || *fs <= 0.0 || (!rest.empty() && rest.front() != '/')) {
          throw ParseError("bad sampling frequency '" + std::string(tokens[2].text) + "'", line_no,
                           tokens[2].column);
        }
        header.sampling_rate = *fs;
      }
      if (tokens.size() > 3) {
        auto n = parse_number<std::int64_t>(tokens[3].text);
        if (!n || *n < 0) {
          throw ParseError("bad sample count '" + std::string(tokens[3].text) + "'", line_no, tokens[3].column);
        }
        header.num_samples = *n;
      }
      continue;
    }
    if (static_cast<int>(header.channels.size()) < header.num_channels) {
      header.channels.push_back(parse_signal_line(line, line_no));
      if (header.channels.back().name.empty()) {
        header.channels.back().name =
            "record " + header.record_id + ", signal " + std::to_string(header.channels.size() - 1);
      }
    }
  }
  if (!have_record_line) throw ParseError("empty header", 1, 1);
  if (static_cast<int>(header.channels.size()) != header.num_channels) {
    throw ParseError("header declares " + std::to_string(header.num_channels) + " signals but describes " +
                         std::to_string(header.channels.size()),
                     line_no, 1);
  }
  return header;
}

std::string format_header(const RecordHeader& header) {
  std::ostringstream os;
  os << header.record_id << ' ' << header.num_channels << ' ' << format_double(header.sampling_rate) << ' '
     << header.num_samples << '\n';
  for (const auto& ch : header.channels) {
    os << ch.file_name << ' ' << ch.format;
    if (ch.byte_offset != 0) os << '+' << ch.byte_offset;
    os << ' ' << format_double(ch.adc_gain) << '(' << ch.adc_baseline << ')';
    if (!ch.units.empty()) os << '/' << ch.units;
    os << ' ' << ch.adc_resolution << ' ' << ch.adc_zero << ' ' << ch.initial_value << ' ' << ch.checksum.value_or(0)
       << " 0";
    if (!ch.name.empty()) os << ' ' << ch.name;
    os << '\n';
  }
  return os.str();
}

std::vector<std::vector<std::int16_t>> decode_format212(std::span<const std::uint8_t> bytes,
                                                        std::int64_t num_samples, int num_channels) {
  if (num_samples < 0 || num_channels < 0) throw Error("negative sample or channel count");
  const auto total = static_cast<std::size_t>(num_samples) * static_cast<std::size_t>(num_channels);
  const std::size_t needed = (total * 3 + 1) / 2;
  if (bytes.size() < needed) throw TruncatedSignal(needed, bytes.size());

  std::vector<std::vector<std::int16_t>> out(static_cast<std::size_t>(num_channels));
  for (auto& ch : out) ch.resize(static_cast<std::size_t>(num_samples));
  const auto nch = static_cast<std::size_t>(num_channels);
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t base = (k / 2) * 3;
    unsigned value = 0;
    if (k % 2 == 0) {
      value = bytes[base] | ((bytes[base + 1] & 0x0Fu) << 8);
    } else {
      value = bytes[base + 2] | ((bytes[base + 1] & 0xF0u) << 4);
    }
    out[k % nch][k / nch] = sign_extend12(value);
  }
  return out;
}

std::vector<std::uint8_t> encode_format212(const std::vector<std::vector<std::int16_t>>& channels) {
  const std::size_t nch = channels.size();
  const std::size_t n = nch ? channels.front().size() : 0;
  for (const auto& ch : channels) {
    if (ch.size() != n) throw Error("format 212 encoder: channel lengths differ");
  }
  const std::size_t total = n * nch;
  std::vector<std::uint8_t> out((total * 3 + 1) / 2, 0);
  for (std::size_t k = 0; k < total; ++k) {
    const int v = channels[k % nch][k / nch];
    if (v < -2048 || v > 2047) throw Error("format 212 encoder: sample " + std::to_string(v) + " exceeds 12 bits");
    const unsigned u = static_cast<unsigned>(v) & 0xFFFu;
    const std::size_t base = (k / 2) * 3;
    if (k % 2 == 0) {
      out[base] = static_cast<std::uint8_t>(u & 0xFFu);
      out[base + 1] = static_cast<std::uint8_t>((out[base + 1] & 0xF0u) | (u >> 8));
    } else {
      out[base + 1] = static_cast<std::uint8_t>((out[base + 1] & 0x0Fu) | ((u >> 8) << 4));
      out[base + 2] = static_cast<std::uint8_t>(u & 0xFFu);
    }
  }
  return out;
}

std::vector<BeatAnnotation> parse_annotations(std::span<const std::uint8_t> bytes, double sampling_rate,
                                              std::optional<std::int64_t> num_samples) {
  if (sampling_rate <= 0.0) throw Error("sampling rate must be positive");
  std::vector<BeatAnnotation> out;
  std::int64_t time = 0;
  int num = 0;
  int chan = 0;
  bool pending_skip = false;
  bool current_open = false;  // last annotation still accepts modifier words
  std::size_t pos = 0;

  auto read_word = [&](const char* what) -> unsigned {
    if (pos + 2 > bytes.size()) {
      throw ParseError(std::string("annotation stream ends inside ") + what + " at byte " + std::to_string(pos));
    }
    unsigned w = bytes[pos] | (static_cast<unsigned>(bytes[pos + 1]) << 8);
    pos += 2;
    return w;
  };

  while (pos < bytes.size()) {
    const unsigned word = read_word("an annotation word");
    const int code = static_cast<int>(word >> 10);
    const int data = static_cast<int>(word & 0x3FFu);
    if (code == 0 && data == 0) {
      if (pending_skip) throw ParseError("SKIP escape not followed by an annotation");
      return out;
    }
    switch (code) {
      case kSkip: {
        const unsigned hi = read_word("a SKIP interval");
        const unsigned lo = read_word("a SKIP interval");
        const auto interval = static_cast<std::int32_t>((hi << 16) | lo);
        time += interval;
        pending_skip = true;
        current_open = false;
        break;
      }
      case kNum:
        num = signed_byte(data);
        if (current_open) out.back().num = num;
        break;
      case kSub:
        if (!current_open) throw ParseError("SUB escape without an annotation at byte " + std::to_string(pos - 2));
        out.back().subtype = signed_byte(data);
        break;
      case kChn:
        chan = data & 0xFF;
        if (current_open) out.back().channel = chan;
        break;
      case kAux: {
        if (!current_open) throw ParseError("AUX escape without an annotation at byte " + std::to_string(pos - 2));
        const std::size_t len = static_cast<std::size_t>(data);
        const std::size_t padded = len + (len & 1u);
        if (pos + padded > bytes.size()) {
          throw ParseError("annotation stream ends inside an AUX payload at byte " + std::to_string(pos));
        }
        std::string aux(reinterpret_cast<const char*>(bytes.data() + pos), len);
        // Writers commonly NUL-terminate aux strings.
        if (auto nul = aux.find('\0'); nul != std::string::npos) aux.resize(nul);
        out.back().aux = std::move(aux);
        pos += padded;
        break;
      }
      default: {
        if (code > kMaxAnnotationCode) {
          throw ParseError("unknown annotation code " + std::to_string(code) + " at byte " + std::to_string(pos - 2));
        }
        time += data;
        if (time < 0 || (num_samples && time >= *num_samples)) {
          throw OutOfRangeAnnotation(time, num_samples.value_or(0));
        }
        BeatAnnotation ann;
        ann.sample_index = time;
        ann.code = code;
        ann.symbol = symbol_for_code(code);
        ann.is_beat = is_beat_code(code);
        ann.time_s = static_cast<double>(time) / sampling_rate;
        ann.num = num;
        ann.channel = chan;
        out.push_back(std::move(ann));
        pending_skip = false;
        current_open = true;
        break;
      }
    }
  }
  if (pending_skip) throw ParseError("annotation stream ends after a SKIP escape");
  return out;
}

std::vector<std::uint8_t> encode_annotations(std::span<const BeatAnnotation> annotations) {
  std::vector<std::uint8_t> out;
  auto put_word = [&](unsigned w) {
    out.push_back(static_cast<std::uint8_t>(w & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((w >> 8) & 0xFFu));
  };
  std::int64_t time = 0;
  int num = 0;
  int chan = 0;
  for (const auto& ann : annotations) {
    if (ann.code <= 0 || ann.code > kMaxAnnotationCode) {
      throw Error("annotation encoder: code " + std::to_string(ann.code) + " cannot be written");
    }
    const std::int64_t delta = ann.sample_index - time;
    if (delta < 0 || delta > 1023) {
      const auto interval = static_cast<std::uint32_t>(static_cast<std::int32_t>(delta));
      put_word(static_cast<unsigned>(kSkip) << 10);
      put_word(interval >> 16);
      put_word(interval & 0xFFFFu);
      put_word(static_cast<unsigned>(ann.code) << 10);
    } else {
      put_word((static_cast<unsigned>(ann.code) << 10) | static_cast<unsigned>(delta));
    }
    time = ann.sample_index;
    if (ann.subtype != 0) put_word((static_cast<unsigned>(kSub) << 10) | (static_cast<unsigned>(ann.subtype) & 0xFFu));
    if (ann.channel != chan) {
      chan = ann.channel;
      put_word((static_cast<unsigned>(kChn) << 10) | (static_cast<unsigned>(chan) & 0xFFu));
    }
    if (ann.num != num) {
      num = ann.num;
      put_word((static_cast<unsigned>(kNum) << 10) | (static_cast<unsigned>(num) & 0xFFu));
    }
    if (!ann.aux.empty()) {
      if (ann.aux.size() > 255) throw Error("annotation encoder: aux string longer than 255 bytes");
      put_word((static_cast<unsigned>(kAux) << 10) | static_cast<unsigned>(ann.aux.size()));
      out.insert(out.end(), ann.aux.begin(), ann.aux.end());
      if (ann.aux.size() % 2) out.push_back(0);
    }
  }
  put_word(0);
  return out;
}

std::vector<BeatAnnotation> parse_annotation_csv(std::string_view text, double sampling_rate,
                                                 std::optional<std::int64_t> num_samples) {
  std::vector<BeatAnnotation> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "sample_index,symbol") throw ParseError("expected header row 'sample_index,symbol'", line_no, 1);
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 'sample_index,symbol'", line_no, 1);
    auto index = parse_number<std::int64_t>(line.substr(0, comma));
    if (!index) throw ParseError("bad sample index", line_no, 1);
    std::string_view sym = line.substr(comma + 1);
    if (sym.size() != 1) throw ParseError("symbol must be a single character", line_no, comma + 2);
    auto code = code_for_symbol(sym.front());
    if (!code) throw ParseError("unknown annotation symbol '" + std::string(sym) + "'", line_no, comma + 2);
    if (*index < 0 || (num_samples && *index >= *num_samples)) {
      throw OutOfRangeAnnotation(*index, num_samples.value_or(0));
    }
    if (!out.empty() && *index < out.back().sample_index) throw ParseError("sample indices must ascend", line_no, 1);
    BeatAnnotation ann;
    ann.sample_index = *index;
    ann.symbol = sym.front();
    ann.code = *code;
    ann.is_beat = is_beat_code(*code);
    ann.time_s = static_cast<double>(*index) / sampling_rate;
    out.push_back(std::move(ann));
  }
  if (!header_seen) throw ParseError("missing header row 'sample_index,symbol'", 1, 1);
  return out;
}

int signal_checksum(std::span<const std::int16_t> samples) {
  std::uint32_t sum = 0;
  for (auto v : samples) sum += static_cast<std::uint32_t>(static_cast<std::int32_t>(v));
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(sum & 0xFFFFu));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SignalRecord read_record(const std::filesystem::path& dir, const std::string& record_id) {
  const auto header_path = dir / (record_id + ".hea");
  RecordHeader header;
  try {
    header = parse_header(read_file_text(header_path));
  } catch (const ParseError& e) {
    throw ParseError(header_path.string() + ": " + e.what(), e.line(), e.column());
  }

  SignalRecord rec;
  rec.record_id = header.record_id;
  rec.sampling_rate = header.sampling_rate;
  rec.channels = header.channels;
  rec.samples.resize(header.channels.size());

  // Channels sharing a file are interleaved within that file.
  std::vector<std::string> files;
  for (const auto& ch : header.channels) {
    if (std::find(files.begin(), files.end(), ch.file_name) == files.end()) files.push_back(ch.file_name);
  }
  std::int64_t num_samples = header.num_samples;
  for (const auto& file : files) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < header.channels.size(); ++i) {
      if (header.channels[i].file_name == file) members.push_back(i);
    }
    const auto path = dir / file;
    if (!std::filesystem::exists(path)) throw IoError("missing signal file " + path.string());
    auto bytes = read_file_bytes(path);
    const auto offset = static_cast<std::size_t>(header.channels[members.front()].byte_offset);
    if (offset > bytes.size()) throw TruncatedSignal(offset, bytes.size());
    std::span<const std::uint8_t> payload(bytes.data() + offset, bytes.size() - offset);
    const int nch = static_cast<int>(members.size());
    if (num_samples == 0) num_samples = static_cast<std::int64_t>(payload.size() * 2 / 3) / nch;
    std::vector<std::vector<std::int16_t>> decoded;
    try {
      decoded = decode_format212(payload, num_samples, nch);
    } catch (const TruncatedSignal& e) {
      throw IoError(path.string() + ": " + e.what());
    }
    for (std::size_t m = 0; m < members.size(); ++m) rec.samples[members[m]] = std::move(decoded[m]);
  }
  rec.num_samples = num_samples;

  for (std::size_t i = 0; i < rec.channels.size(); ++i) {
    const auto& ch = rec.channels[i];
    if (ch.checksum && header.num_samples > 0 && signal_checksum(rec.samples[i]) != *ch.checksum) {
      throw ParseError(header_path.string() + ": checksum mismatch for signal " + std::to_string(i));
    }
  }
  return rec;
}

std::vector<BeatAnnotation> read_annotations(const std::filesystem::path& dir, const std::string& record_id,
                                             double sampling_rate, std::optional<std::int64_t> num_samples) {
  const auto atr = dir / (record_id + ".atr");
  if (std::filesystem::exists(atr)) {
    const auto bytes = read_file_bytes(atr);
    try {
      return parse_annotations(bytes, sampling_rate, num_samples);
    } catch (const ParseError& e) {
      throw ParseError(atr.string() + ": " + e.what());
    }
  }
  const auto csv = dir / (record_id + ".atr.csv");
  if (std::filesystem::exists(csv)) return parse_annotation_csv(read_file_text(csv), sampling_rate, num_samples);
  throw IoError("missing annotation file " + atr.string() + " (or " + csv.filename().string() + ")");
}

void write_record(const std::filesystem::path& dir, const SignalRecord& record,
                  std::span<const BeatAnnotation> annotations) {
  std::filesystem::create_directories(dir);
  RecordHeader header;
  header.record_id = record.record_id;
  header.num_channels = record.num_channels();
  header.sampling_rate = record.sampling_rate;
  header.num_samples = record.num_samples;
  header.channels = record.channels;
  for (std::size_t i = 0; i < header.channels.size(); ++i) {
    auto& ch = header.channels[i];
    ch.file_name = record.record_id + ".dat";
    ch.format = 212;
    ch.byte_offset = 0;
    ch.initial_value = record.samples[i].empty() ? 0 : record.samples[i].front();
    ch.checksum = signal_checksum(record.samples[i]);
  }
  auto write_bytes = [&](const std::filesystem::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed for " + path.string());
  };
  const auto text = format_header(header);
  write_bytes(dir / (record.record_id + ".hea"), text.data(), text.size());
  const auto dat = encode_format212(record.samples);
  write_bytes(dir / (record.record_id + ".dat"), dat.data(), dat.size());
  if (!annotations.empty()) {
    const auto atr = encode_annotations(annotations);
    write_bytes(dir / (record.record_id + ".atr"), atr.data(), atr.size());
  }
}

std::vector<std::string> list_records(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".hea") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace ecgyolo
