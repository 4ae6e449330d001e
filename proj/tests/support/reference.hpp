#pragma once

// Compares a record as read by this library against the dump written by
// scripts/dump_reference.py from the reference WFDB reader.

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ecgyolo/wfdb.hpp"

namespace reference {

inline std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

struct Conformance {
  std::vector<std::string> mismatches;
  std::size_t samples_checked = 0;      // per channel, via sum and SHA-256 of every sample
  std::size_t head_samples_checked = 0;  // per channel, value by value
  std::size_t annotations_checked = 0;
  bool ok() const { return mismatches.empty(); }
};

// max_annotations = 0 compares every annotation (and the total count).
inline Conformance compare_record_unchecked(const std::filesystem::path& record_dir, const std::string& id,
                                  const std::filesystem::path& ref_dir, std::size_t max_annotations = 0) {
  using namespace ecgyolo;
  Conformance out;
  auto miss = [&](std::string what) { out.mismatches.push_back(std::move(what)); };
  const auto ref = nlohmann::json::parse(read_file_text(ref_dir / "reference.json"));
  const auto rec = read_record(record_dir, id);
  if (rec.num_channels() != ref["n_sig"].get<int>()) miss("channel count");
  if (rec.sampling_rate != ref["fs"].get<double>()) miss("sampling rate");
  if (rec.num_samples != ref["sig_len"].get<std::int64_t>()) miss("sample count");
  if (!out.ok()) return out;
  for (int c = 0; c < rec.num_channels(); ++c) {
    const auto ci = static_cast<std::size_t>(c);
    if (rec.channels[ci].name != ref["sig_name"][ci].get<std::string>()) miss("name of channel " + std::to_string(c));
    if (rec.channels[ci].adc_gain != ref["adc_gain"][ci].get<double>()) miss("gain of channel " + std::to_string(c));
    if (rec.channels[ci].adc_baseline != ref["baseline"][ci].get<int>()) miss("baseline of channel " + std::to_string(c));
    const std::vector<std::int32_t> wide(rec.samples[ci].begin(), rec.samples[ci].end());
    std::int64_t sum = 0;
    for (auto v : wide) sum += v;
    if (sum != ref["channel_sums"][ci].get<std::int64_t>()) miss("sample sum of channel " + std::to_string(c));
    if (sha256_hex(wide.data(), wide.size() * 4) != ref["channel_sha256"][ci].get<std::string>()) {
      miss("sample digest of channel " + std::to_string(c));
    }
  }
  out.samples_checked = static_cast<std::size_t>(rec.num_samples);

  std::ifstream head(ref_dir / "reference_head.csv");
  std::string line;
  std::getline(head, line);
  while (std::getline(head, line)) {
    const auto cells = split_csv(line);
    const auto i = static_cast<std::size_t>(std::stoll(cells[0]));
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      if (rec.samples[c][i] != std::stoi(cells[c + 1])) {
        miss("sample " + std::to_string(i) + " of channel " + std::to_string(c));
        return out;
      }
    }
    ++out.head_samples_checked;
  }

  const auto anns = read_annotations(record_dir, id, rec.sampling_rate, rec.num_samples);
  std::ifstream ann_csv(ref_dir / "reference_ann.csv");
  std::getline(ann_csv, line);
  std::size_t k = 0;
  while (std::getline(ann_csv, line) && (max_annotations == 0 || k < max_annotations)) {
    const auto cells = split_csv(line);
    if (k >= anns.size()) {
      miss("annotation count");
      return out;
    }
    const auto& a = anns[k];
    const bool same = a.sample_index == std::stoll(cells[0]) && std::string(1, a.symbol) == cells[1] &&
                      a.subtype == std::stoi(cells[2]) && a.channel == std::stoi(cells[3]) &&
                      a.num == std::stoi(cells[4]) && a.aux == cells[5];
    if (!same) {
      miss("annotation " + std::to_string(k));
      return out;
    }
    ++k;
  }
  if (max_annotations == 0 && k != anns.size()) miss("annotation count");
  out.annotations_checked = k;
  return out;
}

// Same, with reader errors reported as mismatches.
inline Conformance compare_record(const std::filesystem::path& record_dir, const std::string& id,
                                  const std::filesystem::path& ref_dir, std::size_t max_annotations = 0) {
  try {
    return compare_record_unchecked(record_dir, id, ref_dir, max_annotations);
  } catch (const std::exception& e) {
    Conformance out;
    out.mismatches.push_back(e.what());
    return out;
  }
}

}  // namespace reference
