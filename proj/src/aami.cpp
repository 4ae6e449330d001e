#include "ecgyolo/aami.hpp"

#include <algorithm>

#include "ecgyolo/errors.hpp"

namespace ecgyolo {
namespace {

constexpr std::array<std::string_view, kNumClasses> kNames = {"N", "S", "V", "F", "Q"};

constexpr std::array<BeatType, 15> kBeatTypes = {{
    {AamiClass::N, "Normal beat (NOR)", 'N'},
    {AamiClass::N, "Left bundle branch block (LBBB)", 'L'},
    {AamiClass::N, "Right bundle branch block (RBBB)", 'R'},
    {AamiClass::N, "Atrial escape beat (AE)", 'e'},
    {AamiClass::N, "Nodal escape beat (NE)", 'j'},
    {AamiClass::S, "Atrial premature beat (AP)", 'A'},
    {AamiClass::S, "Aberrant atrial premature beat (aAP)", 'a'},
    {AamiClass::S, "Nodal premature beat (NP)", 'J'},
    {AamiClass::S, "Supraventricular premature beat (SP)", 'S'},
    {AamiClass::V, "Premature ventricular contraction (PVC)", 'V'},
    {AamiClass::V, "Ventricular escape beat (VE)", 'E'},
    {AamiClass::F, "Fusion of normal & ventricular beat (Fvn)", 'F'},
    {AamiClass::Q, "Paced beat (P)", '/'},
    {AamiClass::Q, "Fusion of paced & normal (fPN)", 'f'},
    {AamiClass::Q, "Unclassifiable (U)", 'Q'},
}};

}  // namespace

std::string_view class_name(AamiClass c) noexcept { return kNames[static_cast<std::size_t>(c)]; }

std::string_view class_name(int id) {
  auto c = class_from_id(id);
  if (!c) throw Error("class id " + std::to_string(id) + " out of range");
  return class_name(*c);
}

std::optional<AamiClass> class_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<AamiClass>(i);
  }
  return std::nullopt;
}

std::optional<AamiClass> class_from_id(int id) noexcept {
  if (id < 0 || id >= kNumClasses) return std::nullopt;
  return static_cast<AamiClass>(id);
}

std::vector<std::string> class_names() { return {kNames.begin(), kNames.end()}; }

std::span<const BeatType> beat_type_table() noexcept { return kBeatTypes; }

SymbolMap SymbolMap::standard() {
  SymbolMap m;
  for (const auto& row : kBeatTypes) m.table_[static_cast<unsigned char>(row.symbol)] = row.aami;
  return m;
}

SymbolMap SymbolMap::from_csv(std::string_view text) {
  SymbolMap m;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "symbol,aami_class") throw ParseError("expected header row 'symbol,aami_class'", line_no, 1);
      header_seen = true;
      continue;
    }
    if (line.size() < 3 || line[1] != ',') throw ParseError("expected 'symbol,aami_class'", line_no, 1);
    auto cls = class_from_name(line.substr(2));
    if (!cls) throw ParseError("unknown AAMI class '" + std::string(line.substr(2)) + "'", line_no, 3);
    auto& slot = m.table_[static_cast<unsigned char>(line[0])];
    if (slot && *slot != *cls) {
      throw ParseError(std::string("symbol '") + line[0] + "' mapped to two classes", line_no, 1);
    }
    slot = *cls;
  }
  if (!header_seen) throw ParseError("missing header row 'symbol,aami_class'", 1, 1);
  return m;
}

std::vector<std::pair<char, AamiClass>> SymbolMap::rows() const {
  std::vector<std::pair<char, AamiClass>> out;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i]) out.emplace_back(static_cast<char>(i), *table_[i]);
  }
  return out;
}

std::optional<AamiClass> map_symbol(char mit_symbol) noexcept {
  static const SymbolMap standard = SymbolMap::standard();
  return standard.map(mit_symbol);
}

std::vector<ClassifiedBeat> classify_beats(std::span<const BeatAnnotation> annotations, const SymbolMap& map) {
  std::vector<ClassifiedBeat> out;
  out.reserve(annotations.size());
  for (const auto& ann : annotations) {
    if (auto cls = map.map(ann.symbol)) out.push_back({ann.sample_index, *cls, ann.symbol});
  }
  return out;
}

ClassCounts count_classes(std::span<const ClassifiedBeat> beats) {
  ClassCounts counts{};
  for (const auto& b : beats) ++counts[static_cast<std::size_t>(b.aami)];
  return counts;
}

const std::set<std::string>& default_excluded_records() {
  static const std::set<std::string> ids = {"102", "104", "107", "217"};
  return ids;
}

const std::vector<std::string>& mitbih_record_ids() {
  static const std::vector<std::string> ids = {
      "100", "101", "102", "103", "104", "105", "106", "107", "108", "109", "111", "112",
      "113", "114", "115", "116", "117", "118", "119", "121", "122", "123", "124", "200",
      "201", "202", "203", "205", "207", "208", "209", "210", "212", "213", "214", "215",
      "217", "219", "220", "221", "222", "223", "228", "230", "231", "232", "233", "234"};
  return ids;
}

std::vector<std::string> filter_records(std::span<const std::string> record_ids,
                                        const std::set<std::string>& excluded) {
  std::vector<std::string> out;
  std::copy_if(record_ids.begin(), record_ids.end(), std::back_inserter(out),
               [&](const std::string& id) { return !excluded.contains(id); });
  return out;
}

}  // namespace ecgyolo
