#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgyolo/wfdb.hpp"

namespace ecgyolo {

// Label-file class ids follow this order.
enum class AamiClass : std::uint8_t { N = 0, S = 1, V = 2, F = 3, Q = 4 };

inline constexpr int kNumClasses = 5;
inline constexpr std::array<AamiClass, kNumClasses> kAllClasses = {AamiClass::N, AamiClass::S, AamiClass::V,
                                                                   AamiClass::F, AamiClass::Q};

constexpr int class_id(AamiClass c) noexcept { return static_cast<int>(c); }
std::string_view class_name(AamiClass c) noexcept;
std::string_view class_name(int class_id);
std::optional<AamiClass> class_from_name(std::string_view name) noexcept;
std::optional<AamiClass> class_from_id(int id) noexcept;
std::vector<std::string> class_names();

// One row of the beat-description table: AAMI label, description, PhysioBank symbol.
struct BeatType {
  AamiClass aami;
  std::string_view description;
  char symbol;
};

// The 15 beat types grouped into the five AAMI classes.
std::span<const BeatType> beat_type_table() noexcept;

class SymbolMap {
 public:
  static SymbolMap standard();
  // `symbol,aami_class` rows after a header row; unlisted symbols are non-beats.
  static SymbolMap from_csv(std::string_view text);

  std::optional<AamiClass> map(char symbol) const noexcept {
    return table_[static_cast<unsigned char>(symbol)];
  }
  std::vector<std::pair<char, AamiClass>> rows() const;

 private:
  std::array<std::optional<AamiClass>, 256> table_{};
};

// std::nullopt means "not a beat".
std::optional<AamiClass> map_symbol(char mit_symbol) noexcept;

struct ClassifiedBeat {
  std::int64_t sample_index = 0;
  AamiClass aami = AamiClass::N;
  char symbol = 'N';

  friend bool operator==(const ClassifiedBeat&, const ClassifiedBeat&) = default;
};

// Keeps the annotations that map to an AAMI class.
std::vector<ClassifiedBeat> classify_beats(std::span<const BeatAnnotation> annotations,
                                           const SymbolMap& map = SymbolMap::standard());

using ClassCounts = std::array<std::size_t, kNumClasses>;
ClassCounts count_classes(std::span<const ClassifiedBeat> beats);

// Paced records 102, 104, 107 and 217.
const std::set<std::string>& default_excluded_records();
// The 48 MIT-BIH Arrhythmia Database record ids.
const std::vector<std::string>& mitbih_record_ids();

std::vector<std::string> filter_records(std::span<const std::string> record_ids,
                                        const std::set<std::string>& excluded);

}  // namespace ecgyolo
