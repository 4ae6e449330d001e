#pragma once

// Class-balanced holdout and k-fold splits over labeled frames.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/detect.hpp"

namespace ecgyolo {

enum class Partition : int { train = 0, val = 1, test = 2 };
enum class SplitStrategy { image_stratified, patient_wise };

std::string_view partition_name(Partition p) noexcept;
std::string_view strategy_name(SplitStrategy s) noexcept;
SplitStrategy parse_strategy(std::string_view name);

struct FrameClasses {
  std::string id;
  std::string group;  // patient / record id
  ClassCounts counts{};
};

FrameClasses frame_classes(std::string id, std::span<const BoundingBox> labels);

struct SplitAssignment {
  std::vector<std::string> frame_ids;
  std::vector<Partition> tags;  // parallel to frame_ids
  int fold = -1;                // validation fold for k-fold assignments
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::image_stratified;

  std::vector<std::string> members(Partition p) const;
  std::size_t count(Partition p) const;
};

// Ratios are (train, val, test), each in (0,1), summing to 1.
SplitAssignment stratified_holdout(std::span<const FrameClasses> frames, std::array<double, 3> ratios,
                                   std::uint64_t seed, SplitStrategy strategy = SplitStrategy::image_stratified);

// k assignments; assignment i marks fold i as validation and the rest as training.
std::vector<SplitAssignment> kfold(std::span<const FrameClasses> frames, int k, std::uint64_t seed,
                                   SplitStrategy strategy = SplitStrategy::image_stratified);

// `<dir>/train.txt`, `val.txt`, `test.txt`: one frame id per line.
void write_holdout_lists(const std::filesystem::path& dir, const SplitAssignment& split);
// `<dir>/fold_<i>_train.txt` and `fold_<i>_val.txt`.
void write_fold_lists(const std::filesystem::path& dir, std::span<const SplitAssignment> folds);
std::vector<std::string> read_id_list(const std::filesystem::path& path);

}  // namespace ecgyolo
