#pragma once

// YOLO dataset export and the record-directory -> dataset build pipeline.

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ecgyolo/aami.hpp"
#include "ecgyolo/render.hpp"

namespace ecgyolo {

inline constexpr const char* kManifestName = "data.yaml";

// Key-value manifest (`key: value` per line, YAML-compatible).
struct DatasetManifest {
  std::vector<std::string> class_names;
  std::vector<std::string> frame_ids;  // sorted
  ClassCounts counts{};
  std::string images_dir = "images";
  std::string labels_dir = "labels";
  std::string train_list = "splits/train.txt";
  std::string val_list = "splits/val.txt";
  std::string test_list = "splits/test.txt";
};

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view text);
DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

// Streams frames into `<dir>/images/<id>.png` and `<dir>/labels/<id>.txt`.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path dir, std::vector<std::string> class_names);
  void add(const LabeledFrame& frame);
  // Writes the manifest and returns it.
  DatasetManifest finish();

 private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
};

DatasetManifest export_yolo(std::span<const LabeledFrame> frames, const std::filesystem::path& out_dir,
                            const std::vector<std::string>& class_names = class_names());

// Labels of every frame in a dataset, keyed by frame id.
std::vector<std::pair<std::string, std::vector<BoundingBox>>> read_dataset_labels(
    const std::filesystem::path& dataset_dir);

std::string record_of_frame(std::string_view frame_id);

struct BuildOptions {
  std::filesystem::path records_dir;
  std::vector<std::string> record_ids;  // empty: every record in records_dir
  std::set<std::string> excluded_records = default_excluded_records();
  SymbolMap symbol_map = SymbolMap::standard();
  WindowOptions window;
  RenderStyle style;
  bool augment = true;
  AugmentOptions augment_options;
  std::uint64_t seed = 0;
};

// Windows, rendered (and optionally augmented) frames for one record.
std::vector<LabeledFrame> frames_for_record(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                            const BuildOptions& options);

struct BuildSummary {
  DatasetManifest manifest;
  std::vector<std::string> records_used;
  std::vector<std::string> records_skipped;  // shorter than one frame
  std::size_t windowed_beats = 0;
  std::size_t grayscale_frames = 0;
};

// Builds into a staging directory and moves it to out_dir on success.
BuildSummary build_dataset(const BuildOptions& options, const std::filesystem::path& out_dir);

// Class counts reported next to the published per-class counts (N 6424, V 2899,
// S 2225, Q 640, F 711) with percentage deviation.
ClassCounts reference_class_counts() noexcept;
std::string class_count_comparison(const ClassCounts& counts);

}  // namespace ecgyolo
