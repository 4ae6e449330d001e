#include "ecgyolo/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ecgyolo/errors.hpp"
#include "ecgyolo/formats.hpp"

namespace fs = std::filesystem;

namespace ecgyolo {
namespace {

void write_binary(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream os;
  os << "# ecgyolo dataset manifest\n";
  os << "path: .\n";
  os << "train: " << m.train_list << '\n';
  os << "val: " << m.val_list << '\n';
  os << "test: " << m.test_list << '\n';
  os << "images: " << m.images_dir << '\n';
  os << "labels: " << m.labels_dir << '\n';
  os << "nc: " << m.class_names.size() << '\n';
  os << "names: [";
  for (std::size_t i = 0; i < m.class_names.size(); ++i) os << (i ? ", " : "") << m.class_names[i];
  os << "]\n";
  os << "frames: " << m.frame_ids.size() << '\n';
  for (std::size_t i = 0; i < m.class_names.size() && i < m.counts.size(); ++i) {
    os << "count_" << m.class_names[i] << ": " << m.counts[i] << '\n';
  }
  return os.str();
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::string, std::string>> counts;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", line_no, 1);
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "train") m.train_list = value;
    else if (key == "val") m.val_list = value;
    else if (key == "test") m.test_list = value;
    else if (key == "images") m.images_dir = value;
    else if (key == "labels") m.labels_dir = value;
    else if (key == "names") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
        throw ParseError("names must be a [a, b, ...] list", line_no, colon + 2);
      }
      std::string_view inner = std::string_view(value).substr(1, value.size() - 2);
      m.class_names.clear();
      while (!inner.empty()) {
        const auto comma = inner.find(',');
        m.class_names.push_back(trim(inner.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
      }
    } else if (key.rfind("count_", 0) == 0) {
      counts.emplace_back(key.substr(6), value);
    }
  }
  for (const auto& [name, value] : counts) {
    auto it = std::find(m.class_names.begin(), m.class_names.end(), name);
    if (it == m.class_names.end() || it - m.class_names.begin() >= kNumClasses) continue;
    std::size_t n = 0;
    std::from_chars(value.data(), value.data() + value.size(), n);
    m.counts[static_cast<std::size_t>(it - m.class_names.begin())] = n;
  }
  return m;
}

DatasetManifest read_manifest(const fs::path& dataset_dir) {
  const auto path = dataset_dir / kManifestName;
  auto m = parse_manifest(read_file_text(path));
  const auto labels = dataset_dir / m.labels_dir;
  if (fs::is_directory(labels)) {
    for (const auto& e : fs::directory_iterator(labels)) {
      if (e.path().extension() == ".txt") m.frame_ids.push_back(e.path().stem().string());
    }
    std::sort(m.frame_ids.begin(), m.frame_ids.end());
  }
  return m;
}

DatasetWriter::DatasetWriter(fs::path dir, std::vector<std::string> class_names) : dir_(std::move(dir)) {
  manifest_.class_names = std::move(class_names);
  std::error_code ec;
  fs::create_directories(dir_ / manifest_.images_dir, ec);
  if (!ec) fs::create_directories(dir_ / manifest_.labels_dir, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
}

void DatasetWriter::add(const LabeledFrame& frame) {
  const auto png = encode_png(frame.image);
  write_binary(dir_ / manifest_.images_dir / (frame.id + ".png"), png);
  write_text_file(dir_ / manifest_.labels_dir / (frame.id + ".txt"), format_label_file(frame.labels));
  if (!frame.overlay.empty()) {
    // Symbol glyphs stay out of the training pixels; they go to a side directory.
    Image layer(frame.image.width, frame.image.height, 0);
    for (std::size_t i = 0; i < frame.overlay.size(); ++i) {
      const std::uint8_t v = frame.overlay[i] ? 255 : 0;
      layer.rgb[i * 3] = layer.rgb[i * 3 + 1] = layer.rgb[i * 3 + 2] = v;
    }
    std::error_code ec;
    fs::create_directories(dir_ / "debug", ec);
    if (ec) throw IoError("cannot create " + (dir_ / "debug").string() + ": " + ec.message());
    write_binary(dir_ / "debug" / (frame.id + ".png"), encode_png(layer));
  }
  manifest_.frame_ids.push_back(frame.id);
  for (const auto& b : frame.labels) {
    if (b.class_id >= 0 && b.class_id < kNumClasses) ++manifest_.counts[static_cast<std::size_t>(b.class_id)];
  }
}

DatasetManifest DatasetWriter::finish() {
  std::sort(manifest_.frame_ids.begin(), manifest_.frame_ids.end());
  if (std::adjacent_find(manifest_.frame_ids.begin(), manifest_.frame_ids.end()) != manifest_.frame_ids.end()) {
    throw Error("duplicate frame id in dataset " + dir_.string());
  }
  write_text_file(dir_ / kManifestName, format_manifest(manifest_));
  return manifest_;
}

DatasetManifest export_yolo(std::span<const LabeledFrame> frames, const fs::path& out_dir,
                            const std::vector<std::string>& class_names) {
  DatasetWriter writer(out_dir, class_names);
  for (const auto& f : frames) writer.add(f);
  return writer.finish();
}

std::vector<std::pair<std::string, std::vector<BoundingBox>>> read_dataset_labels(const fs::path& dataset_dir) {
  const auto manifest = read_manifest(dataset_dir);
  std::vector<std::pair<std::string, std::vector<BoundingBox>>> out;
  out.reserve(manifest.frame_ids.size());
  for (const auto& id : manifest.frame_ids) {
    const auto path = dataset_dir / manifest.labels_dir / (id + ".txt");
    try {
      out.emplace_back(id, parse_label_file(read_file_text(path)));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return out;
}

std::string record_of_frame(std::string_view frame_id) {
  const auto cut = frame_id.rfind('_');
  return std::string(cut == std::string_view::npos ? frame_id : frame_id.substr(0, cut));
}

std::vector<LabeledFrame> frames_for_record(const SignalRecord& record, std::span<const ClassifiedBeat> beats,
                                            const BuildOptions& options) {
  std::vector<LabeledFrame> out;
  for (const auto& window : extract_windows(record, beats, options.window)) {
    auto frame = render_frame(window, options.style);
    if (options.augment) frame = augment(frame, frame_seed(options.seed, frame.id), options.augment_options);
    out.push_back(std::move(frame));
  }
  return out;
}

BuildSummary build_dataset(const BuildOptions& options, const fs::path& out_dir) {
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !fs::exists(out_dir / kManifestName)) {
    throw ConfigError("output directory " + out_dir.string() + " exists and is not an ecgyolo dataset");
  }
  const fs::path staging = out_dir.string() + ".partial";
  fs::remove_all(staging);

  BuildSummary summary;
  try {
    std::vector<std::string> ids = options.record_ids.empty() ? list_records(options.records_dir) : options.record_ids;
    ids = filter_records(ids, options.excluded_records);
    DatasetWriter writer(staging, class_names());
    for (const auto& id : ids) {
      const auto record = read_record(options.records_dir, id);
      const auto annotations = read_annotations(options.records_dir, id, record.sampling_rate, record.num_samples);
      const auto beats = classify_beats(annotations, options.symbol_map);
      if (record.num_samples < frame_length_samples(options.window.frame_s, record.sampling_rate)) {
        summary.records_skipped.push_back(id);
        continue;
      }
      summary.records_used.push_back(id);
      for (const auto& frame : frames_for_record(record, beats, options)) {
        summary.windowed_beats += frame.labels.size();
        if (frame.provenance.grayscale_applied) ++summary.grayscale_frames;
        writer.add(frame);
      }
    }
    summary.manifest = writer.finish();
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(out_dir);
  fs::rename(staging, out_dir);
  return summary;
}

ClassCounts reference_class_counts() noexcept { return {6424, 2225, 2899, 711, 640}; }

std::string class_count_comparison(const ClassCounts& counts) {
  const auto ref = reference_class_counts();
  std::ostringstream os;
  os << "class   toolkit   published   deviation\n";
  std::size_t total = 0, ref_total = 0;
  char buf[96];
  for (int c = 0; c < kNumClasses; ++c) {
    const auto i = static_cast<std::size_t>(c);
    total += counts[i];
    ref_total += ref[i];
    std::snprintf(buf, sizeof buf, "%-5s %9zu %11zu %+10.1f%%\n", std::string(class_name(c)).c_str(), counts[i],
                  ref[i], 100.0 * (static_cast<double>(counts[i]) - ref[i]) / ref[i]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-5s %9zu %11zu %+10.1f%%\n", "total", total, ref_total,
                100.0 * (static_cast<double>(total) - ref_total) / ref_total);
  os << buf;
  return os.str();
}

}  // namespace ecgyolo
