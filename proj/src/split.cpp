#include "ecgyolo/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "ecgyolo/dataset.hpp"
#include "ecgyolo/errors.hpp"
#include "ecgyolo/formats.hpp"

namespace ecgyolo {
namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  // Fisher-Yates with an explicit bounded draw, identical on every platform.
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = 0;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(items[i - 1], items[static_cast<std::size_t>(r % bound)]);
  }
}

// Frame indices ordered bucket by bucket (rarest contained class first), each
// bucket shuffled by the seed.
std::vector<std::size_t> stratified_order(std::span<const FrameClasses> frames, std::uint64_t seed) {
  ClassCounts totals{};
  for (const auto& f : frames) {
    for (std::size_t c = 0; c < totals.size(); ++c) totals[c] += f.counts[c];
  }
  std::array<int, kNumClasses> by_rarity{};
  std::iota(by_rarity.begin(), by_rarity.end(), 0);
  std::stable_sort(by_rarity.begin(), by_rarity.end(), [&](int a, int b) {
    return totals[static_cast<std::size_t>(a)] < totals[static_cast<std::size_t>(b)];
  });

  std::vector<std::vector<std::size_t>> buckets(kNumClasses + 1);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::size_t bucket = kNumClasses;  // frames without labels
    for (std::size_t rank = 0; rank < by_rarity.size(); ++rank) {
      if (frames[i].counts[static_cast<std::size_t>(by_rarity[rank])] > 0) {
        bucket = rank;
        break;
      }
    }
    buckets[bucket].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order;
  order.reserve(frames.size());
  for (auto& bucket : buckets) {
    std::sort(bucket.begin(), bucket.end(), [&](std::size_t a, std::size_t b) { return frames[a].id < frames[b].id; });
    seeded_shuffle(bucket, rng);
    order.insert(order.end(), bucket.begin(), bucket.end());
  }
  return order;
}

// Groups (patients) in seeded order; each entry lists frame indices.
std::vector<std::vector<std::size_t>> shuffled_groups(std::span<const FrameClasses> frames, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < frames.size(); ++i) by_group[frames[i].group].push_back(i);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [_, members] : by_group) groups.push_back(std::move(members));
  std::mt19937_64 rng(seed);
  seeded_shuffle(groups, rng);
  return groups;
}

// Largest-remainder apportionment of n items.
std::array<std::size_t, 3> target_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    const double exact = ratios[p] * static_cast<double>(n);
    sizes[p] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[p] = exact - static_cast<double>(sizes[p]);
    assigned += sizes[p];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t p = 1; p < 3; ++p) {
      if (remainder[p] > remainder[best] + 1e-12) best = p;
    }
    ++sizes[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return sizes;
}

void validate_ratios(const std::array<double, 3>& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("split ratios must each lie in (0, 1)");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("split ratios must sum to 1");
}

SplitAssignment empty_assignment(std::span<const FrameClasses> frames, std::uint64_t seed, SplitStrategy strategy) {
  SplitAssignment a;
  a.seed = seed;
  a.strategy = strategy;
  a.frame_ids.reserve(frames.size());
  for (const auto& f : frames) a.frame_ids.push_back(f.id);
  a.tags.assign(frames.size(), Partition::train);
  return a;
}

}  // namespace

std::string_view partition_name(Partition p) noexcept {
  switch (p) {
    case Partition::train: return "train";
    case Partition::val: return "val";
    case Partition::test: return "test";
  }
  return "?";
}

std::string_view strategy_name(SplitStrategy s) noexcept {
  return s == SplitStrategy::patient_wise ? "patient-wise" : "image-stratified";
}

SplitStrategy parse_strategy(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "image-stratified" || n == "image") return SplitStrategy::image_stratified;
  if (n == "patient-wise" || n == "patient") return SplitStrategy::patient_wise;
  throw ConfigError("unknown split strategy '" + std::string(name) + "'");
}

FrameClasses frame_classes(std::string id, std::span<const BoundingBox> labels) {
  FrameClasses f;
  f.group = record_of_frame(id);
  f.id = std::move(id);
  for (const auto& b : labels) {
    if (b.class_id >= 0 && b.class_id < kNumClasses) ++f.counts[static_cast<std::size_t>(b.class_id)];
  }
  return f;
}

std::vector<std::string> SplitAssignment::members(Partition p) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < frame_ids.size(); ++i) {
    if (tags[i] == p) out.push_back(frame_ids[i]);
  }
  return out;
}

std::size_t SplitAssignment::count(Partition p) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), p));
}

SplitAssignment stratified_holdout(std::span<const FrameClasses> frames, std::array<double, 3> ratios,
                                   std::uint64_t seed, SplitStrategy strategy) {
  validate_ratios(ratios);
  SplitAssignment a = empty_assignment(frames, seed, strategy);
  const std::size_t n = frames.size();
  const auto target = target_sizes(n, ratios);
  std::array<std::size_t, 3> have{};

  if (strategy == SplitStrategy::image_stratified) {
    // Walk the bucketed order handing each frame to the partition furthest
    // behind its pro-rata quota, so every bucket is split by the ratios.
    const auto order = stratified_order(frames, seed);
    for (std::size_t j = 0; j < order.size(); ++j) {
      std::size_t best = 3;
      double best_deficit = -std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < 3; ++p) {
        if (have[p] >= target[p]) continue;
        const double deficit =
            static_cast<double>(target[p]) * static_cast<double>(j + 1) / static_cast<double>(n) -
            static_cast<double>(have[p]);
        if (deficit > best_deficit) {
          best_deficit = deficit;
          best = p;
        }
      }
      ++have[best];
      a.tags[order[j]] = static_cast<Partition>(best);
    }
  } else {
    for (const auto& group : shuffled_groups(frames, seed)) {
      std::size_t best = 0;
      double best_gap = -std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < 3; ++p) {
        const double gap = static_cast<double>(target[p]) - static_cast<double>(have[p]);
        if (gap > best_gap) {
          best_gap = gap;
          best = p;
        }
      }
      have[best] += group.size();
      for (auto i : group) a.tags[i] = static_cast<Partition>(best);
    }
  }
  return a;
}

std::vector<SplitAssignment> kfold(std::span<const FrameClasses> frames, int k, std::uint64_t seed,
                                   SplitStrategy strategy) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (static_cast<std::size_t>(k) > frames.size()) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds the number of frames (" + std::to_string(frames.size()) +
                      ")");
  }
  const auto nk = static_cast<std::size_t>(k);
  std::vector<int> fold_of(frames.size(), 0);
  std::vector<ClassCounts> fold_counts(nk, ClassCounts{});
  std::vector<std::size_t> fold_sizes(nk, 0);

  if (strategy == SplitStrategy::image_stratified) {
    ClassCounts totals{};
    for (const auto& f : frames) {
      for (std::size_t c = 0; c < totals.size(); ++c) totals[c] += f.counts[c];
    }
    auto load = [&](std::size_t fold, const FrameClasses& f) {
      double cost = 0.0;
      for (std::size_t c = 0; c < totals.size(); ++c) {
        if (totals[c] == 0) continue;
        const double share = static_cast<double>(fold_counts[fold][c] + f.counts[c]) / static_cast<double>(totals[c]);
        cost += share * share;
      }
      return cost;
    };
    // Deal in rounds of k so fold sizes never differ by more than one; inside a
    // round the heaviest frames go to the folds that are lightest for their classes.
    const auto order = stratified_order(frames, seed);
    for (std::size_t start = 0; start < order.size(); start += nk) {
      std::vector<std::size_t> round(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + nk)));
      std::stable_sort(round.begin(), round.end(), [&](std::size_t a, std::size_t b) {
        auto total = [&](std::size_t i) {
          return std::accumulate(frames[i].counts.begin(), frames[i].counts.end(), std::size_t{0});
        };
        return total(a) > total(b);
      });
      std::vector<bool> used(nk, false);
      // A partial final round goes to the currently smallest folds.
      std::vector<std::size_t> eligible(nk);
      std::iota(eligible.begin(), eligible.end(), std::size_t{0});
      std::stable_sort(eligible.begin(), eligible.end(),
                       [&](std::size_t a, std::size_t b) { return fold_sizes[a] < fold_sizes[b]; });
      eligible.resize(round.size());
      for (std::size_t item : round) {
        std::size_t best = nk;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t fold : eligible) {
          if (used[fold]) continue;
          const double cost = load(fold, frames[item]);
          if (cost < best_cost) {
            best_cost = cost;
            best = fold;
          }
        }
        used[best] = true;
        fold_of[item] = static_cast<int>(best);
        ++fold_sizes[best];
        for (std::size_t c = 0; c < totals.size(); ++c) fold_counts[best][c] += frames[item].counts[c];
      }
    }
  } else {
    auto groups = shuffled_groups(frames, seed);
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (const auto& group : groups) {
      const auto best = static_cast<std::size_t>(
          std::min_element(fold_sizes.begin(), fold_sizes.end()) - fold_sizes.begin());
      fold_sizes[best] += group.size();
      for (auto i : group) fold_of[i] = static_cast<int>(best);
    }
  }

  std::vector<SplitAssignment> out;
  for (int f = 0; f < k; ++f) {
    SplitAssignment a = empty_assignment(frames, seed, strategy);
    a.fold = f;
    for (std::size_t i = 0; i < frames.size(); ++i) a.tags[i] = fold_of[i] == f ? Partition::val : Partition::train;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {
std::string id_list(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  std::string out;
  for (const auto& id : ids) out += id + '\n';
  return out;
}
}  // namespace

void write_holdout_lists(const std::filesystem::path& dir, const SplitAssignment& split) {
  for (auto p : {Partition::train, Partition::val, Partition::test}) {
    write_text_file(dir / (std::string(partition_name(p)) + ".txt"), id_list(split.members(p)));
  }
}

void write_fold_lists(const std::filesystem::path& dir, std::span<const SplitAssignment> folds) {
  for (const auto& f : folds) {
    const std::string stem = "fold_" + std::to_string(f.fold);
    write_text_file(dir / (stem + "_train.txt"), id_list(f.members(Partition::train)));
    write_text_file(dir / (stem + "_val.txt"), id_list(f.members(Partition::val)));
  }
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::istringstream is(read_file_text(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace ecgyolo
