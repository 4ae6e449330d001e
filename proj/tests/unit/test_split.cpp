#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ecgyolo/errors.hpp"
#include "ecgyolo/split.hpp"
#include "tempdir.hpp"

using namespace ecgyolo;

namespace {

// Frames with a skewed class mix like a real build: mostly N with one or two
// ectopic beats, spread over `groups` records.
std::vector<FrameClasses> synthetic_frames(std::size_t n, int groups, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> ectopic({0, 40, 40, 10, 10});
  std::vector<FrameClasses> out;
  for (std::size_t i = 0; i < n; ++i) {
    FrameClasses f;
    f.group = std::to_string(100 + rng() % static_cast<unsigned>(groups));
    f.id = f.group + "_" + std::to_string(i);
    f.counts[0] = 8 + rng() % 5;
    f.counts[static_cast<std::size_t>(ectopic(rng))] += 1 + rng() % 2;
    out.push_back(f);
  }
  return out;
}

std::array<double, kNumClasses> class_share(std::span<const FrameClasses> frames, const SplitAssignment& a,
                                            Partition p, const ClassCounts& totals) {
  std::array<double, kNumClasses> share{};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (a.tags[i] != p) continue;
    for (std::size_t c = 0; c < share.size(); ++c) share[c] += static_cast<double>(frames[i].counts[c]);
  }
  for (std::size_t c = 0; c < share.size(); ++c) share[c] = totals[c] ? share[c] / static_cast<double>(totals[c]) : 0;
  return share;
}

ClassCounts totals_of(std::span<const FrameClasses> frames) {
  ClassCounts t{};
  for (const auto& f : frames) {
    for (std::size_t c = 0; c < t.size(); ++c) t[c] += f.counts[c];
  }
  return t;
}

}  // namespace

TEST_SUITE("split") {
  TEST_CASE("holdout sizes follow the ratios within one frame") {
    for (std::size_t n : {10u, 97u, 1000u, 2357u}) {
      const auto frames = synthetic_frames(n, 20, n);
      const auto a = stratified_holdout(frames, {0.82, 0.12, 0.06}, 7);
      CAPTURE(n);
      CHECK(std::abs(static_cast<double>(a.count(Partition::train)) - 0.82 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(a.count(Partition::val)) - 0.12 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(a.count(Partition::test)) - 0.06 * n) <= 1.0);
      CHECK(a.count(Partition::train) + a.count(Partition::val) + a.count(Partition::test) == n);
    }
  }

  TEST_CASE("documented holdout and fold sizes") {
    std::vector<FrameClasses> one(100);
    for (std::size_t i = 0; i < one.size(); ++i) {
      one[i].id = "f" + std::to_string(i);
      one[i].group = "r";
      one[i].counts[1] = 1;
    }
    const auto a = stratified_holdout(one, {0.82, 0.12, 0.06}, 5);
    CHECK(a.count(Partition::train) == 82);
    CHECK(a.count(Partition::val) == 12);
    CHECK(a.count(Partition::test) == 6);
    for (const auto& fold : kfold(one, 10, 5)) CHECK(fold.count(Partition::val) == 10);

    auto two = one;
    for (std::size_t i = 0; i < two.size(); i += 2) two[i].counts = {0, 0, 1, 0, 0};
    const auto b = stratified_holdout(two, {0.82, 0.12, 0.06}, 5);
    for (auto p : {Partition::train, Partition::val, Partition::test}) {
      long first = 0, second = 0;
      for (std::size_t i = 0; i < two.size(); ++i) {
        if (b.tags[i] != p) continue;
        (i % 2 == 0 ? first : second) += 1;
      }
      CAPTURE(static_cast<int>(p));
      CHECK(std::abs(first - second) <= 1);
    }
  }

  TEST_CASE("holdout keeps class proportions") {
    const auto frames = synthetic_frames(3000, 40, 1);
    const auto totals = totals_of(frames);
    const auto a = stratified_holdout(frames, {0.82, 0.12, 0.06}, 3);
    const std::array<double, 3> ratios = {0.82, 0.12, 0.06};
    for (auto p : {Partition::train, Partition::val, Partition::test}) {
      const auto share = class_share(frames, a, p, totals);
      for (std::size_t c = 0; c < share.size(); ++c) {
        if (totals[c] < 10) continue;
        CAPTURE(c);
        CHECK(std::abs(share[c] - ratios[static_cast<std::size_t>(p)]) <= 0.02);
      }
    }
  }

  TEST_CASE("holdout is deterministic per seed") {
    const auto frames = synthetic_frames(500, 10, 2);
    CHECK(stratified_holdout(frames, {0.8, 0.1, 0.1}, 5).tags == stratified_holdout(frames, {0.8, 0.1, 0.1}, 5).tags);
    CHECK(stratified_holdout(frames, {0.8, 0.1, 0.1}, 5).tags != stratified_holdout(frames, {0.8, 0.1, 0.1}, 6).tags);
  }

  TEST_CASE("invalid ratios and k are rejected") {
    const auto frames = synthetic_frames(20, 3, 2);
    CHECK_THROWS_AS(stratified_holdout(frames, {0.8, 0.1, 0.2}, 1), ConfigError);
    CHECK_THROWS_AS(stratified_holdout(frames, {1.0, 0.0, 0.0}, 1), ConfigError);
    CHECK_THROWS_AS(kfold(frames, 1, 1), ConfigError);
    CHECK_THROWS_AS(kfold(frames, 21, 1), ConfigError);
    CHECK_THROWS_AS(parse_strategy("random"), ConfigError);
  }

  TEST_CASE("ten folds are disjoint, covering and balanced") {
    const auto frames = synthetic_frames(2000, 40, 11);
    const auto totals = totals_of(frames);
    const auto folds = kfold(frames, 10, 13);
    REQUIRE(folds.size() == 10);
    std::vector<int> seen(frames.size(), 0);
    for (const auto& f : folds) {
      const auto val = f.count(Partition::val);
      CHECK((val == 200));
      CHECK(f.count(Partition::train) == frames.size() - val);
      for (std::size_t i = 0; i < frames.size(); ++i) seen[i] += f.tags[i] == Partition::val;
      const auto share = class_share(frames, f, Partition::val, totals);
      for (std::size_t c = 0; c < share.size(); ++c) {
        if (totals[c] < 10) continue;
        CAPTURE(c);
        CHECK(std::abs(share[c] - 0.1) <= 0.02);
      }
    }
    for (int s : seen) CHECK(s == 1);
  }

  TEST_CASE("uneven fold sizes differ by at most one") {
    const auto frames = synthetic_frames(1003, 10, 4);
    std::set<std::size_t> sizes;
    for (const auto& f : kfold(frames, 10, 1)) sizes.insert(f.count(Partition::val));
    CHECK(*sizes.rbegin() - *sizes.begin() <= 1);
  }

  TEST_CASE("patient-wise splits never share a record") {
    const auto frames = synthetic_frames(800, 23, 5);
    auto check_groups = [&](const SplitAssignment& a) {
      std::map<std::string, Partition> owner;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        auto [it, fresh] = owner.emplace(frames[i].group, a.tags[i]);
        CHECK((fresh || it->second == a.tags[i]));
      }
    };
    check_groups(stratified_holdout(frames, {0.7, 0.2, 0.1}, 1, SplitStrategy::patient_wise));
    const auto folds = kfold(frames, 5, 1, SplitStrategy::patient_wise);
    for (const auto& f : folds) check_groups(f);
    CHECK(parse_strategy("patient-wise") == SplitStrategy::patient_wise);
  }

  TEST_CASE("frame classes and list files") {
    const std::vector<BoundingBox> labels = {{0, .1, .5, .1, .1}, {2, .3, .5, .1, .1}, {2, .5, .5, .1, .1}};
    const auto fc = frame_classes("105_000001234", labels);
    CHECK(fc.group == "105");
    CHECK(fc.counts == ClassCounts{1, 0, 2, 0, 0});

    TempDir dir("split");
    const auto frames = synthetic_frames(50, 4, 9);
    const auto a = stratified_holdout(frames, {0.8, 0.1, 0.1}, 1);
    write_holdout_lists(dir.path(), a);
    auto train = read_id_list(dir / "train.txt");
    auto want = a.members(Partition::train);
    std::sort(want.begin(), want.end());
    CHECK(train == want);
    const auto folds = kfold(frames, 5, 1);
    write_fold_lists(dir.path(), folds);
    CHECK(read_id_list(dir / "fold_4_val.txt").size() == 10);
    CHECK_THROWS(read_id_list(dir / "missing.txt"));
  }
}
