#include <doctest.h>

#include <cmath>
#include <random>

#include "ecgyolo/errors.hpp"
#include "ecgyolo/render.hpp"
#include "oracles.hpp"

using namespace ecgyolo;

namespace {

SignalRecord flat_record(std::int64_t n, double fs = 360.0) {
  SignalRecord r;
  r.record_id = "t";
  r.sampling_rate = fs;
  r.num_samples = n;
  r.channels.resize(1);
  r.samples.assign(1, std::vector<std::int16_t>(static_cast<std::size_t>(n), 0));
  return r;
}

void add_triangle(SignalRecord& r, std::int64_t center, int half_width, int peak) {
  for (int k = -half_width; k <= half_width; ++k) {
    auto& s = r.samples[0][static_cast<std::size_t>(center + k)];
    s = static_cast<std::int16_t>(s + peak * (half_width - std::abs(k)) / half_width);
  }
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("windows are centered, shifted to fit and deduplicated") {
    const auto rec = flat_record(36000);
    const std::vector<ClassifiedBeat> beats = {{100, AamiClass::V, 'V'},    {5000, AamiClass::S, 'A'},
                                               {5500, AamiClass::V, 'V'},   {6000, AamiClass::N, 'N'},
                                               {35990, AamiClass::F, 'F'}};
    const auto w = extract_windows(rec, beats);
    REQUIRE(w.size() == 3);
    CHECK(w[0].start_sample == 0);                       // shifted right to fit
    CHECK(w[1].start_sample == 5000 - 1800);             // centered
    CHECK(w[2].start_sample == 36000 - 3600);            // shifted left
    CHECK(w[1].length_samples == 3600);
    CHECK(w[1].beats.size() == 3);                       // A, V and N all inside
    CHECK(w[1].beats[0] == WindowBeat{1800, AamiClass::S, 'A'});
    CHECK(w[1].id() == "t_000003200");
    WindowOptions no_dedup;
    no_dedup.dedup_spacing_s = 0;
    CHECK(extract_windows(rec, beats, no_dedup).size() == 4);
    CHECK_THROWS_AS(extract_windows(flat_record(3599), beats), RecordTooShort);
  }

  TEST_CASE("single beats give the documented windows") {
    const auto rec = flat_record(360 * 200);
    const std::vector<ClassifiedBeat> v = {{36000, AamiClass::V, 'V'}};
    auto w = extract_windows(rec, v);
    REQUIRE(w.size() == 1);
    CHECK(w[0].start_sample == 95 * 360);
    CHECK(w[0].start_sample + w[0].length_samples == 105 * 360);
    const std::vector<ClassifiedBeat> s = {{720, AamiClass::S, 'A'}};
    w = extract_windows(rec, s);
    REQUIRE(w.size() == 1);
    CHECK(w[0].start_sample == 0);
    CHECK(w[0].length_samples == 3600);
    const std::vector<ClassifiedBeat> pair = {{36000, AamiClass::V, 'V'}, {36360, AamiClass::V, 'V'}};
    CHECK(extract_windows(rec, pair).size() == 1);
  }

  TEST_CASE("rotated hull contains every rotated corner") {
    const BoundingBox b{0, 0.5, 0.5, 0.2, 0.1};
    const auto q = rotate_box(b, 1.0);
    const double a = 1.0 * 3.14159265358979323846 / 180.0;
    double x0 = 1, x1 = 0, y0 = 1, y1 = 0;
    for (double dx : {-0.1, 0.1}) {
      for (double dy : {-0.05, 0.05}) {
        const double x = 0.5 + dx * std::cos(a) - dy * std::sin(a);
        const double y = 0.5 + dx * std::sin(a) + dy * std::cos(a);
        x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
      }
    }
    CHECK(q.class_id == 0);
    CHECK(q.left() == doctest::Approx(x0).epsilon(1e-9));
    CHECK(q.right() == doctest::Approx(x1).epsilon(1e-9));
    CHECK(q.top() == doctest::Approx(y0).epsilon(1e-9));
    CHECK(q.bottom() == doctest::Approx(y1).epsilon(1e-9));
  }

  TEST_CASE("box geometry on a triangle pulse") {
    auto rec = flat_record(3600);
    add_triangle(rec, 1800, 36, 1000);
    add_triangle(rec, 600, 36, -200);  // sets the window minimum away from the beat
    const std::vector<ClassifiedBeat> beats = {{1800, AamiClass::V, 'V'}};
    const auto win = make_window(rec, beats, 0, 3600);
    const auto boxes = compute_boxes(win);
    REQUIRE(boxes.size() == 1);
    const auto& b = boxes[0];
    // Scale: max 1000 -> 0.05, min -200 -> 0.95. Beat region min is 0 -> 0.05 + 1000/1200 * 0.9 = 0.8.
    CHECK(b.class_id == 2);
    CHECK(b.left() == doctest::Approx((1800 - 126) / 3600.0));
    CHECK(b.right() == doctest::Approx((1800 + 126) / 3600.0));
    CHECK(b.top() == doctest::Approx(0.05 - 0.01));
    CHECK(b.bottom() == doctest::Approx(0.80 + 0.01));
  }

  TEST_CASE("flat signal gets the minimum box height") {
    const auto rec = flat_record(3600);
    const std::vector<ClassifiedBeat> beats = {{1800, AamiClass::S, 'A'}, {3590, AamiClass::V, 'V'}};
    const auto boxes = compute_boxes(make_window(rec, beats, 0, 3600));
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0].h == doctest::Approx(0.02));
    CHECK(boxes[0].cy == doctest::Approx(0.5));
    CHECK(boxes[1].right() == doctest::Approx(1.0));  // clipped at the window edge
    CHECK(is_valid(boxes[1]));
  }

  TEST_CASE("rendered trace stays inside the vertical margin and is deterministic") {
    auto rec = flat_record(3600);
    add_triangle(rec, 1800, 36, 1000);
    const auto win = make_window(rec, std::vector<ClassifiedBeat>{{1800, AamiClass::V, 'V'}}, 0, 3600);
    const auto f = render_frame(win);
    REQUIRE(f.image.width == 640);
    int top_ink = 640, bottom_ink = -1;
    for (int y = 0; y < 640; ++y) {
      for (int x = 0; x < 640; ++x) {
        if (f.image.at(x, y, 0) == 0) top_ink = std::min(top_ink, y), bottom_ink = std::max(bottom_ink, y);
      }
    }
    CHECK(top_ink >= static_cast<int>(0.05 * 640) - 2);
    CHECK(bottom_ink <= static_cast<int>(0.95 * 640) + 2);
    CHECK(encode_png(f.image) == encode_png(render_frame(win).image));
    RenderStyle bad;
    bad.line_width = 0;
    CHECK_THROWS_AS(render_frame(win, bad), ConfigError);
  }

  TEST_CASE("PNG encoder output decodes to the same pixels") {
    std::mt19937_64 rng(5);
    Image img(37, 23, 0);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng());
    const auto png = encode_png(img);
    const auto d = oracle::decode_png(png);
    CHECK(d.width == 37);
    CHECK(d.height == 23);
    CHECK(d.bit_depth == 8);
    CHECK(d.color_type == 2);
    CHECK(d.pixels == img.rgb);
  }

  TEST_CASE("grayscale draws hit the configured rate") {
    int hits = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      const auto d = draw_augmentation(frame_seed(42, "rec_" + std::to_string(s)));
      hits += d.grayscale;
      CHECK(std::abs(d.angle_deg) <= 1.0);
    }
    CHECK(std::abs(hits / 10000.0 - 0.75) <= 0.02);
    AugmentOptions never;
    never.grayscale_probability = 0;
    CHECK_FALSE(draw_augmentation(1, never).grayscale);
  }

  TEST_CASE("grayscale conversion uses luma and keeps channels equal") {
    Image img(1, 1, 0);
    img.rgb = {255, 0, 0};
    const auto g = to_grayscale(img);
    CHECK(g.rgb[0] == g.rgb[1]);
    CHECK(g.rgb[1] == g.rgb[2]);
    CHECK(std::abs(int(g.rgb[0]) - 76) <= 1);
  }

  TEST_CASE("rotated boxes follow rotated corners") {
    const BoundingBox b{1, 0.3, 0.5, 0.2, 0.1};
    CHECK(rotate_box(b, 0.0) == b);
    const auto q = rotate_box(b, 90.0);
    CHECK(q.cx == doctest::Approx(0.5));
    CHECK(q.cy == doctest::Approx(0.3));
    CHECK(q.w == doctest::Approx(0.1));
    CHECK(q.h == doctest::Approx(0.2));

    // Paint the box, rotate the image, and compare with the ink's extent.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      auto box = oracle::random_box(rng, 1, 0.1, 0.4);
      box.cx = std::clamp(box.cx, 0.3, 0.7);
      box.cy = std::clamp(box.cy, 0.3, 0.7);
      const double angle = std::uniform_real_distribution<double>(-10, 10)(rng);
      Image img(200, 200, 255);
      for (int y = 0; y < 200; ++y) {
        for (int x = 0; x < 200; ++x) {
          const double u = (x + 0.5) / 200, v = (y + 0.5) / 200;
          if (u >= box.left() && u < box.right() && v >= box.top() && v < box.bottom()) {
            img.rgb[(static_cast<std::size_t>(y) * 200 + x) * 3] = 0;
          }
        }
      }
      const auto rot = rotate_image(img, angle);
      int x0 = 200, y0 = 200, x1 = -1, y1 = -1;
      for (int y = 0; y < 200; ++y) {
        for (int x = 0; x < 200; ++x) {
          if (rot.at(x, y, 0) == 0) x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
      }
      const auto want = rotate_box(box, angle, 200, 200);
      CAPTURE(angle);
      CHECK(std::abs(x0 / 200.0 - want.left()) < 0.015);
      CHECK(std::abs((x1 + 1) / 200.0 - want.right()) < 0.015);
      CHECK(std::abs(y0 / 200.0 - want.top()) < 0.015);
      CHECK(std::abs((y1 + 1) / 200.0 - want.bottom()) < 0.015);
    }
  }

  TEST_CASE("augmentation is a pure function of the seed") {
    auto rec = flat_record(3600);
    add_triangle(rec, 1800, 36, 1000);
    const auto f = render_frame(make_window(rec, std::vector<ClassifiedBeat>{{1800, AamiClass::V, 'V'}}, 0, 3600));
    const auto a = augment(f, 123);
    const auto b = augment(f, 123);
    CHECK(a.image == b.image);
    CHECK(a.labels == b.labels);
    CHECK(a.provenance.augmented);
    CHECK(a.provenance.seed == 123);
    CHECK(frame_seed(1, "a") != frame_seed(1, "b"));
    CHECK(frame_seed(1, "a") != frame_seed(2, "a"));
    for (const auto& l : a.labels) CHECK(is_valid(l));
  }

  TEST_CASE("debug symbols draw an overlay") {
    auto rec = flat_record(3600);
    RenderStyle style;
    style.debug_symbols = true;
    const auto f = render_frame(make_window(rec, std::vector<ClassifiedBeat>{{1800, AamiClass::V, 'V'}}, 0, 3600), style);
    REQUIRE(f.overlay.size() == 640u * 640u);
    CHECK(std::count(f.overlay.begin(), f.overlay.end(), 0) < static_cast<long>(f.overlay.size()));
    CHECK(render_frame(make_window(rec, {}, 0, 3600)).overlay.empty());
    // Glyphs never reach the training pixels.
    const auto plain = render_frame(make_window(rec, std::vector<ClassifiedBeat>{{1800, AamiClass::V, 'V'}}, 0, 3600));
    CHECK(f.image == plain.image);
  }
}
