#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "tda/synth.hpp"
#include "tda/targets.hpp"

using namespace tda;

TEST_CASE("dilate_bbox extends and clips") {
  CHECK(dilate_bbox({10, 10, 12, 12}, 3, 256, 256) == BBox{7, 7, 15, 15});
  CHECK(dilate_bbox({0, 0, 2, 2}, 5, 256, 256) == BBox{0, 0, 7, 7});
  CHECK(dilate_bbox({250, 250, 255, 255}, 4, 256, 256) == BBox{246, 246, 255, 255});
  CHECK(dilate_bbox({3, 4, 9, 5}, 0, 16, 16) == BBox{3, 4, 9, 5});
  CHECK_THROWS_AS(dilate_bbox({0, 0, 1, 1}, -1, 4, 4), DomainError);
}

TEST_CASE("local_contrast on constant regions") {
  BinaryMask m(8, 8, 0);
  std::vector<std::uint8_t> mv(64, 0);
  mv[3 * 8 + 3] = mv[3 * 8 + 4] = 1;
  m = BinaryMask(8, 8, mv);
  const auto lm = label_components(m);
  std::vector<double> iv(64, 100.0);
  iv[3 * 8 + 3] = iv[3 * 8 + 4] = 200.0;
  CHECK(local_contrast(GrayImage(8, 8, iv), lm, 1, {1, 1, 6, 6}) == 100.0);
  CHECK(local_contrast(GrayImage(8, 8, 77.0), lm, 1, {1, 1, 6, 6}) == 0.0);
}

TEST_CASE("local_contrast 5x5 worked example against brute-force means") {
  // Target: vertical 3-pixel line in the middle column.
  std::vector<std::uint8_t> mv(25, 0);
  mv[1 * 5 + 2] = mv[2 * 5 + 2] = mv[3 * 5 + 2] = 1;
  const BinaryMask mask(5, 5, mv);
  auto bg = oracle::random_values(22, 60, 140, 5);
  for (auto& v : bg) v = std::round(v);
  const double adjust = 2200.0 - std::accumulate(bg.begin(), bg.end(), 0.0);
  bg[0] += adjust;
  std::vector<double> iv(25);
  const double tv[3] = {180, 150, 210};
  int ti = 0, bi = 0;
  for (int i = 0; i < 25; ++i) iv[i] = mv[i] ? tv[ti++] : bg[bi++];

  double tsum = 0, bsum = 0;
  int tn = 0, bn = 0;
  for (int i = 0; i < 25; ++i) {
    (mv[i] ? tsum : bsum) += iv[i];
    (mv[i] ? tn : bn)++;
  }
  const double brute = tsum / tn - bsum / bn;
  REQUIRE(brute == doctest::Approx(80.0).epsilon(1e-14));
  CHECK(local_contrast(GrayImage(5, 5, iv), label_components(mask), 1, {0, 0, 4, 4}) ==
        doctest::Approx(80.0).epsilon(1e-14));
}

TEST_CASE("local_contrast shift and scale behaviour") {
  const auto scene = generate_scene(random_scene_spec(48, 48, 4, 21, 6.0), 21);
  const auto lm = label_components(scene.mask);
  const auto comps = summarize_components(lm);
  REQUIRE(!comps.empty());
  auto shifted = scene.image;
  for (auto& v : shifted.mutable_values()) v += 17.5;
  auto scaled = scene.image;
  for (auto& v : scaled.mutable_values()) v *= 2.5;
  for (const auto& c : comps) {
    const auto box = dilate_bbox(c.bbox, 3, 48, 48);
    const double base = local_contrast(scene.image, lm, c.label, box);
    CHECK(local_contrast(shifted, lm, c.label, box) == doctest::Approx(base).epsilon(1e-12));
    CHECK(local_contrast(scaled, lm, c.label, box) == doctest::Approx(2.5 * base).epsilon(1e-12));
  }
}

TEST_CASE("local_contrast degenerate region") {
  const BinaryMask m(3, 3, 1);
  const auto lm = label_components(m);
  CHECK_THROWS_AS(local_contrast(GrayImage(3, 3, 5.0), lm, 1, {0, 0, 2, 2}), DegenerateRegion);
}

TEST_CASE("extract_targets") {
  SUBCASE("empty mask") {
    const BinaryMask m(10, 10, 0);
    CHECK(extract_targets(m, GrayImage(10, 10, 1.0), label_components(m), 3).empty());
  }
  SUBCASE("single 3x3 square") {
    std::vector<std::uint8_t> mv(100, 0);
    for (int y = 4; y < 7; ++y)
      for (int x = 2; x < 5; ++x) mv[y * 10 + x] = 1;
    const BinaryMask m(10, 10, mv);
    const auto t = extract_targets(m, GrayImage(10, 10, 1.0), label_components(m), 3);
    REQUIRE(t.size() == 1);
    CHECK(t[0].scale == 9);
    CHECK(t[0].bbox == BBox{2, 4, 4, 6});
    CHECK(t[0].dilated_bbox == BBox{0, 1, 7, 9});
    CHECK(t[0].dilated_bbox.contains(t[0].bbox));
  }
  SUBCASE("scales sum to the foreground count") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = oracle::random_mask(30, 30, 0.2, seed);
      const auto img = GrayImage(30, 30, oracle::random_values(900, 0, 255, seed));
      const auto t = extract_targets(m, img, label_components(m), 2);
      long sum = 0;
      for (const auto& d : t) {
        sum += d.scale;
        CHECK(d.scale >= 1);
      }
      CHECK(sum == static_cast<long>(foreground_count(m)));
    }
  }
  SUBCASE("target filling its region falls back to the global mean") {
    // 3x4 block in a 4x4 image; with no dilation its box holds no background.
    std::vector<std::uint8_t> mv(16, 1);
    std::vector<double> iv(16, 200.0);
    for (int y = 0; y < 4; ++y) {
      mv[y * 4 + 3] = 0;
      iv[y * 4 + 3] = 40.0;
    }
    const BinaryMask m(4, 4, mv);
    const auto t = extract_targets(m, GrayImage(4, 4, iv), label_components(m), 0);
    REQUIRE(t.size() == 1);
    CHECK(t[0].contrast_fallback);
    CHECK(t[0].contrast == doctest::Approx(200.0 - (12 * 200.0 + 4 * 40.0) / 16.0));
    const auto t1 = extract_targets(m, GrayImage(4, 4, iv), label_components(m), 1);
    CHECK_FALSE(t1[0].contrast_fallback);
    CHECK(t1[0].contrast == 160.0);
  }
}

TEST_CASE("dataset_stats") {
  auto square = [](int w, int side, double fg, double bg) {
    std::vector<std::uint8_t> mv(static_cast<std::size_t>(w) * w, 0);
    std::vector<double> iv(mv.size(), bg);
    for (int y = 2; y < 2 + side; ++y)
      for (int x = 2; x < 2 + side; ++x) {
        mv[y * w + x] = 1;
        iv[y * w + x] = fg;
      }
    return Sample{GrayImage(w, w, iv), BinaryMask(w, w, mv)};
  };
  SUBCASE("mean scale of {4, 6}") {
    std::vector<std::uint8_t> mv(100, 0);
    for (int x = 1; x < 7; ++x) mv[50 + x] = 1;  // 1x6 line
    const std::vector<Sample> samples{square(12, 2, 150, 50), Sample{GrayImage(10, 10, 1.0), BinaryMask(10, 10, mv)}};
    const auto s = dataset_stats(samples, 3);
    CHECK(s.s_mean == 5.0);
    CHECK(s.n_targets == 2);
  }
  SUBCASE("single target contrast") {
    const std::vector<Sample> samples{square(16, 3, 180, 100)};
    CHECK(dataset_stats(samples, 3).c_mean == 80.0);
  }
  SUBCASE("no targets") {
    const std::vector<Sample> samples{Sample{GrayImage(8, 8, 0.0), BinaryMask(8, 8, 0)}};
    CHECK_THROWS_AS(dataset_stats(samples, 3), EmptyTrainingSet);
  }
  SUBCASE("20 scenes: brute re-scan and permutation invariance") {
    std::vector<Sample> samples;
    for (std::uint64_t k = 0; k < 20; ++k) {
      const auto sc = generate_scene(random_scene_spec(40, 40, 3, k), k);
      samples.push_back(Sample{sc.image, sc.mask});
    }
    // Re-scan with the flood-fill oracle and direct means.
    double ssum = 0, csum = 0;
    int n = 0;
    for (const auto& s : samples) {
      int count = 0;
      const auto lab = oracle::flood_fill_labels(s.mask, true, &count);
      for (int l = 1; l <= count; ++l) {
        int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1, sc = 0;
        for (int y = 0; y < 40; ++y)
          for (int x = 0; x < 40; ++x)
            if (lab[y * 40 + x] == l) {
              x0 = std::min(x0, x); y0 = std::min(y0, y);
              x1 = std::max(x1, x); y1 = std::max(y1, y);
              ++sc;
            }
        x0 = std::max(0, x0 - 3); y0 = std::max(0, y0 - 3);
        x1 = std::min(39, x1 + 3); y1 = std::min(39, y1 + 3);
        double t = 0, b = 0;
        int tn = 0, bn = 0;
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x) {
            if (lab[y * 40 + x] == l) { t += s.image(x, y); ++tn; }
            else { b += s.image(x, y); ++bn; }
          }
        ssum += sc;
        csum += t / tn - b / bn;
        ++n;
      }
    }
    const auto stats = dataset_stats(samples, 3);
    CHECK(stats.n_targets == n);
    CHECK(stats.s_mean == doctest::Approx(ssum / n).epsilon(1e-14));
    CHECK(stats.c_mean == doctest::Approx(csum / n).epsilon(1e-12));

    auto shuffled = samples;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 7, shuffled.end());
    CHECK(dataset_stats(shuffled, 3) == stats);
  }
}

TEST_CASE("dataset_stats from a manifest uses only the train split") {
  const auto dir = oracle::temp_dir("targets_manifest");
  DatasetManifest m;
  m.base_dir = dir;
  for (int k = 0; k < 3; ++k) {
    const auto sc = generate_scene(random_scene_spec(32, 32, 2, 40 + k), 40 + k);
    const auto i = "i" + std::to_string(k) + ".pgm", mk = "m" + std::to_string(k) + ".pgm";
    save_gray(dir / i, sc.image);
    save_mask(dir / mk, sc.mask);
    m.entries.push_back({i, mk, k == 2 ? Split::test : Split::train});
  }
  std::vector<Sample> train;
  for (const auto& e : m.split(Split::train)) train.push_back(load_sample(m, e));
  CHECK(dataset_stats(m, 3) == dataset_stats(train, 3));

  DatasetManifest only_test = m;
  for (auto& e : only_test.entries) e.split = Split::test;
  CHECK_THROWS_AS(dataset_stats(only_test, 3), EmptyTrainingSet);
}
