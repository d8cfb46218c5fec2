#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library paths they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "tda/raster.hpp"

namespace oracle {

inline tda::BinaryMask random_mask(int w, int h, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = (static_cast<double>(rng() >> 11) * 0x1.0p-53) < density ? 1 : 0;
  return tda::BinaryMask(w, h, std::move(v));
}

inline std::vector<double> random_values(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  return v;
}

// Breadth-first flood fill; labels in raster order of each component's
// first pixel.
inline std::vector<int> flood_fill_labels(const tda::BinaryMask& m, bool eight, int* count = nullptr) {
  const int w = m.width(), h = m.height();
  std::vector<int> lab(m.size(), 0);
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m(x, y) || lab[y * w + x]) continue;
      ++next;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      lab[y * w + x] = next;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!m(nx, ny) || lab[ny * w + nx]) continue;
            lab[ny * w + nx] = next;
            q.push({nx, ny});
          }
        }
      }
    }
  }
  if (count) *count = next;
  return lab;
}

// True when the two labelings induce the same partition (bijective
// relabeling between them).
template <typename A, typename B>
bool same_partition(const A& a, const B& b) {
  if (a.size() != b.size()) return false;
  std::map<long, long> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long x = a[i], y = b[i];
    if ((x == 0) != (y == 0)) return false;
    auto [it, ins] = fwd.emplace(x, y);
    if (!ins && it->second != y) return false;
    auto [jt, jns] = bwd.emplace(y, x);
    if (!jns && jt->second != x) return false;
  }
  return true;
}

// Direct bilinear sample of a w x h grid at output cell (ox, oy) of an
// out x out resize, half-pixel centers, edge clamped.
inline double bilinear_sample(const std::vector<double>& src, int w, int h, int out, int ox, int oy) {
  auto coord = [](int i, int extent, int size) {
    double c = (i + 0.5) * extent / static_cast<double>(size) - 0.5;
    if (c < 0) c = 0;
    if (c > extent - 1) c = extent - 1;
    return c;
  };
  const double sx = coord(ox, w, out), sy = coord(oy, h, out);
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = sx - x0, fy = sy - y0;
  auto at = [&](int x, int y) { return src[static_cast<std::size_t>(y) * w + x]; };
  const double top = at(x0, y0) * (1 - fx) + at(x1, y0) * fx;
  const double bot = at(x0, y1) * (1 - fx) + at(x1, y1) * fx;
  return top * (1 - fy) + bot * fy;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tda_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
