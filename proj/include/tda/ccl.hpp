#pragma once

#include <cstdint>
#include <vector>

#include "tda/raster.hpp"

namespace tda {

enum class Connectivity { four = 4, eight = 8 };

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Component labels over a mask: 0 is background, components are numbered
// 1..count in order of their first pixel in a raster scan.
class LabelMap {
 public:
  LabelMap(int width, int height, std::vector<std::int32_t> labels, int count);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int count() const noexcept { return count_; }
  std::int32_t operator()(int x, int y) const noexcept {
    return labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }

 private:
  int width_;
  int height_;
  std::vector<std::int32_t> labels_;
  int count_;
};

// Two-pass labeling with a union-find equivalence table.
LabelMap label_components(const BinaryMask& mask, Connectivity conn = Connectivity::eight);

// Pixels of one component in raster order. Throws RangeError unless
// 1 <= label <= count.
std::vector<Pixel> component_pixels(const LabelMap& lm, int label);

}  // namespace tda
