#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "tda/raster.hpp"
#include "tda/targets.hpp"

namespace tda {

enum class Resample { nearest, bilinear };

const char* to_string(Resample mode);
std::optional<Resample> parse_resample(std::string_view name);

struct Patch {
  int size = 0;
  std::vector<double> data;
  BBox source_bbox;
  Resample mode = Resample::bilinear;
};

// Per-axis sampling taps for resizing `extent` source pixels to `size`
// outputs with the align-corners-false convention: output cell i reads
// source coordinate (i + 0.5) * extent / size - 0.5. Nearest mode picks
// floor((i + 0.5) * extent / size) with weight 1.
struct AxisTap {
  int i0 = 0;
  int i1 = 0;
  double w0 = 1.0;
  double w1 = 0.0;
};

std::vector<AxisTap> axis_taps(int extent, int size, Resample mode);

namespace detail {

void check_crop(int grid_w, int grid_h, const BBox& bbox, int size);

template <typename T, typename Tag>
Patch crop_resize_impl(const Raster<T, Tag>& grid, const BBox& bbox, int size, Resample mode) {
  check_crop(grid.width(), grid.height(), bbox, size);
  const auto tx = axis_taps(bbox.width(), size, mode);
  const auto ty = axis_taps(bbox.height(), size, mode);
  Patch p{size, std::vector<double>(static_cast<std::size_t>(size) * size), bbox, mode};
  for (int oy = 0; oy < size; ++oy) {
    const auto& ay = ty[oy];
    const int y0 = bbox.y0 + ay.i0;
    const int y1 = bbox.y0 + ay.i1;
    for (int ox = 0; ox < size; ++ox) {
      const auto& ax = tx[ox];
      const int x0 = bbox.x0 + ax.i0;
      const int x1 = bbox.x0 + ax.i1;
      double v = ay.w0 * (ax.w0 * static_cast<double>(grid(x0, y0)));
      if (ax.w1 != 0.0) v += ay.w0 * (ax.w1 * static_cast<double>(grid(x1, y0)));
      if (ay.w1 != 0.0) {
        v += ay.w1 * (ax.w0 * static_cast<double>(grid(x0, y1)));
        if (ax.w1 != 0.0) v += ay.w1 * (ax.w1 * static_cast<double>(grid(x1, y1)));
      }
      p.data[static_cast<std::size_t>(oy) * size + ox] = v;
    }
  }
  return p;
}

}  // namespace detail

// Crops bbox out of the grid and resamples it to size x size. Throws
// RangeError if bbox is not inside the grid.
template <typename T, typename Tag>
Patch crop_resize(const Raster<T, Tag>& grid, const BBox& bbox, int size, Resample mode) {
  return detail::crop_resize_impl(grid, bbox, size, mode);
}

// Transpose of crop_resize: scatters patch-space values back onto a
// grid_width x grid_height grid. Pixels outside bbox receive 0.
RealGrid crop_resize_backward(const Patch& grad_patch, const BBox& bbox, int grid_width,
                              int grid_height, Resample mode);

// Accumulating form of the above, used when several patches share a grid.
void crop_resize_backward_into(const Patch& grad_patch, const BBox& bbox, Resample mode,
                               double scale, RealGrid& out);

}  // namespace tda
