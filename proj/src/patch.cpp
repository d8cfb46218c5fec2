#include "tda/patch.hpp"

#include <algorithm>
#include <cmath>

namespace tda {

const char* to_string(Resample mode) { return mode == Resample::nearest ? "nearest" : "bilinear"; }

std::optional<Resample> parse_resample(std::string_view name) {
  if (name == "nearest") return Resample::nearest;
  if (name == "bilinear") return Resample::bilinear;
  return std::nullopt;
}

std::vector<AxisTap> axis_taps(int extent, int size, Resample mode) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(size));
  const double scale = static_cast<double>(extent) / static_cast<double>(size);
  for (int i = 0; i < size; ++i) {
    auto& t = taps[i];
    if (mode == Resample::nearest) {
      const int src = static_cast<int>(std::floor((i + 0.5) * scale));
      t.i0 = t.i1 = std::min(src, extent - 1);
      continue;
    }
    const double src = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(extent - 1));
    t.i0 = static_cast<int>(std::floor(src));
    t.i1 = std::min(t.i0 + 1, extent - 1);
    t.w1 = t.i1 == t.i0 ? 0.0 : src - t.i0;
    t.w0 = 1.0 - t.w1;
  }
  return taps;
}

namespace detail {

void check_crop(int grid_w, int grid_h, const BBox& bbox, int size) {
  if (size < 1) throw DomainError("patch size must be >= 1");
  if (!bbox.fits(grid_w, grid_h)) throw RangeError("crop box exceeds grid bounds");
}

}  // namespace detail

void crop_resize_backward_into(const Patch& grad_patch, const BBox& bbox, Resample mode,
                               double scale, RealGrid& out) {
  if (grad_patch.mode != mode) throw DomainError("patch resample mode mismatch");
  const int size = grad_patch.size;
  detail::check_crop(out.width(), out.height(), bbox, size);
  if (grad_patch.data.size() != static_cast<std::size_t>(size) * size) {
    throw ShapeMismatch("gradient patch length does not match its size");
  }
  const auto tx = axis_taps(bbox.width(), size, mode);
  const auto ty = axis_taps(bbox.height(), size, mode);
  auto g = out.mutable_values();
  for (int oy = 0; oy < size; ++oy) {
    const auto& ay = ty[oy];
    const int y0 = bbox.y0 + ay.i0;
    const int y1 = bbox.y0 + ay.i1;
    for (int ox = 0; ox < size; ++ox) {
      const double v = scale * grad_patch.data[static_cast<std::size_t>(oy) * size + ox];
      if (v == 0.0) continue;
      const auto& ax = tx[ox];
      const int x0 = bbox.x0 + ax.i0;
      const int x1 = bbox.x0 + ax.i1;
      g[out.index(x0, y0)] += ay.w0 * (ax.w0 * v);
      if (ax.w1 != 0.0) g[out.index(x1, y0)] += ay.w0 * (ax.w1 * v);
      if (ay.w1 != 0.0) {
        g[out.index(x0, y1)] += ay.w1 * (ax.w0 * v);
        if (ax.w1 != 0.0) g[out.index(x1, y1)] += ay.w1 * (ax.w1 * v);
      }
    }
  }
}

RealGrid crop_resize_backward(const Patch& grad_patch, const BBox& bbox, int grid_width,
                              int grid_height, Resample mode) {
  RealGrid out(grid_width, grid_height, 0.0);
  crop_resize_backward_into(grad_patch, bbox, mode, 1.0, out);
  return out;
}

}  // namespace tda
