#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "tda/error.hpp"

namespace tda {

// Tags give each raster role its own type and value policy.
struct GrayTag {
  static void normalize(std::vector<double>&) {}
};

struct MaskTag {
  static void normalize(std::vector<std::uint8_t>& v) {
    for (auto x : v) {
      if (x > 1) throw DomainError("binary mask values must be 0 or 1");
    }
  }
};

struct ProbTag {
  static void normalize(std::vector<double>& v) {
    for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
  }
};

struct RealTag {
  static void normalize(std::vector<double>&) {}
};

// Row-major 2-D grid with immutable dimensions. Element (x, y) lives at
// index y * width + x.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{})
      : width_(checked_dim(width)), height_(checked_dim(height)),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    Tag::normalize(data_);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw ShapeMismatch("raster data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width_) + "x" +
                          std::to_string(height_));
    }
    Tag::normalize(data_);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<const T> values() const noexcept { return data_; }

  // Mutable access is limited to the policy-free roles (images, gradients);
  // masks and probability maps are rebuilt instead.
  std::span<T> mutable_values() noexcept
    requires(std::is_same_v<Tag, GrayTag> || std::is_same_v<Tag, RealTag>)
  {
    return data_;
  }

  template <typename OT, typename OTag>
  bool same_shape(const Raster<OT, OTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static int checked_dim(int d) {
    if (d < 1) throw ShapeMismatch("raster dimensions must be >= 1");
    return d;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Raster<double, GrayTag>;
using BinaryMask = Raster<std::uint8_t, MaskTag>;
using ProbMap = Raster<double, ProbTag>;
using RealGrid = Raster<double, RealTag>;

template <typename A, typename ATag, typename B, typename BTag>
void require_same_shape(const Raster<A, ATag>& a, const Raster<B, BTag>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(what) + ": shape " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                        std::to_string(b.height()));
  }
}

inline std::size_t foreground_count(const BinaryMask& mask) {
  return static_cast<std::size_t>(std::count(mask.values().begin(), mask.values().end(), 1));
}

}  // namespace tda
