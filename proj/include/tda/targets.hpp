#pragma once

#include <span>
#include <vector>

#include "tda/ccl.hpp"
#include "tda/io.hpp"
#include "tda/raster.hpp"

namespace tda {

// Inclusive pixel bounds.
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool contains(const BBox& b) const noexcept {
    return b.x0 >= x0 && b.x1 <= x1 && b.y0 >= y0 && b.y1 <= y1;
  }
  bool fits(int w, int h) const noexcept {
    return x0 >= 0 && y0 >= 0 && x0 <= x1 && y0 <= y1 && x1 < w && y1 < h;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Extends every side by d and clips to [0, width) x [0, height).
BBox dilate_bbox(const BBox& b, int d, int width, int height);

// mean(target pixels in region) - mean(other pixels in region). Pixels of
// other components count as background. Throws DegenerateRegion when the
// region has no background pixels, RangeError when it has no target pixels.
double local_contrast(const GrayImage& image, const LabelMap& lm, int label, const BBox& region);

struct ComponentSummary {
  int label = 0;
  BBox bbox;
  int scale = 0;
};

// Tight boxes and pixel counts for all components, ordered by label.
std::vector<ComponentSummary> summarize_components(const LabelMap& lm);

struct TargetDescriptor {
  int label = 0;
  BBox bbox;
  BBox dilated_bbox;
  int scale = 0;
  double contrast = 0.0;
  // Set when the dilated box held no background and the contrast was taken
  // against the global image mean instead.
  bool contrast_fallback = false;
};

TargetDescriptor describe_target(const GrayImage& image, const LabelMap& lm,
                                 const ComponentSummary& component, int dilation);

std::vector<TargetDescriptor> extract_targets(const BinaryMask& mask, const GrayImage& image,
                                              const LabelMap& lm, int dilation);

struct DatasetStats {
  double s_mean = 0.0;
  double c_mean = 0.0;
  int n_targets = 0;
  int dilation = 3;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

// Means of scale and contrast over every target of the given samples.
// Throws EmptyTrainingSet if there are no targets at all.
DatasetStats dataset_stats(std::span<const Sample> samples, int dilation = 3,
                           Connectivity conn = Connectivity::eight);

// Same, over the train split of a manifest.
DatasetStats dataset_stats(const DatasetManifest& manifest, int dilation = 3,
                           Connectivity conn = Connectivity::eight);

}  // namespace tda
