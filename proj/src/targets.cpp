#include "tda/targets.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace tda {

BBox dilate_bbox(const BBox& b, int d, int width, int height) {
  if (d < 0) throw DomainError("dilation must be non-negative");
  return BBox{std::max(0, b.x0 - d), std::max(0, b.y0 - d), std::min(width - 1, b.x1 + d),
              std::min(height - 1, b.y1 + d)};
}

double local_contrast(const GrayImage& image, const LabelMap& lm, int label, const BBox& region) {
  if (image.width() != lm.width() || image.height() != lm.height()) {
    throw ShapeMismatch("local_contrast: image and label map differ in shape");
  }
  if (!region.fits(image.width(), image.height())) {
    throw RangeError("local_contrast: region outside image");
  }
  double target_sum = 0.0;
  double background_sum = 0.0;
  long target_n = 0;
  long background_n = 0;
  for (int y = region.y0; y <= region.y1; ++y) {
    for (int x = region.x0; x <= region.x1; ++x) {
      if (lm(x, y) == label) {
        target_sum += image(x, y);
        ++target_n;
      } else {
        background_sum += image(x, y);
        ++background_n;
      }
    }
  }
  if (target_n == 0) {
    throw RangeError("local_contrast: region holds no pixel of label " + std::to_string(label));
  }
  if (background_n == 0) {
    throw DegenerateRegion("local_contrast: target " + std::to_string(label) +
                           " fills its region");
  }
  return target_sum / static_cast<double>(target_n) -
         background_sum / static_cast<double>(background_n);
}

std::vector<ComponentSummary> summarize_components(const LabelMap& lm) {
  std::vector<ComponentSummary> out(static_cast<std::size_t>(lm.count()));
  for (int i = 0; i < lm.count(); ++i) {
    out[i].label = i + 1;
    out[i].bbox = BBox{lm.width(), lm.height(), -1, -1};
  }
  for (int y = 0; y < lm.height(); ++y) {
    for (int x = 0; x < lm.width(); ++x) {
      const int l = lm(x, y);
      if (l == 0) continue;
      auto& c = out[static_cast<std::size_t>(l - 1)];
      c.bbox.x0 = std::min(c.bbox.x0, x);
      c.bbox.y0 = std::min(c.bbox.y0, y);
      c.bbox.x1 = std::max(c.bbox.x1, x);
      c.bbox.y1 = std::max(c.bbox.y1, y);
      ++c.scale;
    }
  }
  return out;
}

TargetDescriptor describe_target(const GrayImage& image, const LabelMap& lm,
                                 const ComponentSummary& component, int dilation) {
  TargetDescriptor t;
  t.label = component.label;
  t.bbox = component.bbox;
  t.dilated_bbox = dilate_bbox(component.bbox, dilation, lm.width(), lm.height());
  t.scale = component.scale;
  try {
    t.contrast = local_contrast(image, lm, t.label, t.dilated_bbox);
  } catch (const DegenerateRegion&) {
    double target_sum = 0.0;
    for (int y = t.bbox.y0; y <= t.bbox.y1; ++y) {
      for (int x = t.bbox.x0; x <= t.bbox.x1; ++x) {
        if (lm(x, y) == t.label) target_sum += image(x, y);
      }
    }
    const auto all = image.values();
    const double global = std::accumulate(all.begin(), all.end(), 0.0) /
                          static_cast<double>(all.size());
    t.contrast = target_sum / static_cast<double>(t.scale) - global;
    t.contrast_fallback = true;
  }
  return t;
}

std::vector<TargetDescriptor> extract_targets(const BinaryMask& mask, const GrayImage& image,
                                              const LabelMap& lm, int dilation) {
  require_same_shape(mask, image, "extract_targets");
  if (mask.width() != lm.width() || mask.height() != lm.height()) {
    throw ShapeMismatch("extract_targets: label map differs in shape from mask");
  }
  std::vector<TargetDescriptor> out;
  for (const auto& c : summarize_components(lm)) {
    out.push_back(describe_target(image, lm, c, dilation));
  }
  return out;
}

DatasetStats dataset_stats(std::span<const Sample> samples, int dilation, Connectivity conn) {
  long scale_sum = 0;
  std::vector<double> contrasts;
  for (const auto& s : samples) {
    const auto lm = label_components(s.mask, conn);
    for (const auto& t : extract_targets(s.mask, s.image, lm, dilation)) {
      scale_sum += t.scale;
      contrasts.push_back(t.contrast);
    }
  }
  if (contrasts.empty()) throw EmptyTrainingSet("no targets in the training samples");
  // Summing in sorted order makes the mean independent of sample order.
  std::sort(contrasts.begin(), contrasts.end());
  const double c_sum = std::accumulate(contrasts.begin(), contrasts.end(), 0.0);
  const auto n = static_cast<double>(contrasts.size());
  return DatasetStats{static_cast<double>(scale_sum) / n, c_sum / n,
                      static_cast<int>(contrasts.size()), dilation};
}

DatasetStats dataset_stats(const DatasetManifest& manifest, int dilation, Connectivity conn) {
  std::vector<Sample> samples;
  for (const auto& e : manifest.split(Split::train)) samples.push_back(load_sample(manifest, e));
  if (samples.empty()) throw EmptyTrainingSet("manifest has no train entries");
  return dataset_stats(samples, dilation, conn);
}

}  // namespace tda
