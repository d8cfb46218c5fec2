#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tda/ccl.hpp"
#include "tda/raster.hpp"

namespace tda {

enum class MatchRule { centroid, overlap };

const char* to_string(MatchRule rule);
std::optional<MatchRule> parse_match_rule(std::string_view name);

struct EvalConfig {
  // A pixel is predicted positive when p > threshold.
  double threshold = 0.5;
  MatchRule match = MatchRule::centroid;
  double centroid_distance = 3.0;
  // Upper bounds k of the cumulative bins (0, k].
  std::vector<double> bins_scale{20, 40, 60, 80, 100, 120, 140};
  std::vector<double> bins_contrast{30, 60, 90, 120, 150};
  int contrast_dilation = 3;
  Connectivity connectivity = Connectivity::eight;

  void validate() const;
};

BinaryMask binarize(const ProbMap& pred, double threshold);

// Dataset-level TP / (TP + FP + FN) over all pixels of all pairs.
double pixel_iou(std::span<const ProbMap> preds, std::span<const BinaryMask> gts, double threshold);

struct DetectionStats {
  long detected = 0;
  long total = 0;
  long fa_pixels = 0;
  long image_pixels = 0;

  friend bool operator==(const DetectionStats&, const DetectionStats&) = default;
};

// Per-target outcome of matching one prediction against its mask.
struct ImageMatch {
  std::vector<bool> gt_detected;  // indexed by GT label - 1
  long fa_pixels = 0;
  long image_pixels = 0;
};

// Centroid rule: a GT target is detected when some predicted component's
// centroid lies within centroid_distance of its centroid; pixels of
// predicted components matched to no target are false alarms.
// Overlap rule: detected when any predicted pixel falls on the target;
// false alarms are predicted pixels outside every target.
ImageMatch match_targets(const ProbMap& pred, const BinaryMask& mask, const EvalConfig& cfg);

DetectionStats detection_stats(const ProbMap& pred, const BinaryMask& mask, const EvalConfig& cfg);

struct PdFa {
  double pd = 0.0;
  double fa_e6 = 0.0;
};

// Pooled over images: sum(detected) / sum(total), 1e6 * sum(fa) / sum(pixels).
PdFa pd_fa(std::span<const DetectionStats> per_image);

struct RocPoint {
  double threshold = 0.0;
  double fa_e6 = 0.0;
  double pd = 0.0;
};

std::vector<RocPoint> roc(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                          const EvalConfig& cfg, std::span<const double> thresholds);

enum class BinAxis { scale, contrast };

struct BinRow {
  double upper = 0.0;
  long n = 0;
  long detected = 0;
  double pd = 0.0;  // 0 for an empty bin
};

// Pd over cumulative attribute ranges (0, k]. Contrast is measured on the
// image within each target's box dilated by cfg.contrast_dilation.
std::vector<BinRow> binned_pd(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                              std::span<const GrayImage> images, const EvalConfig& cfg,
                              BinAxis axis);

struct EvalReport {
  double threshold = 0.5;
  MatchRule match = MatchRule::centroid;
  double iou = 0.0;
  double pd = 0.0;
  double fa_e6 = 0.0;
  DetectionStats totals;
  std::vector<RocPoint> roc;
  std::vector<BinRow> binned_scale;
  std::vector<BinRow> binned_contrast;
};

EvalReport evaluate(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                    std::span<const GrayImage> images, const EvalConfig& cfg,
                    std::span<const double> roc_thresholds);

}  // namespace tda
