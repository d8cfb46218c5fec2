#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tda/ccl.hpp"
#include "tda/patch.hpp"
#include "tda/raster.hpp"
#include "tda/targets.hpp"

namespace tda {

// Settings of the target-driven adaptive loss term.
struct TdaConfig {
  int patch_size = 48;
  // Per-target box dilation is drawn uniformly from [d_min, d_max].
  int d_min = 2;
  int d_max = 5;
  double w_T = 0.2;
  double eps = 1e-6;
  // Fixed exponent for every target instead of the adaptive one.
  std::optional<double> p_override;
  Connectivity connectivity = Connectivity::eight;
  // Sampling of the prediction patch. Nearest matches the mask sampling, so
  // a prediction equal to the mask scores a perfect patch; bilinear smears
  // binary edges when a small box is upsampled.
  Resample pred_resample = Resample::nearest;

  // Throws DomainError on an invalid combination.
  void validate() const;
};

// A loss value with its (optional) gradient over the prediction grid.
struct LossValue {
  double value = 0.0;
  std::optional<RealGrid> grad;
};

// Soft set sizes over paired prediction / ground-truth values.
struct SoftSets {
  double inter = 0.0;
  double psum = 0.0;
  double gsum = 0.0;
};

SoftSets soft_sets(std::span<const double> pred, std::span<const double> gt);

// (inter + eps) / (psum + gsum - inter + eps).
double soft_iou(const SoftSets& s, double eps);
double soft_iou(const Patch& pred, const Patch& gt, double eps);

double sigmoid(double x);

// 1 + sigmoid(-s_t / s_mean) + sigmoid(-c_t / c_mean), or the override when
// one is given. Throws StatsError if s_mean <= 0 or c_mean == 0.
double adaptive_exponent(double s_t, double c_t, const DatasetStats& stats,
                         std::optional<double> p_override = std::nullopt);

// -(1 - I^p) * ln(I) for one target patch. The gradient, when requested, is
// taken with respect to the prediction patch values and has size x size
// shape.
LossValue tda_target_loss(const Patch& pred, const Patch& gt, double p_t, double eps,
                          bool want_grad = true);

struct TargetLossRecord {
  int label = 0;
  BBox bbox;
  BBox patch_bbox;
  int dilation = 0;
  double p_t = 0.0;
  int s_t = 0;
  double c_t = 0.0;
  bool contrast_fallback = false;
  double soft_iou = 0.0;
  double loss = 0.0;
};

struct TdaImageLoss {
  LossValue loss;
  std::vector<TargetLossRecord> per_target;
};

// Mean of tda_target_loss over every target of the mask. Each target's box
// is dilated by a seeded random d in [d_min, d_max]; the prediction is
// resized with cfg.pred_resample and the mask with nearest sampling.
TdaImageLoss tda_image_loss(const ProbMap& pred, const BinaryMask& mask, const GrayImage& image,
                            const DatasetStats& stats, const TdaConfig& cfg, std::uint64_t seed,
                            bool want_grad = true);

// base + w_T * tda, value and gradient.
LossValue total_loss(const LossValue& base, const LossValue& tda, double w_T);

enum class BaseKind { bce, focal, tversky, iou, dice };

const char* to_string(BaseKind kind);
std::optional<BaseKind> parse_base_kind(std::string_view name);

struct BaseLossSpec {
  BaseKind kind = BaseKind::iou;
  double gamma = 2.0;
  double alpha = 0.3;
  double beta = 0.7;
  double eps = 1e-6;
  // Log-based losses evaluate on predictions clamped to [clamp, 1 - clamp].
  double prob_clamp = 1e-7;

  void validate() const;
};

// Whole-image losses used as the global term:
//   bce      mean of -[g ln p + (1-g) ln(1-p)]
//   focal    mean of -[g (1-p)^gamma ln p + (1-g) p^gamma ln(1-p)]
//   iou      1 - (inter + eps) / (union + eps)
//   dice     1 - (inter + eps) / ((psum + gsum) / 2 + eps)
//   tversky  1 - (inter + eps) / (inter + alpha FP + beta FN + eps)
LossValue base_loss(const BaseLossSpec& spec, const ProbMap& pred, const BinaryMask& gt,
                    bool want_grad = true);

// base_loss + w_T * tda_image_loss, keeping both parts for reporting.
struct CombinedLoss {
  LossValue total;
  LossValue base;
  TdaImageLoss tda;
};

CombinedLoss combined_loss(const ProbMap& pred, const BinaryMask& mask, const GrayImage& image,
                           const DatasetStats& stats, const BaseLossSpec& base,
                           const TdaConfig& cfg, std::uint64_t seed, bool want_grad = true);

}  // namespace tda
