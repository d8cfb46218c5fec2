#include "tda/loss.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tda {

void TdaConfig::validate() const {
  if (patch_size < 1) throw DomainError("patch_size must be >= 1");
  if (d_min < 0 || d_min > d_max) throw DomainError("dilation range must satisfy 0 <= d_min <= d_max");
  if (!(w_T >= 0.0)) throw DomainError("w_T must be >= 0");
  if (!(eps > 0.0 && eps <= 1e-3)) throw DomainError("eps must lie in (0, 1e-3]");
  if (p_override && !(*p_override > 0.0)) throw DomainError("fixed exponent must be > 0");
}

SoftSets soft_sets(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) throw ShapeMismatch("soft_sets: length mismatch");
  SoftSets s;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    s.inter += pred[i] * gt[i];
    s.psum += pred[i];
    s.gsum += gt[i];
  }
  return s;
}

double soft_iou(const SoftSets& s, double eps) {
  return (s.inter + eps) / (s.psum + s.gsum - s.inter + eps);
}

double soft_iou(const Patch& pred, const Patch& gt, double eps) {
  if (pred.size != gt.size) throw ShapeMismatch("soft_iou: patch sizes differ");
  return soft_iou(soft_sets(pred.data, gt.data), eps);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double adaptive_exponent(double s_t, double c_t, const DatasetStats& stats,
                         std::optional<double> p_override) {
  if (p_override) return *p_override;
  if (!(stats.s_mean > 0.0)) throw StatsError("s_mean must be > 0");
  if (stats.c_mean == 0.0) throw StatsError("c_mean must be non-zero");
  return 1.0 + sigmoid(-s_t / stats.s_mean) + sigmoid(-c_t / stats.c_mean);
}

LossValue tda_target_loss(const Patch& pred, const Patch& gt, double p_t, double eps,
                          bool want_grad) {
  if (pred.size != gt.size || pred.data.size() != gt.data.size()) {
    throw ShapeMismatch("tda_target_loss: patch sizes differ");
  }
  if (!(p_t > 0.0)) throw DomainError("tda_target_loss: exponent must be > 0");

  const auto sets = soft_sets(pred.data, gt.data);
  const double uni = sets.psum + sets.gsum - sets.inter + eps;
  const double iou = (sets.inter + eps) / uni;
  const double log_iou = std::log(iou);
  const double iou_p = std::pow(iou, p_t);

  LossValue out;
  out.value = -(1.0 - iou_p) * log_iou;
  if (!want_grad) return out;

  // dL/dI = p I^(p-1) ln I - (1 - I^p) / I
  // dI/dp_i = (g_i - I (1 - g_i)) / (union + eps)
  const double dl_diou = p_t * (iou_p / iou) * log_iou - (1.0 - iou_p) / iou;
  RealGrid grad(pred.size, pred.size, 0.0);
  auto g = grad.mutable_values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gi = gt.data[i];
    g[i] = dl_diou * (gi - iou * (1.0 - gi)) / uni;
  }
  out.grad = std::move(grad);
  return out;
}

TdaImageLoss tda_image_loss(const ProbMap& pred, const BinaryMask& mask, const GrayImage& image,
                            const DatasetStats& stats, const TdaConfig& cfg, std::uint64_t seed,
                            bool want_grad) {
  cfg.validate();
  require_same_shape(pred, mask, "tda_image_loss (pred vs mask)");
  require_same_shape(pred, image, "tda_image_loss (pred vs image)");

  const auto lm = label_components(mask, cfg.connectivity);
  const auto components = summarize_components(lm);

  TdaImageLoss out;
  if (want_grad) out.loss.grad = RealGrid(pred.width(), pred.height(), 0.0);
  if (components.empty()) return out;

  // One draw per target in label order, so a seed fixes every patch.
  std::mt19937_64 rng(seed);
  const auto span = static_cast<std::uint64_t>(cfg.d_max - cfg.d_min + 1);
  const double inv_n = 1.0 / static_cast<double>(components.size());

  double sum = 0.0;
  for (const auto& c : components) {
    const int d = cfg.d_min + static_cast<int>(rng() % span);
    const auto t = describe_target(image, lm, c, d);
    const double p_t = adaptive_exponent(t.scale, t.contrast, stats, cfg.p_override);

    const auto pred_patch = crop_resize(pred, t.dilated_bbox, cfg.patch_size, cfg.pred_resample);
    const auto gt_patch = crop_resize(mask, t.dilated_bbox, cfg.patch_size, Resample::nearest);
    const auto lt = tda_target_loss(pred_patch, gt_patch, p_t, cfg.eps, want_grad);

    if (want_grad) {
      Patch g{cfg.patch_size, std::vector<double>(lt.grad->values().begin(), lt.grad->values().end()),
              t.dilated_bbox, cfg.pred_resample};
      crop_resize_backward_into(g, t.dilated_bbox, cfg.pred_resample, inv_n, *out.loss.grad);
    }
    sum += lt.value;
    out.per_target.push_back(TargetLossRecord{t.label, t.bbox, t.dilated_bbox, d, p_t, t.scale,
                                              t.contrast, t.contrast_fallback,
                                              soft_iou(pred_patch, gt_patch, cfg.eps), lt.value});
  }
  out.loss.value = sum * inv_n;
  return out;
}

LossValue total_loss(const LossValue& base, const LossValue& tda, double w_T) {
  LossValue out;
  out.value = base.value + w_T * tda.value;
  if (base.grad && tda.grad) {
    require_same_shape(*base.grad, *tda.grad, "total_loss");
    RealGrid g = *base.grad;
    auto gv = g.mutable_values();
    const auto tv = tda.grad->values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += w_T * tv[i];
    out.grad = std::move(g);
  } else if (base.grad || tda.grad) {
    throw ShapeMismatch("total_loss: only one operand carries a gradient");
  }
  return out;
}

const char* to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::bce: return "bce";
    case BaseKind::focal: return "focal";
    case BaseKind::tversky: return "tversky";
    case BaseKind::iou: return "iou";
    case BaseKind::dice: return "dice";
  }
  return "?";
}

std::optional<BaseKind> parse_base_kind(std::string_view name) {
  for (auto k : {BaseKind::bce, BaseKind::focal, BaseKind::tversky, BaseKind::iou, BaseKind::dice}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

void BaseLossSpec::validate() const {
  if (!(gamma >= 0.0)) throw DomainError("focal gamma must be >= 0");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("tversky alpha and beta must be > 0");
  if (!(eps > 0.0 && eps <= 1e-3)) throw DomainError("eps must lie in (0, 1e-3]");
  if (!(prob_clamp > 0.0 && prob_clamp < 0.5)) throw DomainError("prob_clamp must lie in (0, 0.5)");
}

namespace {

// Pixel-wise cross-entropy family. gamma == 0 reduces focal to plain BCE
// with identical arithmetic.
LossValue pixel_loss(const ProbMap& pred, const BinaryMask& gt, double gamma, double clamp,
                     bool want_grad) {
  const auto p = pred.values();
  const auto g = gt.values();
  const double inv_n = 1.0 / static_cast<double>(p.size());
  LossValue out;
  if (want_grad) out.grad = RealGrid(pred.width(), pred.height(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(p[i], clamp, 1.0 - clamp);
    const double gi = g[i];
    const double lp = std::log(pc);
    const double lq = std::log(1.0 - pc);
    const double wp = gamma == 0.0 ? 1.0 : std::pow(1.0 - pc, gamma);
    const double wq = gamma == 0.0 ? 1.0 : std::pow(pc, gamma);
    sum += -(gi * wp * lp + (1.0 - gi) * wq * lq);
    if (!want_grad || pc != p[i]) continue;
    double d = -gi * wp / pc + (1.0 - gi) * wq / (1.0 - pc);
    if (gamma != 0.0) {
      d += gi * gamma * std::pow(1.0 - pc, gamma - 1.0) * lp -
           (1.0 - gi) * gamma * std::pow(pc, gamma - 1.0) * lq;
    }
    out.grad->mutable_values()[i] = d * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

}  // namespace

LossValue base_loss(const BaseLossSpec& spec, const ProbMap& pred, const BinaryMask& gt,
                    bool want_grad) {
  spec.validate();
  require_same_shape(pred, gt, "base_loss");
  if (spec.kind == BaseKind::bce) return pixel_loss(pred, gt, 0.0, spec.prob_clamp, want_grad);
  if (spec.kind == BaseKind::focal) {
    return pixel_loss(pred, gt, spec.gamma, spec.prob_clamp, want_grad);
  }

  const auto p = pred.values();
  const auto g = gt.values();
  double inter = 0.0, psum = 0.0, gsum = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i];
    inter += p[i] * gi;
    psum += p[i];
    gsum += gi;
    fp += p[i] * (1.0 - gi);
    fn += (1.0 - p[i]) * gi;
  }

  // Every set loss is 1 - num / den with num = inter + eps; only den and
  // its per-pixel derivative (a on foreground, b on background) differ.
  const double num = inter + spec.eps;
  double den = 0.0, dden_fg = 0.0, dden_bg = 0.0;
  switch (spec.kind) {
    case BaseKind::iou:
      den = psum + gsum - inter + spec.eps;
      dden_fg = 0.0;
      dden_bg = 1.0;
      break;
    case BaseKind::dice:
      den = 0.5 * (psum + gsum) + spec.eps;
      dden_fg = 0.5;
      dden_bg = 0.5;
      break;
    case BaseKind::tversky:
      den = inter + spec.alpha * fp + spec.beta * fn + spec.eps;
      dden_fg = 1.0 - spec.beta;
      dden_bg = spec.alpha;
      break;
    default:
      break;
  }

  LossValue out;
  out.value = 1.0 - num / den;
  if (!want_grad) return out;
  RealGrid grad(pred.width(), pred.height(), 0.0);
  auto gv = grad.mutable_values();
  const double den2 = den * den;
  for (std::size_t i = 0; i < gv.size(); ++i) {
    const double gi = g[i];
    const double dnum = gi;
    const double dden = gi * dden_fg + (1.0 - gi) * dden_bg;
    gv[i] = -(dnum * den - num * dden) / den2;
  }
  out.grad = std::move(grad);
  return out;
}

CombinedLoss combined_loss(const ProbMap& pred, const BinaryMask& mask, const GrayImage& image,
                           const DatasetStats& stats, const BaseLossSpec& base,
                           const TdaConfig& cfg, std::uint64_t seed, bool want_grad) {
  CombinedLoss out;
  out.base = base_loss(base, pred, mask, want_grad);
  out.tda = tda_image_loss(pred, mask, image, stats, cfg, seed, want_grad);
  out.total = total_loss(out.base, out.tda.loss, cfg.w_T);
  return out;
}

}  // namespace tda
