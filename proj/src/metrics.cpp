#include "tda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tda/targets.hpp"

namespace tda {

namespace {

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

std::vector<Centroid> centroids(const LabelMap& lm) {
  std::vector<Centroid> sum(static_cast<std::size_t>(lm.count()));
  std::vector<long> n(sum.size(), 0);
  for (int y = 0; y < lm.height(); ++y) {
    for (int x = 0; x < lm.width(); ++x) {
      const int l = lm(x, y);
      if (l == 0) continue;
      sum[l - 1].x += x;
      sum[l - 1].y += y;
      ++n[l - 1];
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i].x /= static_cast<double>(n[i]);
    sum[i].y /= static_cast<double>(n[i]);
  }
  return sum;
}

void require_pairs(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeMismatch(std::string(what) + ": prediction and mask counts differ");
  if (a == 0) throw EmptyDataset(std::string(what) + ": no images");
}

void check_bounds(const std::vector<double>& bounds, const char* name) {
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (!(bounds[i] > bounds[i - 1])) {
      throw DomainError(std::string(name) + " bin bounds must be strictly increasing");
    }
  }
}

}  // namespace

const char* to_string(MatchRule rule) {
  return rule == MatchRule::centroid ? "centroid" : "overlap";
}

std::optional<MatchRule> parse_match_rule(std::string_view name) {
  if (name == "centroid") return MatchRule::centroid;
  if (name == "overlap") return MatchRule::overlap;
  return std::nullopt;
}

void EvalConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in [0, 1]");
  if (!(centroid_distance >= 0.0)) throw DomainError("centroid distance must be >= 0");
  if (contrast_dilation < 0) throw DomainError("contrast dilation must be >= 0");
  check_bounds(bins_scale, "scale");
  check_bounds(bins_contrast, "contrast");
}

BinaryMask binarize(const ProbMap& pred, double threshold) {
  std::vector<std::uint8_t> out;
  out.reserve(pred.size());
  for (double p : pred.values()) out.push_back(p > threshold ? 1 : 0);
  return BinaryMask(pred.width(), pred.height(), std::move(out));
}

double pixel_iou(std::span<const ProbMap> preds, std::span<const BinaryMask> gts, double threshold) {
  require_pairs(preds.size(), gts.size(), "pixel_iou");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    require_same_shape(preds[k], gts[k], "pixel_iou");
    const auto p = preds[k].values();
    const auto g = gts[k].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const bool pos = p[i] > threshold;
      if (pos && g[i]) ++tp;
      else if (pos) ++fp;
      else if (g[i]) ++fn;
    }
  }
  const long denom = tp + fp + fn;
  // Nothing predicted and nothing to find counts as a perfect score.
  return denom == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

ImageMatch match_targets(const ProbMap& pred, const BinaryMask& mask, const EvalConfig& cfg) {
  require_same_shape(pred, mask, "match_targets");
  const auto positive = binarize(pred, cfg.threshold);
  const auto gt_lm = label_components(mask, cfg.connectivity);

  ImageMatch out;
  out.gt_detected.assign(static_cast<std::size_t>(gt_lm.count()), false);
  out.image_pixels = static_cast<long>(mask.size());

  if (cfg.match == MatchRule::overlap) {
    for (std::size_t i = 0; i < positive.size(); ++i) {
      if (!positive[i]) continue;
      const int l = gt_lm.labels()[i];
      if (l == 0) {
        ++out.fa_pixels;
      } else {
        out.gt_detected[l - 1] = true;
      }
    }
    return out;
  }

  const auto pred_lm = label_components(positive, cfg.connectivity);
  const auto gt_c = centroids(gt_lm);
  const auto pred_c = centroids(pred_lm);
  std::vector<bool> pred_matched(pred_c.size(), false);
  const double r2 = cfg.centroid_distance * cfg.centroid_distance;
  for (std::size_t g = 0; g < gt_c.size(); ++g) {
    for (std::size_t p = 0; p < pred_c.size(); ++p) {
      const double dx = gt_c[g].x - pred_c[p].x;
      const double dy = gt_c[g].y - pred_c[p].y;
      if (dx * dx + dy * dy <= r2) {
        out.gt_detected[g] = true;
        pred_matched[p] = true;
      }
    }
  }
  for (const auto l : pred_lm.labels()) {
    if (l != 0 && !pred_matched[l - 1]) ++out.fa_pixels;
  }
  return out;
}

DetectionStats detection_stats(const ProbMap& pred, const BinaryMask& mask, const EvalConfig& cfg) {
  const auto m = match_targets(pred, mask, cfg);
  DetectionStats s;
  s.detected = static_cast<long>(std::count(m.gt_detected.begin(), m.gt_detected.end(), true));
  s.total = static_cast<long>(m.gt_detected.size());
  s.fa_pixels = m.fa_pixels;
  s.image_pixels = m.image_pixels;
  return s;
}

PdFa pd_fa(std::span<const DetectionStats> per_image) {
  if (per_image.empty()) throw EmptyDataset("pd_fa: no images");
  DetectionStats sum;
  for (const auto& s : per_image) {
    sum.detected += s.detected;
    sum.total += s.total;
    sum.fa_pixels += s.fa_pixels;
    sum.image_pixels += s.image_pixels;
  }
  PdFa out;
  out.pd = sum.total == 0 ? 0.0 : static_cast<double>(sum.detected) / static_cast<double>(sum.total);
  out.fa_e6 = 1e6 * static_cast<double>(sum.fa_pixels) / static_cast<double>(sum.image_pixels);
  return out;
}

std::vector<RocPoint> roc(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                          const EvalConfig& cfg, std::span<const double> thresholds) {
  require_pairs(preds.size(), gts.size(), "roc");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
      throw DomainError("roc thresholds must lie in [0, 1]");
    }
    if (i > 0 && thresholds[i] < thresholds[i - 1]) {
      throw DomainError("roc thresholds must be sorted ascending");
    }
  }
  std::vector<RocPoint> out;
  for (const double t : thresholds) {
    EvalConfig c = cfg;
    c.threshold = t;
    std::vector<DetectionStats> stats;
    for (std::size_t k = 0; k < preds.size(); ++k) stats.push_back(detection_stats(preds[k], gts[k], c));
    const auto r = pd_fa(stats);
    out.push_back(RocPoint{t, r.fa_e6, r.pd});
  }
  return out;
}

std::vector<BinRow> binned_pd(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                              std::span<const GrayImage> images, const EvalConfig& cfg,
                              BinAxis axis) {
  require_pairs(preds.size(), gts.size(), "binned_pd");
  if (axis == BinAxis::contrast && images.size() != gts.size()) {
    throw ShapeMismatch("binned_pd: contrast bins need one image per mask");
  }
  const auto& bounds = axis == BinAxis::scale ? cfg.bins_scale : cfg.bins_contrast;
  std::vector<BinRow> rows;
  for (double b : bounds) rows.push_back(BinRow{b, 0, 0, 0.0});

  for (std::size_t k = 0; k < gts.size(); ++k) {
    const auto m = match_targets(preds[k], gts[k], cfg);
    const auto lm = label_components(gts[k], cfg.connectivity);
    const auto comps = summarize_components(lm);
    for (const auto& c : comps) {
      double attr = c.scale;
      if (axis == BinAxis::contrast) {
        require_same_shape(images[k], gts[k], "binned_pd");
        attr = describe_target(images[k], lm, c, cfg.contrast_dilation).contrast;
      }
      const bool hit = m.gt_detected[c.label - 1];
      for (auto& row : rows) {
        if (attr > 0.0 && attr <= row.upper) {
          ++row.n;
          if (hit) ++row.detected;
        }
      }
    }
  }
  for (auto& row : rows) {
    row.pd = row.n == 0 ? 0.0 : static_cast<double>(row.detected) / static_cast<double>(row.n);
  }
  return rows;
}

EvalReport evaluate(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                    std::span<const GrayImage> images, const EvalConfig& cfg,
                    std::span<const double> roc_thresholds) {
  cfg.validate();
  require_pairs(preds.size(), gts.size(), "evaluate");
  EvalReport r;
  r.threshold = cfg.threshold;
  r.match = cfg.match;
  r.iou = pixel_iou(preds, gts, cfg.threshold);
  std::vector<DetectionStats> stats;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    stats.push_back(detection_stats(preds[k], gts[k], cfg));
    r.totals.detected += stats.back().detected;
    r.totals.total += stats.back().total;
    r.totals.fa_pixels += stats.back().fa_pixels;
    r.totals.image_pixels += stats.back().image_pixels;
  }
  const auto pf = pd_fa(stats);
  r.pd = pf.pd;
  r.fa_e6 = pf.fa_e6;
  r.roc = roc(preds, gts, cfg, roc_thresholds);
  r.binned_scale = binned_pd(preds, gts, images, cfg, BinAxis::scale);
  if (!images.empty()) r.binned_contrast = binned_pd(preds, gts, images, cfg, BinAxis::contrast);
  return r;
}

}  // namespace tda
