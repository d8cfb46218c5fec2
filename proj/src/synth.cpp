#include "tda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tda/metrics.hpp"

namespace tda {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform_from(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw SpecError("scene dimensions must be >= 1");
  if (!(noise_sigma >= 0.0)) throw SpecError("noise_sigma must be >= 0");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    const std::string where = "target " + std::to_string(i);
    if (!(t.radius >= 1.0)) throw SpecError(where + ": radius must be >= 1");
    if (!(t.amplitude > 0.0)) throw SpecError(where + ": amplitude must be > 0");
    if (t.cx - t.radius < 0.0 || t.cy - t.radius < 0.0 || t.cx + t.radius > width - 1 ||
        t.cy + t.radius > height - 1) {
      throw SpecError(where + ": disk does not fit inside the image");
    }
  }
}

double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed);
  const std::uint64_t h1 = splitmix64(key + 2 * counter);
  const std::uint64_t h2 = splitmix64(key + 2 * counter + 1);
  const double u1 = static_cast<double>((h1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> image(static_cast<std::size_t>(spec.width) * spec.height, spec.background);
  std::vector<std::uint8_t> mask(image.size(), 0);

  for (const auto& t : spec.targets) {
    const double r2 = t.radius * t.radius;
    const double sigma = 0.5 * t.radius;
    const int reach = spec.profile == Profile::gaussian ? static_cast<int>(std::ceil(4.0 * sigma)) + 1
                                                        : static_cast<int>(std::ceil(t.radius)) + 1;
    const int x_lo = std::max(0, static_cast<int>(std::floor(t.cx)) - reach);
    const int x_hi = std::min(spec.width - 1, static_cast<int>(std::ceil(t.cx)) + reach);
    const int y_lo = std::max(0, static_cast<int>(std::floor(t.cy)) - reach);
    const int y_hi = std::min(spec.height - 1, static_cast<int>(std::ceil(t.cy)) + reach);
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double d2 = (x - t.cx) * (x - t.cx) + (y - t.cy) * (y - t.cy);
        const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
        const bool inside = d2 <= r2;
        if (inside) mask[i] = 1;
        if (spec.profile == Profile::flat) {
          if (inside) image[i] += t.amplitude;
        } else {
          image[i] += t.amplitude * std::exp(-d2 / (2.0 * sigma * sigma));
        }
      }
    }
  }

  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = image[i];
    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * counter_normal(seed, i);
    v = std::clamp(v, 0.0, 255.0);
    if (spec.quantize) v = std::round(v);
    image[i] = v;
  }
  return Scene{GrayImage(spec.width, spec.height, std::move(image)),
               BinaryMask(spec.width, spec.height, std::move(mask))};
}

SceneSpec random_scene_spec(int width, int height, int n_targets, std::uint64_t seed,
                            double noise_sigma) {
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.background = 60.0;
  spec.noise_sigma = noise_sigma;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_targets; ++k) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      SceneTarget t;
      t.radius = uniform_from(rng, 1.0, 5.0);
      t.amplitude = uniform_from(rng, 10.0, 80.0);
      const double lo = t.radius;
      t.cx = uniform_from(rng, lo, width - 1 - lo);
      t.cy = uniform_from(rng, lo, height - 1 - lo);
      // Keep a two-pixel gap so every disk stays its own component.
      const bool clear = std::all_of(spec.targets.begin(), spec.targets.end(), [&](const auto& o) {
        const double gap = t.radius + o.radius + 2.0;
        return (t.cx - o.cx) * (t.cx - o.cx) + (t.cy - o.cy) * (t.cy - o.cy) > gap * gap;
      });
      if (clear && t.cx - lo >= 0 && t.cy - lo >= 0) {
        spec.targets.push_back(t);
        break;
      }
    }
  }
  return spec;
}

FitResult fit_prediction(const GrayImage& image, const BinaryMask& mask, const DatasetStats& stats,
                         const FitObjective& objective, int steps, double step_size,
                         std::uint64_t seed, const FitObserver& observer) {
  if (steps < 1) throw DomainError("fit_prediction: steps must be >= 1");
  if (!objective.use_base && !objective.use_tda) {
    throw DomainError("fit_prediction: objective has no terms");
  }
  require_same_shape(image, mask, "fit_prediction");

  std::vector<double> p(mask.size(), 0.5);
  FitResult result;
  result.loss_trajectory.reserve(static_cast<std::size_t>(steps));

  auto evaluate = [&](const ProbMap& pred) {
    if (objective.use_base && objective.use_tda) {
      return combined_loss(pred, mask, image, stats, objective.base, objective.tda, seed).total;
    }
    if (objective.use_base) return base_loss(objective.base, pred, mask);
    auto t = tda_image_loss(pred, mask, image, stats, objective.tda, seed).loss;
    t.value *= objective.tda.w_T;
    if (t.grad) {
      for (auto& g : t.grad->mutable_values()) g *= objective.tda.w_T;
    }
    return t;
  };

  for (int step = 0; step < steps; ++step) {
    const ProbMap pred(mask.width(), mask.height(), p);
    const auto loss = evaluate(pred);
    result.loss_trajectory.push_back(loss.value);
    if (observer) observer(step, loss);
    const auto g = loss.grad->values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::clamp(p[i] - step_size * g[i], 0.0, 1.0);
    }
  }

  result.final_pred = ProbMap(mask.width(), mask.height(), p);
  const ProbMap* pred_ptr = &result.final_pred;
  result.final_pixel_iou = pixel_iou(std::span(pred_ptr, 1), std::span(&mask, 1), 0.5);
  const auto breakdown = tda_image_loss(result.final_pred, mask, image, stats, objective.tda, seed,
                                        false);
  for (const auto& t : breakdown.per_target) result.per_target_soft_iou.push_back(t.soft_iou);
  return result;
}

}  // namespace tda
