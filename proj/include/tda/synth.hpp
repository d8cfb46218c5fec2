#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tda/loss.hpp"
#include "tda/raster.hpp"
#include "tda/targets.hpp"

namespace tda {

struct SceneTarget {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;
  double amplitude = 0.0;
};

enum class Profile { flat, gaussian };

struct SceneSpec {
  int width = 64;
  int height = 64;
  double background = 100.0;
  double noise_sigma = 0.0;
  // Gaussian profile shapes the image intensity only (sigma = radius / 2);
  // the mask is always the hard disk.
  Profile profile = Profile::flat;
  // Round intensities to integers so scenes survive an 8-bit PGM round trip.
  bool quantize = true;
  std::vector<SceneTarget> targets;

  // Throws SpecError on bad dimensions, out-of-bounds or degenerate targets.
  void validate() const;
};

struct Scene {
  GrayImage image;
  BinaryMask mask;
};

// Disk pixels satisfy (x - cx)^2 + (y - cy)^2 <= r^2.
Scene generate_scene(const SceneSpec& spec, std::uint64_t seed);

// Standard normal deviate for (seed, counter). Pure function of its
// arguments: splitmix64 hashing feeding a Box-Muller transform.
double counter_normal(std::uint64_t seed, std::uint64_t counter);

// Random non-overlapping disk targets (radius 1..5, amplitude 10..80).
SceneSpec random_scene_spec(int width, int height, int n_targets, std::uint64_t seed,
                            double noise_sigma = 4.0);

struct FitObjective {
  BaseLossSpec base;
  bool use_base = true;
  bool use_tda = true;
  TdaConfig tda;
};

struct FitResult {
  ProbMap final_pred;
  std::vector<double> loss_trajectory;
  double final_pixel_iou = 0.0;
  std::vector<double> per_target_soft_iou;
};

using FitObserver = std::function<void(int step, const LossValue& objective)>;

// Fixed-step projected gradient descent on a free prediction map, starting
// from 0.5 everywhere: pred <- clamp(pred - step_size * grad, 0, 1). The
// loss recorded for each step is the value before that step's update.
FitResult fit_prediction(const GrayImage& image, const BinaryMask& mask, const DatasetStats& stats,
                         const FitObjective& objective, int steps, double step_size,
                         std::uint64_t seed, const FitObserver& observer = {});

}  // namespace tda
