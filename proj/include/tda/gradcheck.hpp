#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tda/loss.hpp"

namespace tda {

using LossClosure = std::function<LossValue(const ProbMap&, bool want_grad)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t samples = 0;
};

// Relative error with an absolute floor so pixels where both gradients are
// (numerically) zero do not blow up: |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-8);

// Compares the closure's analytic gradient against central differences
// (f(p + h) - f(p - h)) / 2h at the given pixel indices. The prediction must
// sit at least h inside (0, 1) at those pixels.
GradCheckResult grad_check(const LossClosure& loss, const ProbMap& pred, double eps_fd,
                           std::span<const std::size_t> indices);

// `count` distinct pixel indices in [0, n), drawn with a seeded generator
// and returned in ascending order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed);

// Half of the indices from pixels within `margin` of a foreground pixel's
// component box (where patch losses have support), half from anywhere.
std::vector<std::size_t> sample_indices_near_targets(const BinaryMask& mask, int margin,
                                                     std::size_t count, std::uint64_t seed);

}  // namespace tda
