#include "tda/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tda/targets.hpp"

namespace tda {

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckResult grad_check(const LossClosure& loss, const ProbMap& pred, double eps_fd,
                           std::span<const std::size_t> indices) {
  const auto analytic = loss(pred, true);
  if (!analytic.grad) throw DomainError("grad_check: loss closure returned no gradient");
  require_same_shape(*analytic.grad, pred, "grad_check");

  const auto base = pred.values();
  std::vector<double> work(base.begin(), base.end());
  GradCheckResult result;
  for (const auto i : indices) {
    if (i >= work.size()) throw RangeError("grad_check: pixel index out of range");
    const double p = base[i];
    work[i] = p + eps_fd;
    const double up = loss(ProbMap(pred.width(), pred.height(), work), false).value;
    work[i] = p - eps_fd;
    const double down = loss(ProbMap(pred.width(), pred.height(), work), false).value;
    work[i] = p;

    const double numeric = (up - down) / (2.0 * eps_fd);
    const double a = (*analytic.grad)[i];
    const double err = relative_error(a, numeric);
    if (err > result.max_rel_error || result.samples == 0) {
      result.max_rel_error = err;
      result.worst_index = i;
      result.analytic_at_worst = a;
      result.numeric_at_worst = numeric;
    }
    ++result.samples;
  }
  return result;
}

namespace {

std::vector<std::size_t> draw_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  count = std::min(count, n);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with explicit modulo keeps the draw identical
  // across standard library implementations.
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng() % (n - k));
    std::swap(all[k], all[j]);
  }
  all.resize(count);
  return all;
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
  auto out = draw_indices(n, count, seed);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> sample_indices_near_targets(const BinaryMask& mask, int margin,
                                                     std::size_t count, std::uint64_t seed) {
  const auto lm = label_components(mask);
  std::vector<bool> near(mask.size(), false);
  for (const auto& c : summarize_components(lm)) {
    const auto box = dilate_bbox(c.bbox, margin, mask.width(), mask.height());
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) near[mask.index(x, y)] = true;
    }
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < near.size(); ++i) {
    if (near[i]) pool.push_back(i);
  }
  std::vector<std::size_t> out;
  for (const auto k : sample_indices(pool.size(), (count + 1) / 2, seed)) out.push_back(pool[k]);
  std::vector<bool> taken(mask.size(), false);
  for (const auto i : out) taken[i] = true;
  for (const auto i : draw_indices(mask.size(), mask.size(), seed ^ 0x5bd1e995ULL)) {
    if (out.size() >= std::min(count, mask.size())) break;
    if (!taken[i]) {
      taken[i] = true;
      out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tda
