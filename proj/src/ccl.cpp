#include "tda/ccl.hpp"

#include <string>

namespace tda {

namespace {

// Equivalence table for provisional labels. Roots are always the smallest
// label of their class, which keeps the union cheap during the scan.
class LabelEquivalence {
 public:
  LabelEquivalence() { parent_.push_back(0); }

  std::int32_t make() {
    const auto id = static_cast<std::int32_t>(parent_.size());
    parent_.push_back(id);
    return id;
  }

  std::int32_t find(std::int32_t x) {
    std::int32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const auto next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  std::int32_t merge(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (a < b) {
      parent_[b] = a;
      return a;
    }
    parent_[a] = b;
    return b;
  }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

LabelMap::LabelMap(int width, int height, std::vector<std::int32_t> labels, int count)
    : width_(width), height_(height), labels_(std::move(labels)), count_(count) {
  if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeMismatch("label map length does not match its dimensions");
  }
}

LabelMap label_components(const BinaryMask& mask, Connectivity conn) {
  const int w = mask.width();
  const int h = mask.height();
  const bool diag = conn == Connectivity::eight;
  std::vector<std::int32_t> labels(mask.size(), 0);
  LabelEquivalence eq;

  auto at = [&](int x, int y) -> std::int32_t {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                  static_cast<std::size_t>(x)];
  };

  // First pass: provisional labels from the already-visited neighbourhood
  // (W, NW, N, NE for 8-connectivity; W, N for 4).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      std::int32_t label = 0;
      auto join = [&](std::int32_t other) {
        if (other == 0) return;
        label = label == 0 ? eq.find(other) : eq.merge(label, other);
      };
      if (x > 0) join(at(x - 1, y));
      if (y > 0) {
        join(at(x, y - 1));
        if (diag) {
          if (x > 0) join(at(x - 1, y - 1));
          if (x + 1 < w) join(at(x + 1, y - 1));
        }
      }
      labels[mask.index(x, y)] = label == 0 ? eq.make() : label;
    }
  }

  // Second pass: flatten and renumber roots in first-encounter order.
  std::vector<std::int32_t> final_of_root;
  int count = 0;
  for (auto& l : labels) {
    if (l == 0) continue;
    const auto root = eq.find(l);
    if (static_cast<std::size_t>(root) >= final_of_root.size()) {
      final_of_root.resize(static_cast<std::size_t>(root) + 1, 0);
    }
    if (final_of_root[root] == 0) final_of_root[root] = ++count;
    l = final_of_root[root];
  }
  return LabelMap(w, h, std::move(labels), count);
}

std::vector<Pixel> component_pixels(const LabelMap& lm, int label) {
  if (label < 1 || label > lm.count()) {
    throw RangeError("component label " + std::to_string(label) + " outside 1.." +
                     std::to_string(lm.count()));
  }
  std::vector<Pixel> out;
  for (int y = 0; y < lm.height(); ++y) {
    for (int x = 0; x < lm.width(); ++x) {
      if (lm(x, y) == label) out.push_back({x, y});
    }
  }
  return out;
}

}  // namespace tda
