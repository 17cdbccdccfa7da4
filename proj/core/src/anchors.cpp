#include "anchorlens/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace anchorlens {

namespace {

bool nearly_equal(double a, double b, double rel_tol = 1e-9) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) <= rel_tol * scale;
}

std::string level_path(std::size_t i, const char* field) {
  return "levels[" + std::to_string(i) + "]." + field;
}

}  // namespace

void validate(const PyramidConfig& config) {
  if (config.levels.empty()) {
    throw std::invalid_argument("levels: at least one pyramid level required");
  }
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const PyramidLevel& lv = config.levels[i];
    if (lv.grid_w < 1) throw std::invalid_argument(level_path(i, "grid_w") + ": must be >= 1");
    if (lv.grid_h < 1) throw std::invalid_argument(level_path(i, "grid_h") + ": must be >= 1");
    if (!(lv.stride_x > 0)) throw std::invalid_argument(level_path(i, "stride_x") + ": must be > 0");
    if (!(lv.stride_y > 0)) throw std::invalid_argument(level_path(i, "stride_y") + ": must be > 0");
    if (lv.templates.empty()) {
      throw std::invalid_argument(level_path(i, "templates") + ": must be non-empty");
    }
    for (std::size_t t = 0; t < lv.templates.size(); ++t) {
      if (!(lv.templates[t].width > 0) || !(lv.templates[t].height > 0)) {
        throw std::invalid_argument(level_path(i, "templates") + "[" + std::to_string(t) +
                                    "]: width and height must be > 0");
      }
    }
    const double span_x = lv.grid_w * lv.stride_x;
    const double span_y = lv.grid_h * lv.stride_y;
    if (std::abs(span_x - config.extent.width) > lv.stride_x ||
        std::abs(span_y - config.extent.height) > lv.stride_y) {
      throw std::invalid_argument(level_path(i, "grid") +
                                  ": grid x stride must span the image extent to within one stride");
    }
    if (i > 0) {
      const PyramidLevel& prev = config.levels[i - 1];
      if (static_cast<long long>(lv.grid_w) * lv.grid_h >
          static_cast<long long>(prev.grid_w) * prev.grid_h) {
        throw std::invalid_argument(level_path(i, "grid") +
                                    ": levels must be ordered by decreasing grid resolution");
      }
    }
  }
}

std::string to_string(NeighborKind kind) {
  switch (kind) {
    case NeighborKind::ScaleBoundary: return "scale";
    case NeighborKind::GridBoundary: return "grid";
    case NeighborKind::AspectBoundary: return "aspect";
  }
  return "unknown";
}

AnchorSet AnchorSet::generate(const PyramidConfig& config) {
  validate(config);

  AnchorSet set;
  set.config_ = config;

  std::size_t total = 0;
  for (const PyramidLevel& lv : config.levels) {
    total += static_cast<std::size_t>(lv.grid_w) * lv.grid_h * lv.templates.size();
  }
  set.anchors_.reserve(total);

  int id = 0;
  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    const PyramidLevel& lv = config.levels[li];
    for (int cj = 0; cj < lv.grid_h; ++cj) {
      for (int ci = 0; ci < lv.grid_w; ++ci) {
        const double cx = (ci + 0.5) * lv.stride_x;
        const double cy = (cj + 0.5) * lv.stride_y;
        for (std::size_t ti = 0; ti < lv.templates.size(); ++ti) {
          const TemplateSize& tpl = lv.templates[ti];
          set.anchors_.push_back(Anchor{
              id++, static_cast<int>(li), ci, cj, static_cast<int>(ti),
              BBox::from_center(cx, cy, tpl.width, tpl.height)});
        }
      }
    }
  }

  // Area ranks per level; equal areas collapse to one rank.
  set.area_ranks_.resize(config.levels.size());
  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    const auto& templates = config.levels[li].templates;
    std::vector<int> order(templates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return templates[a].area() < templates[b].area();
    });
    std::vector<int>& ranks = set.area_ranks_[li];
    ranks.assign(templates.size(), 0);
    int rank = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && !nearly_equal(templates[order[k]].area(), templates[order[k - 1]].area())) {
        ++rank;
      }
      ranks[order[k]] = rank;
    }
  }
  return set;
}

const Anchor& AnchorSet::by_id(int id) const {
  if (!contains(id)) {
    throw std::out_of_range("unknown anchor id " + std::to_string(id));
  }
  return anchors_[static_cast<std::size_t>(id)];
}

int AnchorSet::area_rank(int level_index, int template_index) const {
  return area_ranks_.at(static_cast<std::size_t>(level_index))
      .at(static_cast<std::size_t>(template_index));
}

std::optional<NeighborKind> neighbor_kind(const AnchorSet& set, const Anchor& a, const Anchor& b) {
  if (a.id == b.id) {
    throw std::invalid_argument("neighbor_kind requires two distinct anchors");
  }
  const auto& levels = set.config().levels;

  if (a.level_index == b.level_index) {
    const PyramidLevel& lv = levels[static_cast<std::size_t>(a.level_index)];
    const bool same_cell = a.cell_i == b.cell_i && a.cell_j == b.cell_j;

    if (a.template_index == b.template_index) {
      const int di = std::abs(a.cell_i - b.cell_i);
      const int dj = std::abs(a.cell_j - b.cell_j);
      if (di + dj == 1) return NeighborKind::GridBoundary;
      return std::nullopt;
    }

    if (same_cell) {
      const TemplateSize& ta = lv.templates[static_cast<std::size_t>(a.template_index)];
      const TemplateSize& tb = lv.templates[static_cast<std::size_t>(b.template_index)];
      const bool same_rank =
          set.area_rank(a.level_index, a.template_index) ==
          set.area_rank(b.level_index, b.template_index);
      if (!same_rank) return NeighborKind::ScaleBoundary;
      if (!nearly_equal(ta.aspect(), tb.aspect())) return NeighborKind::AspectBoundary;
      return std::nullopt;
    }
    return std::nullopt;
  }

  // Cross-level pairs: adjacent levels whose box centers overlap within one
  // coarse-level stride form a scale boundary when template areas differ.
  if (std::abs(a.level_index - b.level_index) != 1) return std::nullopt;
  const Anchor& coarse = a.level_index > b.level_index ? a : b;
  const PyramidLevel& coarse_level = levels[static_cast<std::size_t>(coarse.level_index)];
  const double dx = std::abs(a.box.center_x() - b.box.center_x());
  const double dy = std::abs(a.box.center_y() - b.box.center_y());
  if (dx > coarse_level.stride_x || dy > coarse_level.stride_y) return std::nullopt;

  const TemplateSize& ta =
      levels[static_cast<std::size_t>(a.level_index)].templates[static_cast<std::size_t>(a.template_index)];
  const TemplateSize& tb =
      levels[static_cast<std::size_t>(b.level_index)].templates[static_cast<std::size_t>(b.template_index)];
  if (nearly_equal(ta.area(), tb.area())) return std::nullopt;
  return NeighborKind::ScaleBoundary;
}

BestAnchor best_anchor_for_box(const AnchorSet& set, const BBox& box) {
  if (set.size() == 0) {
    throw std::invalid_argument("best_anchor_for_box requires a non-empty anchor set");
  }
  BestAnchor best{set.anchors().front().id, iou(set.anchors().front().box, box)};
  for (const Anchor& a : set.anchors()) {
    const double r = iou(a.box, box);
    if (r > best.iou) {
      best = BestAnchor{a.id, r};
    }
  }
  return best;
}

}  // namespace anchorlens
