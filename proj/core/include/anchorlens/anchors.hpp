#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anchorlens/geometry.hpp"

namespace anchorlens {

struct TemplateSize {
  double width = 0;
  double height = 0;

  double area() const { return width * height; }
  double aspect() const { return width / height; }

  bool operator==(const TemplateSize&) const = default;
};

/// One feature-map resolution: a grid of cells, each hosting the same
/// list of box templates.
struct PyramidLevel {
  int grid_w = 0;
  int grid_h = 0;
  double stride_x = 0;
  double stride_y = 0;
  std::vector<TemplateSize> templates;

  bool operator==(const PyramidLevel&) const = default;
};

/// Levels are ordered from fine to coarse (decreasing grid resolution).
struct PyramidConfig {
  ImageExtent extent{1, 1};
  std::vector<PyramidLevel> levels;

  bool operator==(const PyramidConfig&) const = default;
};

/// Throws std::invalid_argument with a field path (e.g. "levels[1].stride_x")
/// on the first violated invariant.
void validate(const PyramidConfig& config);

struct Anchor {
  int id = 0;
  int level_index = 0;
  int cell_i = 0;  // column (x)
  int cell_j = 0;  // row (y)
  int template_index = 0;
  BBox box{0, 0, 1, 1};

  bool operator==(const Anchor&) const = default;
};

enum class NeighborKind { ScaleBoundary, GridBoundary, AspectBoundary };

std::string to_string(NeighborKind kind);

/**
 * @brief The full anchor enumeration of a pyramid config.
 *
 * Anchors are ordered level-major, then row-major over cells, then by
 * template index; ids equal positions in that order. Boxes are centered at
 * cell centers and are not clipped to the image.
 */
class AnchorSet {
 public:
  static AnchorSet generate(const PyramidConfig& config);

  const std::vector<Anchor>& anchors() const { return anchors_; }
  const PyramidConfig& config() const { return config_; }
  std::size_t size() const { return anchors_.size(); }
  bool contains(int id) const { return id >= 0 && id < static_cast<int>(anchors_.size()); }

  /// Throws std::out_of_range for ids outside the enumeration.
  const Anchor& by_id(int id) const;

  /// Area rank of a template within its level (0 = smallest); templates with
  /// equal area (relative tolerance 1e-9) share a rank.
  int area_rank(int level_index, int template_index) const;

 private:
  PyramidConfig config_;
  std::vector<Anchor> anchors_;
  std::vector<std::vector<int>> area_ranks_;  // per level, per template
};

/// Classifies a pair of anchors from the same set into one of the three
/// boundary kinds, or nullopt when the pair is not neighboring.
/// Throws std::invalid_argument when a and b are the same anchor.
std::optional<NeighborKind> neighbor_kind(const AnchorSet& set, const Anchor& a, const Anchor& b);

struct BestAnchor {
  int anchor_id = 0;
  double iou = 0;
};

/// Anchor maximizing iou(anchor.box, box); ties broken by smallest id.
/// Throws std::invalid_argument on an empty set.
BestAnchor best_anchor_for_box(const AnchorSet& set, const BBox& box);

}  // namespace anchorlens
