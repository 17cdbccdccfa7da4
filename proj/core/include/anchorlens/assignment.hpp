#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anchorlens/anchors.hpp"

namespace anchorlens {

/**
 * @brief Parameters of the clipped-sigmoid positive weight.
 *
 * The slope is derived so that the sigmoid meets the clipping band edges:
 * f(0.5 - alpha) = beta and f(0.5 + alpha) = 1 - beta.
 */
struct SoftThresholdParams {
  double alpha = 0.1;
  double beta = 0.001;
  double slope = 0;  // derived: ln((1 - beta) / beta) / alpha

  static constexpr double center = 0.5;

  explicit SoftThresholdParams(double alpha = 0.1, double beta = 0.001);
};

/// 0 below the band, 1 above it, sigmoid inside the closed band
/// [0.5 - alpha, 0.5 + alpha].
double soft_weight(double r, const SoftThresholdParams& p);

struct BinaryThreshold {
  double pos_iou = 0.5;
  bool pos_inclusive = false;  // false: IOU > pos_iou, true: IOU >= pos_iou
  std::optional<double> neg_iou_lt;
};

struct SoftSigmoid {
  SoftThresholdParams params;
};

/// YOLOv2-style: the best-IOU anchor in the cell containing the object center.
struct CenterBest {};

using MatchStrategy = std::variant<BinaryThreshold, SoftSigmoid, CenterBest>;

/// Named presets: faster-rcnn, ssd, retinanet, refinedet, m2det, yolov2, soft.
/// Throws std::invalid_argument on unknown names.
MatchStrategy strategy_preset(const std::string& name);

/// Hard-negative-mining ratio a preset pairs with (0 when none).
int preset_hnm_ratio(const std::string& name);

std::vector<std::string> strategy_preset_names();

struct AssignmentRow {
  int anchor_id = 0;
  int gt_index = 0;
  double weight = 0;

  bool operator==(const AssignmentRow&) const = default;
};

/// Per-image assignment result. Rows hold only weights > 0, sorted by
/// (anchor_id, gt_index); negative ids are sorted ascending.
struct AssignmentTable {
  std::string image_id;
  std::vector<AssignmentRow> rows;
  std::vector<int> negative_anchor_ids;
  std::vector<bool> fallback_fired;          // per gt index
  std::vector<int> unassignable_gt_indices;  // center-best only

  /// Distinct anchors with weight >= 0.5 (the count hard-negative mining
  /// ratios apply to).
  int hnm_positive_count() const;
};

AssignmentTable assign(const AnchorSet& anchors, const std::vector<BBox>& gt_boxes,
                       const MatchStrategy& strategy, std::string image_id = "");

AssignmentTable assign_center_best(const AnchorSet& anchors, const std::vector<BBox>& gt_boxes,
                                   std::string image_id = "");

/// The min(ratio * positive_count, |candidates|) candidate anchors with the
/// highest loss; ties broken by smaller anchor id.
std::vector<int> select_hard_negatives(const std::map<int, double>& candidate_losses,
                                       int positive_count, int ratio);

/// CSV rows `image_id,anchor_id,gt_index,weight` followed by `#fallback:` /
/// `#negatives:` trailer lines per image (and `#unassignable:` when present).
/// Weights are printed with 9 decimal digits.
void export_assignment(const AssignmentTable& table, std::ostream& out);
void export_assignment(const std::vector<AssignmentTable>& tables, std::ostream& out);

/// Inverse of export_assignment; weights are read at the printed precision.
std::vector<AssignmentTable> import_assignment(std::istream& in);

}  // namespace anchorlens
