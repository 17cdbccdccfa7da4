#include "anchorlens/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "anchorlens/csv.hpp"

namespace anchorlens {

SoftThresholdParams::SoftThresholdParams(double alpha_, double beta_)
    : alpha(alpha_), beta(beta_) {
  if (!(alpha > 0.0) || !(alpha < 0.5)) {
    throw std::invalid_argument("SoftThresholdParams: alpha must be in (0, 0.5)");
  }
  if (!(beta > 0.0) || !(beta < 0.5)) {
    throw std::invalid_argument("SoftThresholdParams: beta must be in (0, 0.5)");
  }
  slope = std::log((1.0 - beta) / beta) / alpha;
}

double soft_weight(double r, const SoftThresholdParams& p) {
  if (r < SoftThresholdParams::center - p.alpha) return 0.0;
  if (r > SoftThresholdParams::center + p.alpha) return 1.0;
  return 1.0 / (1.0 + std::exp(-p.slope * (r - SoftThresholdParams::center)));
}

MatchStrategy strategy_preset(const std::string& name) {
  if (name == "faster-rcnn") return BinaryThreshold{0.7, false, 0.3};
  if (name == "ssd") return BinaryThreshold{0.5, false, std::nullopt};
  if (name == "retinanet") return BinaryThreshold{0.5, true, 0.4};
  if (name == "refinedet") return BinaryThreshold{0.5, false, std::nullopt};
  if (name == "m2det") return BinaryThreshold{0.5, true, std::nullopt};
  if (name == "yolov2") return CenterBest{};
  if (name == "soft") return SoftSigmoid{SoftThresholdParams{}};
  throw std::invalid_argument("unknown strategy preset '" + name + "'");
}

int preset_hnm_ratio(const std::string& name) {
  if (name == "ssd" || name == "refinedet" || name == "m2det") return 3;
  if (name == "faster-rcnn" || name == "retinanet" || name == "yolov2" || name == "soft") return 0;
  throw std::invalid_argument("unknown strategy preset '" + name + "'");
}

std::vector<std::string> strategy_preset_names() {
  return {"faster-rcnn", "ssd", "retinanet", "refinedet", "m2det", "yolov2", "soft"};
}

int AssignmentTable::hnm_positive_count() const {
  std::set<int> ids;
  for (const AssignmentRow& row : rows) {
    if (row.weight >= 0.5) ids.insert(row.anchor_id);
  }
  return static_cast<int>(ids.size());
}

namespace {

struct Kept {
  int gt = -1;
  double weight = 0;
  bool forced = false;  // claimed by the best-IOU fallback
};

AssignmentTable assign_thresholded(const AnchorSet& anchors, const std::vector<BBox>& gt_boxes,
                                   const MatchStrategy& strategy, std::string image_id) {
  const std::size_t n_a = anchors.size();
  const std::size_t n_g = gt_boxes.size();
  if (n_a == 0) throw std::invalid_argument("assign requires a non-empty anchor set");
  if (const auto* b = std::get_if<BinaryThreshold>(&strategy)) {
    if (b->pos_iou < 0.0 || b->pos_iou > 1.0) {
      throw std::invalid_argument("BinaryThreshold: pos_iou must be in [0, 1]");
    }
    if (b->neg_iou_lt && (*b->neg_iou_lt < 0.0 || *b->neg_iou_lt > 1.0 ||
                          *b->neg_iou_lt > b->pos_iou)) {
      throw std::invalid_argument(
          "BinaryThreshold: neg_iou_lt must be in [0, 1] and not exceed pos_iou");
    }
  }

  const auto weight_of = [&](double r) -> double {
    if (const auto* b = std::get_if<BinaryThreshold>(&strategy)) {
      const bool pos = b->pos_inclusive ? r >= b->pos_iou : r > b->pos_iou;
      return pos ? 1.0 : 0.0;
    }
    return soft_weight(r, std::get<SoftSigmoid>(strategy).params);
  };

  // IOU matrix, anchor-major.
  std::vector<double> ious(n_a * n_g, 0.0);
  std::vector<double> max_iou(n_a, 0.0);
  for (std::size_t a = 0; a < n_a; ++a) {
    const BBox& abox = anchors.anchors()[a].box;
    for (std::size_t g = 0; g < n_g; ++g) {
      const double r = iou(abox, gt_boxes[g]);
      ious[a * n_g + g] = r;
      max_iou[a] = std::max(max_iou[a], r);
    }
  }

  // Each anchor keeps its highest-weight gt; ties go to the smaller gt index.
  std::vector<Kept> kept(n_a);
  std::vector<int> coverage(n_g, 0);
  for (std::size_t a = 0; a < n_a; ++a) {
    for (std::size_t g = 0; g < n_g; ++g) {
      const double w = weight_of(ious[a * n_g + g]);
      if (w > kept[a].weight) {
        kept[a] = Kept{static_cast<int>(g), w, false};
      }
    }
    if (kept[a].gt >= 0) ++coverage[static_cast<std::size_t>(kept[a].gt)];
  }

  // Best-IOU fallback for gts with no positively weighted anchor. A fallback
  // claim is permanent; a gt stranded by someone else's claim re-enters the
  // queue and takes its best anchor among those still unclaimed.
  std::vector<bool> fallback_fired(n_g, false);
  std::deque<int> starved;
  for (std::size_t g = 0; g < n_g; ++g) {
    if (coverage[g] == 0) starved.push_back(static_cast<int>(g));
  }
  while (!starved.empty()) {
    const int g = starved.front();
    starved.pop_front();
    if (coverage[static_cast<std::size_t>(g)] > 0) continue;
    int best_a = -1;
    double best_r = -1.0;
    for (std::size_t a = 0; a < n_a; ++a) {
      if (kept[a].forced) continue;
      const double r = ious[a * n_g + static_cast<std::size_t>(g)];
      if (r > best_r) {
        best_r = r;
        best_a = static_cast<int>(a);
      }
    }
    if (best_a < 0) {
      throw std::invalid_argument("assign: more unmatched ground-truth boxes than anchors");
    }
    const std::size_t a = static_cast<std::size_t>(best_a);
    if (kept[a].gt >= 0) {
      const std::size_t old_g = static_cast<std::size_t>(kept[a].gt);
      if (--coverage[old_g] == 0) starved.push_back(static_cast<int>(old_g));
    }
    kept[a] = Kept{g, 1.0, true};
    ++coverage[static_cast<std::size_t>(g)];
    fallback_fired[static_cast<std::size_t>(g)] = true;
  }

  AssignmentTable table;
  table.image_id = std::move(image_id);
  table.fallback_fired = std::move(fallback_fired);
  for (std::size_t a = 0; a < n_a; ++a) {
    if (kept[a].gt >= 0 && kept[a].weight > 0.0) {
      table.rows.push_back(AssignmentRow{static_cast<int>(a), kept[a].gt, kept[a].weight});
    }
  }

  // Negative set from the anchor's max IOU over all gts; anchors holding a
  // positive row never land in it.
  const auto negative_under = [&](std::size_t a) -> bool {
    if (const auto* b = std::get_if<BinaryThreshold>(&strategy)) {
      if (b->neg_iou_lt) return max_iou[a] < *b->neg_iou_lt;
      return true;  // no negative threshold: every non-positive anchor
    }
    const SoftThresholdParams& p = std::get<SoftSigmoid>(strategy).params;
    return max_iou[a] < SoftThresholdParams::center - p.alpha;
  };
  for (std::size_t a = 0; a < n_a; ++a) {
    if (kept[a].gt >= 0 && kept[a].weight > 0.0) continue;
    if (negative_under(a)) table.negative_anchor_ids.push_back(static_cast<int>(a));
  }
  return table;
}

}  // namespace

AssignmentTable assign(const AnchorSet& anchors, const std::vector<BBox>& gt_boxes,
                       const MatchStrategy& strategy, std::string image_id) {
  if (std::holds_alternative<CenterBest>(strategy)) {
    return assign_center_best(anchors, gt_boxes, std::move(image_id));
  }
  return assign_thresholded(anchors, gt_boxes, strategy, std::move(image_id));
}

AssignmentTable assign_center_best(const AnchorSet& anchors, const std::vector<BBox>& gt_boxes,
                                   std::string image_id) {
  if (anchors.size() == 0) throw std::invalid_argument("assign requires a non-empty anchor set");
  if (anchors.config().levels.size() != 1) {
    throw std::invalid_argument("center-best assignment requires a single-level pyramid");
  }
  const PyramidLevel& level = anchors.config().levels.front();
  const int n_templates = static_cast<int>(level.templates.size());
  const std::size_t n_g = gt_boxes.size();

  AssignmentTable table;
  table.image_id = std::move(image_id);
  table.fallback_fired.assign(n_g, false);

  std::vector<int> claimed_by(anchors.size(), -1);
  for (std::size_t g = 0; g < n_g; ++g) {
    const double cx = gt_boxes[g].center_x();
    const double cy = gt_boxes[g].center_y();
    const int ci = static_cast<int>(std::floor(cx / level.stride_x));
    const int cj = static_cast<int>(std::floor(cy / level.stride_y));
    if (ci < 0 || ci >= level.grid_w || cj < 0 || cj >= level.grid_h) {
      table.unassignable_gt_indices.push_back(static_cast<int>(g));
      continue;
    }
    const int base = (cj * level.grid_w + ci) * n_templates;
    int best_id = -1;
    double best_r = -1.0;
    for (int t = 0; t < n_templates; ++t) {
      const int id = base + t;
      if (claimed_by[static_cast<std::size_t>(id)] >= 0) continue;
      const double r = iou(anchors.by_id(id).box, gt_boxes[g]);
      if (r > best_r) {
        best_r = r;
        best_id = id;
      }
    }
    if (best_id < 0) {
      table.unassignable_gt_indices.push_back(static_cast<int>(g));
      continue;
    }
    claimed_by[static_cast<std::size_t>(best_id)] = static_cast<int>(g);
    table.rows.push_back(AssignmentRow{best_id, static_cast<int>(g), 1.0});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const AssignmentRow& a, const AssignmentRow& b) {
              return a.anchor_id < b.anchor_id;
            });

  // Negatives: C_ij = 0 and max IOU over all gts <= 0.6.
  for (const Anchor& a : anchors.anchors()) {
    if (claimed_by[static_cast<std::size_t>(a.id)] >= 0) continue;
    double max_r = 0.0;
    for (const BBox& gt : gt_boxes) max_r = std::max(max_r, iou(a.box, gt));
    if (max_r <= 0.6) table.negative_anchor_ids.push_back(a.id);
  }
  return table;
}

std::vector<int> select_hard_negatives(const std::map<int, double>& candidate_losses,
                                       int positive_count, int ratio) {
  if (ratio < 1) throw std::invalid_argument("select_hard_negatives: ratio must be >= 1");
  if (positive_count < 0) {
    throw std::invalid_argument("select_hard_negatives: positive_count must be >= 0");
  }
  for (const auto& [id, loss] : candidate_losses) {
    if (!std::isfinite(loss) || loss < 0.0) {
      throw std::invalid_argument("select_hard_negatives: loss for anchor " +
                                  std::to_string(id) + " must be finite and non-negative");
    }
  }
  if (positive_count == 0) return {};

  std::vector<std::pair<int, double>> by_loss(candidate_losses.begin(), candidate_losses.end());
  std::sort(by_loss.begin(), by_loss.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t take =
      std::min(static_cast<std::size_t>(static_cast<long long>(ratio) * positive_count),
               by_loss.size());
  std::vector<int> selected;
  selected.reserve(take);
  for (std::size_t i = 0; i < take; ++i) selected.push_back(by_loss[i].first);
  std::sort(selected.begin(), selected.end());
  return selected;
}

namespace {

constexpr const char* kAssignmentHeader = "image_id,anchor_id,gt_index,weight";

void write_id_list(std::ostream& out, const std::vector<int>& ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out << ',';
    out << ids[i];
  }
}

void write_table_body(const AssignmentTable& table, std::ostream& out) {
  for (const AssignmentRow& row : table.rows) {
    out << table.image_id << ',' << row.anchor_id << ',' << row.gt_index << ','
        << format_fixed9(row.weight) << '\n';
  }
  out << "#fallback:" << table.image_id << ':';
  bool first = true;
  for (std::size_t g = 0; g < table.fallback_fired.size(); ++g) {
    if (!table.fallback_fired[g]) continue;
    if (!first) out << ',';
    out << g;
    first = false;
  }
  out << '\n';
  out << "#negatives:" << table.image_id << ':';
  write_id_list(out, table.negative_anchor_ids);
  out << '\n';
  if (!table.unassignable_gt_indices.empty()) {
    out << "#unassignable:" << table.image_id << ':';
    write_id_list(out, table.unassignable_gt_indices);
    out << '\n';
  }
}

}  // namespace

void export_assignment(const AssignmentTable& table, std::ostream& out) {
  out << kAssignmentHeader << '\n';
  write_table_body(table, out);
}

void export_assignment(const std::vector<AssignmentTable>& tables, std::ostream& out) {
  out << kAssignmentHeader << '\n';
  for (const AssignmentTable& table : tables) write_table_body(table, out);
}

namespace {

std::vector<int> parse_id_list(const std::string& text, int line, const char* what) {
  std::vector<int> ids;
  if (text.empty()) return ids;
  for (const std::string& field : split_csv(text)) {
    ids.push_back(parse_int(field, line, what));
  }
  return ids;
}

// Trailer payloads are "<image_id>:<comma-separated ids>"; image ids carry at
// most one embedded colon (video:frame), so split at the last one.
std::pair<std::string, std::string> split_trailer(const std::string& payload, int line) {
  const std::size_t colon = payload.rfind(':');
  if (colon == std::string::npos) {
    throw CsvError(line, "malformed trailer, expected '<image_id>:<ids>'");
  }
  return {payload.substr(0, colon), payload.substr(colon + 1)};
}

}  // namespace

std::vector<AssignmentTable> import_assignment(std::istream& in) {
  std::vector<AssignmentTable> tables;
  std::map<std::string, std::size_t> index_of;
  const auto table_for = [&](const std::string& image_id) -> AssignmentTable& {
    auto [it, inserted] = index_of.try_emplace(image_id, tables.size());
    if (inserted) {
      tables.emplace_back();
      tables.back().image_id = image_id;
    }
    return tables[it->second];
  };
  const auto ensure_gt = [](AssignmentTable& table, int gt_index) {
    if (static_cast<int>(table.fallback_fired.size()) <= gt_index) {
      table.fallback_fired.resize(static_cast<std::size_t>(gt_index) + 1, false);
    }
  };

  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#fallback:", 0) == 0) {
        auto [image_id, ids] = split_trailer(line.substr(10), line_no);
        AssignmentTable& table = table_for(image_id);
        for (int g : parse_id_list(ids, line_no, "fallback gt index")) {
          ensure_gt(table, g);
          table.fallback_fired[static_cast<std::size_t>(g)] = true;
        }
      } else if (line.rfind("#negatives:", 0) == 0) {
        auto [image_id, ids] = split_trailer(line.substr(11), line_no);
        table_for(image_id).negative_anchor_ids = parse_id_list(ids, line_no, "negative id");
      } else if (line.rfind("#unassignable:", 0) == 0) {
        auto [image_id, ids] = split_trailer(line.substr(14), line_no);
        AssignmentTable& table = table_for(image_id);
        table.unassignable_gt_indices = parse_id_list(ids, line_no, "unassignable gt index");
        for (int g : table.unassignable_gt_indices) ensure_gt(table, g);
      }
      continue;  // other # lines are metadata
    }
    if (!header_seen) {
      if (line != kAssignmentHeader) {
        throw CsvError(line_no, "expected header '" + std::string(kAssignmentHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 4) throw CsvError(line_no, "expected 4 fields");
    AssignmentTable& table = table_for(fields[0]);
    AssignmentRow row;
    row.anchor_id = parse_int(fields[1], line_no, "anchor_id");
    row.gt_index = parse_int(fields[2], line_no, "gt_index");
    row.weight = parse_double(fields[3], line_no, "weight");
    ensure_gt(table, row.gt_index);
    table.rows.push_back(row);
  }
  if (!header_seen) throw CsvError(line_no == 0 ? 1 : line_no, "missing assignment header");
  return tables;
}

}  // namespace anchorlens
