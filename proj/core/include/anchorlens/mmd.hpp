#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchorlens/anchors.hpp"
#include "anchorlens/geometry.hpp"

namespace anchorlens {

/// One row of a detector score dump.
struct DetectionRecord {
  std::string video_id;
  int frame_index = 0;
  int anchor_id = 0;
  int class_id = 0;
  double score = 0;
  std::optional<BBox> predicted_box;  // not carried by the dump file format
};

struct TrackPoint {
  int frame_index = 0;
  double score = 0;     // p_t
  int anchor_id = -1;   // -1 when no anchor passed the IOU filter
  bool no_anchor = false;

  bool operator==(const TrackPoint&) const = default;
};

/// Per (video, object, class) score sequence; frame indices strictly
/// increasing, gaps allowed.
struct ScoreTrack {
  std::string video_id;
  int object_id = 0;
  int class_id = 0;
  std::vector<TrackPoint> points;
};

struct MmdThresholds {
  double gamma_min = 0.5;
  double gamma_ratio = 0.9;
  double gamma_max = 0.6;

  void validate() const;
};

struct FrameScore {
  double score = 0;
  int anchor_id = 0;
};

/// The maximum score among records of the given class whose anchor has
/// IOU > 0.5 with the ground-truth box; ties go to the smaller anchor id.
/// Absent when no anchor qualifies. Throws std::out_of_range when a record
/// references an unknown anchor id.
std::optional<FrameScore> frame_score(std::span<const DetectionRecord> frame_records,
                                      const BBox& gt, int class_id, const AnchorSet& anchors);

/// Frame indices t with consecutive neighbors where p_{t-1} >= gamma_min,
/// p_{t+1} >= gamma_min, p_t / p_{t-1} <= gamma_ratio, and p_t < gamma_max.
/// p_{t-1} = 0 never satisfies the ratio condition.
std::vector<int> extract_mmd(const ScoreTrack& track, const MmdThresholds& th);

struct GroundTruthBox {
  std::string video_id;
  int frame_index = 0;
  int object_id = 0;
  int class_id = 0;
  BBox box{0, 0, 1, 1};
};

/// Ground-truth rows whose (video, frame) never appears in the dump; the
/// affected track gets a gap at that frame.
struct MissingFrame {
  std::string video_id;
  int frame_index = 0;
  int object_id = 0;
  int class_id = 0;
};

/// One track per (video, object, class), assembled with frame_score.
/// Tracks are ordered by key; frames absent from the dump are reported.
std::vector<ScoreTrack> build_tracks(std::span<const DetectionRecord> dump,
                                     std::span<const GroundTruthBox> gt_boxes,
                                     const AnchorSet& anchors,
                                     std::vector<MissingFrame>* missing = nullptr);

}  // namespace anchorlens
