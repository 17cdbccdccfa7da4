#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "anchorlens/mmd.hpp"
#include "anchorlens/probe.hpp"

namespace anchorlens {

// Line-delimited dump and ground-truth formats (see docs/formats.md):
//   dump: video_id,frame_index,anchor_id,class_id,score
//   gt:   video_id,frame_index,object_id,class_id,x_min,y_min,x_max,y_max
// A leading column-header row is accepted and written; `#` lines are
// metadata. Malformed rows raise CsvError with the line number.

std::vector<DetectionRecord> read_detection_dump(std::istream& in);
void write_detection_dump(std::span<const DetectionRecord> records, std::ostream& out);

std::vector<GroundTruthBox> read_ground_truth(std::istream& in);
void write_ground_truth(std::span<const GroundTruthBox> rows, std::ostream& out);

/// Profile score rows `n,anchor_id,class_id,score`, optionally tagged with
/// the MMD frame they probe via `#frame:`.
void write_profile_scores(std::span<const ScoreProfile> profiles, int class_id,
                          const std::optional<FrameKey>& frame, std::ostream& out);

}  // namespace anchorlens
