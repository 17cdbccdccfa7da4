#include "anchorlens/mmd.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace anchorlens {

void MmdThresholds::validate() const {
  const auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(gamma_min) || !in_unit(gamma_ratio) || !in_unit(gamma_max)) {
    throw std::invalid_argument("MmdThresholds: gamma values must be in (0, 1]");
  }
}

std::optional<FrameScore> frame_score(std::span<const DetectionRecord> frame_records,
                                      const BBox& gt, int class_id, const AnchorSet& anchors) {
  std::optional<FrameScore> best;
  for (const DetectionRecord& rec : frame_records) {
    if (rec.class_id != class_id) continue;
    const Anchor& anchor = anchors.by_id(rec.anchor_id);  // throws on unknown id
    if (!(iou(anchor.box, gt) > 0.5)) continue;
    if (!best || rec.score > best->score ||
        (rec.score == best->score && rec.anchor_id < best->anchor_id)) {
      best = FrameScore{rec.score, rec.anchor_id};
    }
  }
  return best;
}

std::vector<int> extract_mmd(const ScoreTrack& track, const MmdThresholds& th) {
  th.validate();
  std::vector<int> flagged;
  if (track.points.size() < 3) return flagged;
  for (std::size_t i = 1; i + 1 < track.points.size(); ++i) {
    const TrackPoint& prev = track.points[i - 1];
    const TrackPoint& cur = track.points[i];
    const TrackPoint& next = track.points[i + 1];
    if (prev.frame_index != cur.frame_index - 1 || next.frame_index != cur.frame_index + 1) {
      continue;  // gap: neighbors must be consecutive frames
    }
    if (prev.score < th.gamma_min || next.score < th.gamma_min) continue;
    if (prev.score <= 0.0) continue;  // ratio condition undefined, not flaggable
    if (cur.score / prev.score > th.gamma_ratio) continue;
    if (cur.score >= th.gamma_max) continue;
    flagged.push_back(cur.frame_index);
  }
  return flagged;
}

std::vector<ScoreTrack> build_tracks(std::span<const DetectionRecord> dump,
                                     std::span<const GroundTruthBox> gt_boxes,
                                     const AnchorSet& anchors,
                                     std::vector<MissingFrame>* missing) {
  std::map<std::pair<std::string, int>, std::vector<DetectionRecord>> frames;
  for (const DetectionRecord& rec : dump) {
    frames[{rec.video_id, rec.frame_index}].push_back(rec);
  }

  std::map<std::tuple<std::string, int, int>, std::vector<const GroundTruthBox*>> by_object;
  for (const GroundTruthBox& gt : gt_boxes) {
    by_object[{gt.video_id, gt.object_id, gt.class_id}].push_back(&gt);
  }

  std::vector<ScoreTrack> tracks;
  tracks.reserve(by_object.size());
  for (auto& [key, rows] : by_object) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const GroundTruthBox* a, const GroundTruthBox* b) {
                       return a->frame_index < b->frame_index;
                     });
    ScoreTrack track;
    track.video_id = std::get<0>(key);
    track.object_id = std::get<1>(key);
    track.class_id = std::get<2>(key);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const GroundTruthBox* gt = rows[i];
      if (i > 0 && rows[i - 1]->frame_index == gt->frame_index) {
        throw std::invalid_argument("duplicate ground-truth row for video '" + gt->video_id +
                                    "' object " + std::to_string(gt->object_id) + " frame " +
                                    std::to_string(gt->frame_index));
      }
      const auto frame_it = frames.find({gt->video_id, gt->frame_index});
      if (frame_it == frames.end()) {
        if (missing) {
          missing->push_back(
              MissingFrame{gt->video_id, gt->frame_index, gt->object_id, gt->class_id});
        }
        continue;  // gap in the track
      }
      const auto fs = frame_score(frame_it->second, gt->box, gt->class_id, anchors);
      if (fs) {
        track.points.push_back(TrackPoint{gt->frame_index, fs->score, fs->anchor_id, false});
      } else {
        track.points.push_back(TrackPoint{gt->frame_index, 0.0, -1, true});
      }
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

}  // namespace anchorlens
