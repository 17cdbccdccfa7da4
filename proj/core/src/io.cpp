#include "anchorlens/io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "anchorlens/csv.hpp"

namespace anchorlens {

namespace {

constexpr const char* kDumpHeader = "video_id,frame_index,anchor_id,class_id,score";
constexpr const char* kGtHeader = "video_id,frame_index,object_id,class_id,x_min,y_min,x_max,y_max";
constexpr const char* kProfileHeader = "n,anchor_id,class_id,score";

}  // namespace

std::vector<DetectionRecord> read_detection_dump(std::istream& in) {
  std::vector<DetectionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line == kDumpHeader) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) throw CsvError(line_no, "expected 5 fields");
    DetectionRecord rec;
    rec.video_id = fields[0];
    rec.frame_index = parse_int(fields[1], line_no, "frame_index");
    rec.anchor_id = parse_int(fields[2], line_no, "anchor_id");
    rec.class_id = parse_int(fields[3], line_no, "class_id");
    rec.score = parse_double(fields[4], line_no, "score");
    if (rec.frame_index < 0) throw CsvError(line_no, "frame_index must be >= 0");
    if (rec.score < 0.0 || rec.score > 1.0) throw CsvError(line_no, "score must be in [0, 1]");
    records.push_back(std::move(rec));
  }
  return records;
}

void write_detection_dump(std::span<const DetectionRecord> records, std::ostream& out) {
  out << kDumpHeader << '\n';
  for (const DetectionRecord& rec : records) {
    out << rec.video_id << ',' << rec.frame_index << ',' << rec.anchor_id << ',' << rec.class_id
        << ',' << format_fixed9(rec.score) << '\n';
  }
}

std::vector<GroundTruthBox> read_ground_truth(std::istream& in) {
  std::vector<GroundTruthBox> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line == kGtHeader) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 8) throw CsvError(line_no, "expected 8 fields");
    GroundTruthBox row;
    row.video_id = fields[0];
    row.frame_index = parse_int(fields[1], line_no, "frame_index");
    row.object_id = parse_int(fields[2], line_no, "object_id");
    row.class_id = parse_int(fields[3], line_no, "class_id");
    if (row.frame_index < 0) throw CsvError(line_no, "frame_index must be >= 0");
    try {
      row.box = BBox(parse_double(fields[4], line_no, "x_min"),
                     parse_double(fields[5], line_no, "y_min"),
                     parse_double(fields[6], line_no, "x_max"),
                     parse_double(fields[7], line_no, "y_max"));
    } catch (const std::invalid_argument& e) {
      throw CsvError(line_no, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ground_truth(std::span<const GroundTruthBox> rows, std::ostream& out) {
  out << kGtHeader << '\n';
  for (const GroundTruthBox& row : rows) {
    out << row.video_id << ',' << row.frame_index << ',' << row.object_id << ',' << row.class_id
        << ',' << format_g17(row.box.x_min) << ',' << format_g17(row.box.y_min) << ','
        << format_g17(row.box.x_max) << ',' << format_g17(row.box.y_max) << '\n';
  }
}

void write_profile_scores(std::span<const ScoreProfile> profiles, int class_id,
                          const std::optional<FrameKey>& frame, std::ostream& out) {
  if (frame) {
    out << "#frame:" << frame->video_id << ',' << frame->frame_index << ',' << frame->object_id
        << ',' << frame->class_id << '\n';
  }
  out << kProfileHeader << '\n';
  // n-major so the file reads as one sweep after another.
  std::vector<int> indices;
  for (const ScoreProfile& p : profiles) {
    for (const auto& [n, s] : p.scores) indices.push_back(n);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (int n : indices) {
    for (const ScoreProfile& p : profiles) {
      const auto it = p.scores.find(n);
      if (it == p.scores.end()) continue;
      out << n << ',' << p.anchor_id << ',' << class_id << ',' << format_fixed9(it->second)
          << '\n';
    }
  }
}

}  // namespace anchorlens
