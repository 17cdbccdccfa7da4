#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "anchorlens/assignment.hpp"
#include "anchorlens/csv.hpp"
#include "anchorlens/io.hpp"
#include "anchorlens/probe.hpp"
#include "anchorlens/synthdet.hpp"
#include "anchorlens/version.hpp"
#include "parallel.hpp"
#include "scenarios.hpp"

namespace anchorlens::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVerdictHeader =
    "video_id,frame_index,object_id,class_id,verdict,kind,switch_n,valley_score,"
    "side_peak_left,side_peak_right,reason";
constexpr const char* kTallyHeader =
    "video_id,frame_index,object_id,class_id,category,verdict,label";
constexpr const char* kMmdHeader =
    "video_id,frame_index,object_id,class_id,p_prev,p_t,p_next";
constexpr const char* kAnchorsHeader =
    "id,level,cell_i,cell_j,template,x_min,y_min,x_max,y_max";

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_meta(std::ostream& out, const GlobalOptions& g) {
  if (g.no_header) return;
  out << "# anchorlens " << kVersion << " generated=" << utc_now() << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::string resolve_pyramid_path(const GlobalOptions& g, const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (g.config.pyramid_path) return *g.config.pyramid_path;
  throw std::runtime_error("no pyramid config: pass --pyramid or set \"pyramid\" in the run config");
}

// Recoverable problems become diff-able rows and a nonzero exit.
struct ErrorRows {
  std::vector<std::string> rows;

  void add(std::string row) { rows.push_back(std::move(row)); }
  void flush(std::ostream& out) const {
    for (const std::string& row : rows) {
      out << "#error:" << row << '\n';
      std::cerr << "anchorlens: error: " << row << '\n';
    }
  }
  int exit_code() const { return rows.empty() ? 0 : 1; }
};

}  // namespace

int cmd_anchors(const GlobalOptions& g, const AnchorsArgs& args) {
  const PyramidConfig pyramid = load_pyramid_config(resolve_pyramid_path(g, args.pyramid));
  const AnchorSet set = AnchorSet::generate(pyramid);
  std::ofstream out = open_output(args.out);
  write_meta(out, g);
  out << kAnchorsHeader << '\n';
  for (const Anchor& a : set.anchors()) {
    out << a.id << ',' << a.level_index << ',' << a.cell_i << ',' << a.cell_j << ','
        << a.template_index << ',' << format_fixed9(a.box.x_min) << ','
        << format_fixed9(a.box.y_min) << ',' << format_fixed9(a.box.x_max) << ','
        << format_fixed9(a.box.y_max) << '\n';
  }
  return 0;
}

int cmd_assign(const GlobalOptions& g, const AssignArgs& args) {
  const PyramidConfig pyramid = load_pyramid_config(resolve_pyramid_path(g, args.pyramid));
  const AnchorSet set = AnchorSet::generate(pyramid);
  const std::string strategy_name = args.strategy.empty() ? g.config.strategy : args.strategy;
  MatchStrategy strategy = strategy_preset(strategy_name);
  if (auto* soft = std::get_if<SoftSigmoid>(&strategy)) {
    soft->params = g.config.thresholds.soft_params();
  }

  std::ifstream gt_in = open_input(args.gt);
  const std::vector<GroundTruthBox> gt_rows = read_ground_truth(gt_in);

  // One image per (video, frame); gt indices follow file order per image.
  std::map<std::pair<std::string, int>, std::vector<BBox>> images;
  for (const GroundTruthBox& row : gt_rows) {
    images[{row.video_id, row.frame_index}].push_back(row.box);
  }
  std::vector<std::pair<std::string, std::vector<BBox>>> ordered;
  ordered.reserve(images.size());
  for (auto& [key, boxes] : images) {
    ordered.emplace_back(key.first + ":" + std::to_string(key.second), std::move(boxes));
  }

  const std::vector<AssignmentTable> tables = parallel_map<AssignmentTable>(
      ordered.size(), g.jobs, [&](std::size_t i) {
        return assign(set, ordered[i].second, strategy, ordered[i].first);
      });

  std::ofstream out = open_output(args.out);
  write_meta(out, g);
  export_assignment(tables, out);
  return 0;
}

int cmd_mmd(const GlobalOptions& g, const MmdArgs& args) {
  const PyramidConfig pyramid = load_pyramid_config(resolve_pyramid_path(g, args.pyramid));
  const AnchorSet set = AnchorSet::generate(pyramid);
  std::ifstream dump_in = open_input(args.dump);
  const std::vector<DetectionRecord> dump = read_detection_dump(dump_in);
  std::ifstream gt_in = open_input(args.gt);
  const std::vector<GroundTruthBox> gt_rows = read_ground_truth(gt_in);

  std::vector<MissingFrame> missing;
  const std::vector<ScoreTrack> tracks = build_tracks(dump, gt_rows, set, &missing);

  struct Row {
    std::string video_id;
    int frame = 0;
    int object = 0;
    int class_id = 0;
    double p_prev = 0, p_t = 0, p_next = 0;
  };
  const MmdThresholds th = g.config.thresholds.mmd;
  const std::vector<std::vector<Row>> per_track = parallel_map<std::vector<Row>>(
      tracks.size(), g.jobs, [&](std::size_t i) {
        const ScoreTrack& track = tracks[i];
        std::vector<Row> rows;
        for (int frame : extract_mmd(track, th)) {
          Row row{track.video_id, frame, track.object_id, track.class_id, 0, 0, 0};
          for (std::size_t k = 0; k < track.points.size(); ++k) {
            if (track.points[k].frame_index == frame) {
              row.p_prev = track.points[k - 1].score;
              row.p_t = track.points[k].score;
              row.p_next = track.points[k + 1].score;
              break;
            }
          }
          rows.push_back(std::move(row));
        }
        return rows;
      });

  std::vector<Row> rows;
  for (const auto& chunk : per_track) rows.insert(rows.end(), chunk.begin(), chunk.end());
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.video_id, a.frame, a.object, a.class_id) <
           std::tie(b.video_id, b.frame, b.object, b.class_id);
  });

  std::ofstream out = open_output(args.out);
  write_meta(out, g);
  out << kMmdHeader << '\n';
  for (const Row& row : rows) {
    out << row.video_id << ',' << row.frame << ',' << row.object << ',' << row.class_id << ','
        << format_fixed9(row.p_prev) << ',' << format_fixed9(row.p_t) << ','
        << format_fixed9(row.p_next) << '\n';
  }
  ErrorRows errors;
  for (const MissingFrame& m : missing) {
    errors.add("missing-frame:" + m.video_id + "," + std::to_string(m.frame_index) + "," +
               std::to_string(m.object_id) + "," + std::to_string(m.class_id));
  }
  errors.flush(out);
  return errors.exit_code();
}

int cmd_probe_manifest(const GlobalOptions& g, const ProbeManifestArgs& args) {
  std::vector<WarpFamily> families;
  for (const std::string& name : args.families) {
    families.push_back(warp_family_from_string(name));
  }
  ImageExtent extent{1, 1};
  if (args.extent) {
    extent = ImageExtent(args.extent->first, args.extent->second);
  } else {
    extent = load_pyramid_config(resolve_pyramid_path(g, args.pyramid)).extent;
  }
  if (families.size() == 1) {
    const ProbeManifest manifest = build_manifest(families.front(), extent);
    std::ofstream out = open_output(args.out);
    write_meta(out, g);
    write_manifest(manifest, out);
    return 0;
  }
  // Several families: --out names a directory holding manifest-<family>.csv.
  fs::create_directories(args.out);
  for (const WarpFamily family : families) {
    const ProbeManifest manifest = build_manifest(family, extent);
    std::ofstream out =
        open_output((fs::path(args.out) / ("manifest-" + to_string(family) + ".csv")).string());
    write_meta(out, g);
    write_manifest(manifest, out);
  }
  return 0;
}

namespace {

void write_verdict_row(std::ostream& out, const FrameKey& frame, const BoundaryVerdict& v) {
  out << frame.video_id << ',' << frame.frame_index << ',' << frame.object_id << ','
      << frame.class_id << ',';
  if (v.anchor_boundary) {
    out << "anchor_boundary," << to_string(v.kind) << ',' << v.switch_n << ','
        << format_fixed9(v.valley_score) << ',' << format_fixed9(v.side_peak_left) << ','
        << format_fixed9(v.side_peak_right) << ",\n";
  } else {
    out << "no_boundary_evidence,,,,,," << v.reason << '\n';
  }
}

}  // namespace

int cmd_probe_analyze(const GlobalOptions& g, const ProbeAnalyzeArgs& args) {
  const PyramidConfig pyramid = load_pyramid_config(resolve_pyramid_path(g, args.pyramid));
  const AnchorSet set = AnchorSet::generate(pyramid);
  std::ifstream manifest_in = open_input(args.manifest);
  const ProbeManifest manifest = read_manifest(manifest_in);
  if (args.scores.empty()) throw std::runtime_error("probe analyze needs at least one --scores file");

  struct Analyzed {
    FrameKey frame;
    BoundaryVerdict verdict;
  };
  const Thresholds& th = g.config.thresholds;
  const std::vector<Analyzed> analyzed = parallel_map<Analyzed>(
      args.scores.size(), g.jobs, [&](std::size_t i) {
        std::ifstream in = open_input(args.scores[i]);
        std::optional<FrameKey> frame;
        std::vector<ScoreProfile> profiles;
        try {
          profiles = ingest_profiles(in, manifest, &frame, args.class_filter);
        } catch (const CsvError& e) {
          throw std::runtime_error(args.scores[i] + ": " + e.what());
        }
        Analyzed result;
        result.frame = frame.value_or(FrameKey{});
        try {
          result.verdict = analyze_profiles(profiles, set, th.mmd, th.switch_window);
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error(args.scores[i] + ": " + e.what());
        }
        return result;
      });

  std::vector<std::size_t> order(analyzed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return analyzed[a].frame < analyzed[b].frame;
  });

  std::ofstream out = open_output(args.out);
  write_meta(out, g);
  out << kVerdictHeader << '\n';
  for (std::size_t i : order) write_verdict_row(out, analyzed[i].frame, analyzed[i].verdict);
  return 0;
}

namespace {

struct VerdictRow {
  FrameKey frame;
  bool anchor_boundary = false;
};

std::vector<VerdictRow> read_verdict_file(std::istream& in) {
  std::vector<VerdictRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line == kVerdictHeader) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 11) throw CsvError(line_no, "expected 11 fields");
    VerdictRow row;
    row.frame = FrameKey{fields[0], parse_int(fields[1], line_no, "frame_index"),
                         parse_int(fields[2], line_no, "object_id"),
                         parse_int(fields[3], line_no, "class_id")};
    if (fields[4] == "anchor_boundary") {
      row.anchor_boundary = true;
    } else if (fields[4] == "no_boundary_evidence") {
      row.anchor_boundary = false;
    } else {
      throw CsvError(line_no, "unknown verdict '" + fields[4] + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CauseLabel> read_label_file(std::istream& in) {
  std::vector<CauseLabel> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line == "video_id,frame_index,object_id,class_id,label") continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) throw CsvError(line_no, "expected 5 fields");
    if (fields[4] != "external" && fields[4] != "other") {
      throw CsvError(line_no, "label must be 'external' or 'other', got '" + fields[4] + "'");
    }
    labels.push_back(CauseLabel{FrameKey{fields[0], parse_int(fields[1], line_no, "frame_index"),
                                         parse_int(fields[2], line_no, "object_id"),
                                         parse_int(fields[3], line_no, "class_id")},
                                fields[4]});
  }
  return labels;
}

void write_tally_svg(const CauseBreakdown& breakdown, std::ostream& out) {
  const int counts[3] = {breakdown.external, breakdown.anchor_boundary, breakdown.others};
  const char* names[3] = {"external", "anchor boundary", "others"};
  const char* fills[3] = {"#4878a8", "#c05050", "#7aa05a"};
  const int max_count = std::max({counts[0], counts[1], counts[2], 1});
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"360\" height=\"260\" "
         "viewBox=\"0 0 360 260\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"360\" height=\"260\" fill=\"white\"/>\n";
  out << "  <line x1=\"40\" y1=\"220\" x2=\"340\" y2=\"220\" stroke=\"black\"/>\n";
  for (int i = 0; i < 3; ++i) {
    const double h = 180.0 * counts[i] / max_count;
    const double x = 60.0 + 100.0 * i;
    char bar[256];
    std::snprintf(bar, sizeof(bar),
                  "  <rect x=\"%.1f\" y=\"%.1f\" width=\"60\" height=\"%.1f\" fill=\"%s\"/>\n",
                  x, 220.0 - h, h, fills[i]);
    out << bar;
    std::snprintf(bar, sizeof(bar),
                  "  <text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"12\">%d</text>\n",
                  x + 30.0, 212.0 - h, counts[i]);
    out << bar;
    std::snprintf(bar, sizeof(bar),
                  "  <text x=\"%.1f\" y=\"238\" text-anchor=\"middle\" font-size=\"11\">%s</text>\n",
                  x + 30.0, names[i]);
    out << bar;
  }
  out << "</svg>\n";
}

}  // namespace

int cmd_tally(const GlobalOptions& g, const TallyArgs& args) {
  std::ifstream verdicts_in = open_input(args.verdicts);
  const std::vector<VerdictRow> verdict_rows = read_verdict_file(verdicts_in);
  std::vector<CauseLabel> labels;
  if (!args.labels.empty()) {
    std::ifstream labels_in = open_input(args.labels);
    labels = read_label_file(labels_in);
  }

  std::vector<std::pair<FrameKey, BoundaryVerdict>> verdicts;
  verdicts.reserve(verdict_rows.size());
  for (const VerdictRow& row : verdict_rows) {
    BoundaryVerdict v;
    v.anchor_boundary = row.anchor_boundary;
    verdicts.emplace_back(row.frame, v);
  }
  std::vector<CauseLabel> unmatched;
  const CauseBreakdown breakdown = tally_causes(verdicts, labels, &unmatched);

  std::ofstream out = open_output(args.out);
  write_meta(out, g);
  out << "#config:" << g.config_digest << '\n';
  out << "#version:" << kVersion << '\n';
  out << kTallyHeader << '\n';
  for (const CauseRow& row : breakdown.rows) {
    out << row.frame.video_id << ',' << row.frame.frame_index << ',' << row.frame.object_id << ','
        << row.frame.class_id << ',' << to_string(row.cause) << ','
        << (row.boundary_verdict ? "anchor_boundary" : "no_boundary_evidence") << ',' << row.label
        << '\n';
  }
  out << "#totals:external=" << breakdown.external
      << ",anchor_boundary=" << breakdown.anchor_boundary << ",others=" << breakdown.others
      << '\n';

  if (!args.svg.empty()) {
    std::ofstream svg = open_output(args.svg);
    write_tally_svg(breakdown, svg);
  }

  ErrorRows errors;
  for (const CauseLabel& label : unmatched) {
    errors.add("unknown-frame-label:" + label.frame.video_id + "," +
               std::to_string(label.frame.frame_index) + "," +
               std::to_string(label.frame.object_id) + "," +
               std::to_string(label.frame.class_id));
  }
  errors.flush(out);
  return errors.exit_code();
}

namespace {

void write_pyramid_json(const PyramidConfig& config, std::ostream& out) {
  nlohmann::json doc;
  doc["extent"] = {{"width", config.extent.width}, {"height", config.extent.height}};
  doc["levels"] = nlohmann::json::array();
  for (const PyramidLevel& lv : config.levels) {
    nlohmann::json level;
    level["grid_w"] = lv.grid_w;
    level["grid_h"] = lv.grid_h;
    level["stride_x"] = lv.stride_x;
    level["stride_y"] = lv.stride_y;
    level["templates"] = nlohmann::json::array();
    for (const TemplateSize& tpl : lv.templates) {
      level["templates"].push_back({tpl.width, tpl.height});
    }
    doc["levels"].push_back(std::move(level));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& args) {
  const Scenario scenario = scenario_by_name(args.scenario);
  const AnchorSet set = AnchorSet::generate(scenario.pyramid);
  fs::create_directories(args.out_dir);
  const auto path_of = [&](const char* name) { return (fs::path(args.out_dir) / name).string(); };

  {
    std::ofstream out = open_output(path_of("pyramid.json"));
    write_pyramid_json(scenario.pyramid, out);
  }
  const ProbeManifest manifest = build_manifest(scenario.family, scenario.pyramid.extent);
  {
    std::ofstream out = open_output(path_of("manifest.csv"));
    write_meta(out, g);
    write_manifest(manifest, out);
  }

  // The simulated video: one frame per trajectory step.
  const Trajectory track_traj =
      make_trajectory(scenario.base, scenario.family, scenario.track_steps, scenario.pyramid.extent);
  std::vector<GroundTruthBox> gt_rows;
  std::vector<DetectionRecord> dump;
  for (std::size_t t = 0; t < track_traj.steps.size(); ++t) {
    const BBox& obj = track_traj.steps[t].box;
    gt_rows.push_back(GroundTruthBox{scenario.name, static_cast<int>(t), 0, scenario.class_id, obj});
    for (const Anchor& anchor : set.anchors()) {
      const double score = synth_score(anchor, obj, scenario.detector);
      if (score > 0.0 || iou(anchor.box, obj) > 0.1) {
        dump.push_back(DetectionRecord{scenario.name, static_cast<int>(t), anchor.id,
                                       scenario.class_id, score, std::nullopt});
      }
    }
  }
  {
    std::ofstream out = open_output(path_of("gt.csv"));
    write_meta(out, g);
    write_ground_truth(gt_rows, out);
  }
  {
    std::ofstream out = open_output(path_of("dump.csv"));
    write_meta(out, g);
    write_detection_dump(dump, out);
  }

  // Warp-probe scores around the middle (boundary) frame, full sweep.
  std::vector<int> sweep;
  for (int n = -kWarpIndexRange; n <= kWarpIndexRange; ++n) sweep.push_back(n);
  const Trajectory probe_traj =
      make_trajectory(scenario.base, scenario.family, sweep, scenario.pyramid.extent);
  const TrajectoryResult probe_result = run_trajectory(set, probe_traj, scenario.detector);
  int middle_frame = 0;
  for (std::size_t t = 0; t < track_traj.steps.size(); ++t) {
    if (track_traj.steps[t].n == 0) middle_frame = static_cast<int>(t);
  }
  {
    std::ofstream out = open_output(path_of("profiles.csv"));
    write_meta(out, g);
    write_profile_scores(probe_result.profiles, scenario.class_id,
                         FrameKey{scenario.name, middle_frame, 0, scenario.class_id}, out);
  }
  return 0;
}

}  // namespace anchorlens::cli
