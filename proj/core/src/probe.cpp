#include "anchorlens/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "anchorlens/csv.hpp"

namespace anchorlens {

std::string to_string(WarpFamily family) {
  switch (family) {
    case WarpFamily::Scaling: return "scaling";
    case WarpFamily::ShiftX: return "shiftx";
    case WarpFamily::AspectX: return "aspectx";
    case WarpFamily::AspectY: return "aspecty";
  }
  return "unknown";
}

WarpFamily warp_family_from_string(const std::string& name) {
  if (name == "scaling") return WarpFamily::Scaling;
  if (name == "shiftx") return WarpFamily::ShiftX;
  if (name == "aspectx") return WarpFamily::AspectX;
  if (name == "aspecty") return WarpFamily::AspectY;
  throw std::invalid_argument("unknown warp family '" + name +
                              "' (expected scaling, shiftx, aspectx or aspecty)");
}

const AxisWarp& ProbeManifest::warp_at(int n) const {
  for (const ManifestEntry& e : entries) {
    if (e.n == n) return e.warp;
  }
  throw std::out_of_range("no manifest entry for n=" + std::to_string(n));
}

bool ProbeManifest::has_index(int n) const {
  return std::any_of(entries.begin(), entries.end(),
                     [n](const ManifestEntry& e) { return e.n == n; });
}

namespace {

double signed_power(double grow_base, double shrink_base, int n) {
  if (n == 0) return 1.0;
  return n > 0 ? std::pow(grow_base, n) : std::pow(shrink_base, -n);
}

}  // namespace

ProbeManifest build_manifest(WarpFamily family, const ImageExtent& extent) {
  ProbeManifest manifest;
  manifest.family = family;
  manifest.extent = extent;
  const double cx = 0.5 * extent.width;
  const double cy = 0.5 * extent.height;
  manifest.entries.reserve(2 * kWarpIndexRange + 1);
  for (int n = -kWarpIndexRange; n <= kWarpIndexRange; ++n) {
    AxisWarp warp;
    switch (family) {
      case WarpFamily::Scaling: {
        const double s = signed_power(1.02, 0.98, n);
        warp = AxisWarp(s, s, 0.0, 0.0, cx, cy);
        break;
      }
      case WarpFamily::ShiftX:
        warp = AxisWarp(1.0, 1.0, 3.0 * n, 0.0, cx, cy);
        break;
      case WarpFamily::AspectX:
        warp = AxisWarp(signed_power(1.01, 0.99, n), 1.0, 0.0, 0.0, cx, cy);
        break;
      case WarpFamily::AspectY:
        warp = AxisWarp(1.0, signed_power(1.01, 0.99, n), 0.0, 0.0, cx, cy);
        break;
    }
    manifest.entries.push_back(ManifestEntry{n, warp});
  }
  return manifest;
}

void write_manifest(const ProbeManifest& manifest, std::ostream& out) {
  out << "#extent:" << manifest.extent.width << ',' << manifest.extent.height << '\n';
  out << "#family:" << to_string(manifest.family) << '\n';
  out << "n,family,sx,sy,tx,ty,cx,cy\n";
  for (const ManifestEntry& e : manifest.entries) {
    out << e.n << ',' << to_string(manifest.family) << ',' << format_g17(e.warp.sx) << ','
        << format_g17(e.warp.sy) << ',' << format_g17(e.warp.tx) << ',' << format_g17(e.warp.ty)
        << ',' << format_g17(e.warp.cx) << ',' << format_g17(e.warp.cy) << '\n';
  }
}

ProbeManifest read_manifest(std::istream& in) {
  std::optional<ImageExtent> extent;
  std::optional<WarpFamily> family;
  std::vector<ManifestEntry> entries;

  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#extent:", 0) == 0) {
        const auto fields = split_csv(line.substr(8));
        if (fields.size() != 2) throw CsvError(line_no, "expected '#extent:width,height'");
        extent = ImageExtent(parse_int(fields[0], line_no, "width"),
                             parse_int(fields[1], line_no, "height"));
      } else if (line.rfind("#family:", 0) == 0) {
        family = warp_family_from_string(line.substr(8));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "n,family,sx,sy,tx,ty,cx,cy") {
        throw CsvError(line_no, "expected header 'n,family,sx,sy,tx,ty,cx,cy'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 8) throw CsvError(line_no, "expected 8 fields");
    ManifestEntry entry;
    entry.n = parse_int(fields[0], line_no, "n");
    try {
      entry.warp = AxisWarp(parse_double(fields[2], line_no, "sx"),
                            parse_double(fields[3], line_no, "sy"),
                            parse_double(fields[4], line_no, "tx"),
                            parse_double(fields[5], line_no, "ty"),
                            parse_double(fields[6], line_no, "cx"),
                            parse_double(fields[7], line_no, "cy"));
    } catch (const std::invalid_argument& e) {
      throw CsvError(line_no, e.what());
    }
    entries.push_back(entry);
  }
  if (!extent) throw CsvError(1, "manifest is missing the '#extent:' header");
  if (!family) throw CsvError(1, "manifest is missing the '#family:' header");
  ProbeManifest manifest;
  manifest.family = *family;
  manifest.extent = *extent;
  manifest.entries = std::move(entries);
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.n < b.n; });
  return manifest;
}

std::vector<ScoreProfile> ingest_profiles(std::istream& in, const ProbeManifest& manifest,
                                          std::optional<FrameKey>* frame_out,
                                          std::optional<int> class_filter) {
  std::map<int, ScoreProfile> by_anchor;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#frame:", 0) == 0 && frame_out) {
        const auto fields = split_csv(line.substr(7));
        if (fields.size() != 4) {
          throw CsvError(line_no, "expected '#frame:video_id,frame_index,object_id,class_id'");
        }
        *frame_out = FrameKey{fields[0], parse_int(fields[1], line_no, "frame_index"),
                              parse_int(fields[2], line_no, "object_id"),
                              parse_int(fields[3], line_no, "class_id")};
      }
      continue;
    }
    if (!header_seen && line == "n,anchor_id,class_id,score") {
      header_seen = true;
      continue;
    }
    header_seen = true;
    const auto fields = split_csv(line);
    if (fields.size() != 4) throw CsvError(line_no, "expected 4 fields");
    const int n = parse_int(fields[0], line_no, "n");
    if (!manifest.has_index(n)) {
      throw CsvError(line_no, "warp index n=" + std::to_string(n) + " is outside the manifest");
    }
    const int anchor_id = parse_int(fields[1], line_no, "anchor_id");
    const int class_id = parse_int(fields[2], line_no, "class_id");
    const double score = parse_double(fields[3], line_no, "score");
    if (score < 0.0 || score > 1.0) throw CsvError(line_no, "score must be in [0, 1]");
    if (class_filter && class_id != *class_filter) continue;
    ScoreProfile& profile = by_anchor[anchor_id];
    profile.anchor_id = anchor_id;
    if (!profile.scores.emplace(n, score).second) {
      throw CsvError(line_no, "duplicate score for anchor " + std::to_string(anchor_id) +
                                  " at n=" + std::to_string(n));
    }
  }
  std::vector<ScoreProfile> profiles;
  profiles.reserve(by_anchor.size());
  for (auto& [id, profile] : by_anchor) profiles.push_back(std::move(profile));
  return profiles;
}

namespace {

struct EnvelopePoint {
  int n = 0;
  double score = 0;
  int anchor_id = -1;
};

BoundaryVerdict no_evidence(std::string reason) {
  BoundaryVerdict v;
  v.anchor_boundary = false;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

BoundaryVerdict analyze_profiles(std::span<const ScoreProfile> profiles, const AnchorSet& anchors,
                                 const MmdThresholds& th, int switch_window) {
  th.validate();
  if (switch_window < 0) throw std::invalid_argument("switch_window must be >= 0");
  if (profiles.size() < 2) {
    throw std::invalid_argument("analyze_profiles requires at least two profiles");
  }
  // Every profile must neighbor at least one other profile.
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const Anchor& a = anchors.by_id(profiles[i].anchor_id);
    bool has_neighbor = false;
    for (std::size_t j = 0; j < profiles.size() && !has_neighbor; ++j) {
      if (i == j) continue;
      has_neighbor = neighbor_kind(anchors, a, anchors.by_id(profiles[j].anchor_id)).has_value();
    }
    if (!has_neighbor) {
      throw std::invalid_argument("profile anchor " + std::to_string(profiles[i].anchor_id) +
                                  " neighbors none of the other profile anchors");
    }
  }

  // Upper envelope over the union of warp indices; argmax ties go to the
  // smaller anchor id (profiles are scanned in ascending-id order).
  std::vector<const ScoreProfile*> ordered;
  for (const ScoreProfile& p : profiles) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const ScoreProfile* a, const ScoreProfile* b) { return a->anchor_id < b->anchor_id; });
  std::set<int> domain;
  for (const ScoreProfile* p : ordered) {
    for (const auto& [n, s] : p->scores) domain.insert(n);
  }
  std::vector<EnvelopePoint> envelope;
  envelope.reserve(domain.size());
  for (int n : domain) {
    EnvelopePoint pt;
    pt.n = n;
    for (const ScoreProfile* p : ordered) {
      const auto it = p->scores.find(n);
      if (it == p->scores.end()) continue;
      if (pt.anchor_id < 0 || it->second > pt.score) {
        pt.score = it->second;
        pt.anchor_id = p->anchor_id;
      }
    }
    envelope.push_back(pt);
  }

  // The switch nearest n = 0.
  int best_change = -1;
  int best_distance = 0;
  for (std::size_t i = 0; i + 1 < envelope.size(); ++i) {
    if (envelope[i].anchor_id == envelope[i + 1].anchor_id) continue;
    const int distance = std::min(std::abs(envelope[i].n), std::abs(envelope[i + 1].n));
    if (best_change < 0 || distance < best_distance) {
      best_change = static_cast<int>(i);
      best_distance = distance;
    }
  }
  if (best_change < 0) return no_evidence("no valley");

  const EnvelopePoint& left_pt = envelope[static_cast<std::size_t>(best_change)];
  const EnvelopePoint& right_pt = envelope[static_cast<std::size_t>(best_change) + 1];
  const EnvelopePoint* switch_pt = &left_pt;
  if (right_pt.score < left_pt.score ||
      (right_pt.score == left_pt.score && std::abs(right_pt.n) < std::abs(left_pt.n))) {
    switch_pt = &right_pt;
  }
  const int switch_n = switch_pt->n;
  if (std::abs(switch_n) > switch_window) return no_evidence("switch outside window");

  double peak_left = -1.0;
  double peak_right = -1.0;
  for (const EnvelopePoint& pt : envelope) {
    if (pt.n < switch_n) peak_left = std::max(peak_left, pt.score);
    if (pt.n > switch_n) peak_right = std::max(peak_right, pt.score);
  }
  if (peak_left < 0.0 || peak_right < 0.0) return no_evidence("switch at domain edge");
  if (std::min(peak_left, peak_right) < th.gamma_min) {
    return no_evidence("side peak below gamma-min");
  }

  double valley = switch_pt->score;
  for (const EnvelopePoint& pt : envelope) {
    if (std::abs(pt.n - switch_n) <= switch_window) valley = std::min(valley, pt.score);
  }
  if (valley > th.gamma_ratio * std::min(peak_left, peak_right)) return no_evidence("no valley");

  const auto origin = std::find_if(envelope.begin(), envelope.end(),
                                   [](const EnvelopePoint& pt) { return pt.n == 0; });
  if (origin == envelope.end()) return no_evidence("no score at n=0");
  if (origin->score >= th.gamma_max) return no_evidence("score at n=0 not low");

  const auto kind =
      neighbor_kind(anchors, anchors.by_id(left_pt.anchor_id), anchors.by_id(right_pt.anchor_id));
  if (!kind) return no_evidence("switching pair not neighbors");

  BoundaryVerdict verdict;
  verdict.anchor_boundary = true;
  verdict.kind = *kind;
  verdict.switch_n = switch_n;
  verdict.valley_score = valley;
  verdict.side_peak_left = peak_left;
  verdict.side_peak_right = peak_right;
  return verdict;
}

std::string to_string(Cause cause) {
  switch (cause) {
    case Cause::External: return "external";
    case Cause::AnchorBoundary: return "anchor_boundary";
    case Cause::Others: return "others";
  }
  return "unknown";
}

CauseBreakdown tally_causes(const std::vector<std::pair<FrameKey, BoundaryVerdict>>& verdicts,
                            const std::vector<CauseLabel>& labels,
                            std::vector<CauseLabel>* unmatched_labels) {
  std::map<FrameKey, std::string> label_of;
  std::set<FrameKey> verdict_keys;
  for (const auto& [key, verdict] : verdicts) verdict_keys.insert(key);
  for (const CauseLabel& label : labels) {
    if (verdict_keys.count(label.frame) == 0) {
      if (unmatched_labels) unmatched_labels->push_back(label);
      continue;
    }
    label_of[label.frame] = label.label;
  }

  CauseBreakdown breakdown;
  for (const auto& [key, verdict] : verdicts) {
    CauseRow row;
    row.frame = key;
    row.boundary_verdict = verdict.anchor_boundary;
    const auto it = label_of.find(key);
    if (it != label_of.end()) row.label = it->second;
    if (row.label == "external") {
      row.cause = Cause::External;
      ++breakdown.external;
    } else if (verdict.anchor_boundary) {
      row.cause = Cause::AnchorBoundary;
      ++breakdown.anchor_boundary;
    } else {
      row.cause = Cause::Others;
      ++breakdown.others;
    }
    breakdown.rows.push_back(std::move(row));
  }
  std::stable_sort(breakdown.rows.begin(), breakdown.rows.end(),
                   [](const CauseRow& a, const CauseRow& b) { return a.frame < b.frame; });
  return breakdown;
}

}  // namespace anchorlens
