#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchorlens/anchors.hpp"
#include "anchorlens/geometry.hpp"
#include "anchorlens/mmd.hpp"

namespace anchorlens {

/// The four warp sweeps, 59 steps each (n = -29..29, identity at n = 0):
///   Scaling: both axes by 1.02^n (n > 0) / 0.98^|n| (n < 0)
///   ShiftX:  horizontal translation by 3n pixels
///   AspectX / AspectY: one axis by 1.01^n (n > 0) / 0.99^|n| (n < 0)
enum class WarpFamily { Scaling, ShiftX, AspectX, AspectY };

inline constexpr int kWarpIndexRange = 29;

std::string to_string(WarpFamily family);
WarpFamily warp_family_from_string(const std::string& name);

struct ManifestEntry {
  int n = 0;
  AxisWarp warp;
};

struct ProbeManifest {
  WarpFamily family = WarpFamily::Scaling;
  ImageExtent extent{1, 1};
  std::vector<ManifestEntry> entries;  // sorted by n ascending

  const AxisWarp& warp_at(int n) const;  // throws std::out_of_range
  bool has_index(int n) const;
};

/// 59 entries centered on the image center.
ProbeManifest build_manifest(WarpFamily family, const ImageExtent& extent);

void write_manifest(const ProbeManifest& manifest, std::ostream& out);
ProbeManifest read_manifest(std::istream& in);

/// Per-anchor score as a function of the warp index n; missing n values are
/// simply absent from the map.
struct ScoreProfile {
  int anchor_id = 0;
  std::map<int, double> scores;
};

struct FrameKey {
  std::string video_id;
  int frame_index = 0;
  int object_id = 0;
  int class_id = 0;

  auto operator<=>(const FrameKey&) const = default;
};

/// Reads `n,anchor_id,class_id,score` rows; rejects rows whose n is outside
/// the manifest and duplicate (anchor, n) pairs, both with line numbers.
/// A `#frame:video,frame,object,class` header, when present, is returned via
/// frame_out.
std::vector<ScoreProfile> ingest_profiles(std::istream& in, const ProbeManifest& manifest,
                                          std::optional<FrameKey>* frame_out = nullptr,
                                          std::optional<int> class_filter = std::nullopt);

struct BoundaryVerdict {
  bool anchor_boundary = false;
  NeighborKind kind = NeighborKind::ScaleBoundary;  // valid when anchor_boundary
  int switch_n = 0;
  double valley_score = 0;
  double side_peak_left = 0;
  double side_peak_right = 0;
  std::string reason;  // first failed criterion when !anchor_boundary
};

/**
 * @brief Classifies a set of neighboring-anchor score profiles.
 *
 * The upper envelope e(n) of the profiles is scanned for the point nearest
 * n = 0 where the best-scoring anchor switches identity. The verdict is an
 * anchor boundary when that switch lies within switch_window of the origin,
 * both side peaks reach gamma_min, the envelope valley around the switch
 * drops to at most gamma_ratio times the lower side peak, and the score at
 * n = 0 stays below gamma_max. The first criterion that fails becomes the
 * reason of a NoBoundaryEvidence verdict.
 *
 * Throws std::invalid_argument when fewer than two profiles are given or
 * when a profile's anchor neighbors none of the others.
 */
BoundaryVerdict analyze_profiles(std::span<const ScoreProfile> profiles, const AnchorSet& anchors,
                                 const MmdThresholds& th, int switch_window);

struct CauseLabel {
  FrameKey frame;
  std::string label;  // "external" or "other"
};

enum class Cause { External, AnchorBoundary, Others };

std::string to_string(Cause cause);

struct CauseRow {
  FrameKey frame;
  Cause cause = Cause::Others;
  bool boundary_verdict = false;
  std::string label;
};

struct CauseBreakdown {
  int external = 0;
  int anchor_boundary = 0;
  int others = 0;
  std::vector<CauseRow> rows;  // sorted by frame key

  int total() const { return external + anchor_boundary + others; }
};

/// A human "external" label overrides any verdict; AnchorBoundary verdicts
/// count as anchor boundaries; everything else lands in "others".
/// Labels whose frame has no verdict are returned via unmatched_labels.
CauseBreakdown tally_causes(const std::vector<std::pair<FrameKey, BoundaryVerdict>>& verdicts,
                            const std::vector<CauseLabel>& labels,
                            std::vector<CauseLabel>* unmatched_labels = nullptr);

}  // namespace anchorlens
