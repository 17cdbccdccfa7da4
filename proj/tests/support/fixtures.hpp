#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "anchorlens/anchors.hpp"
#include "anchorlens/geometry.hpp"
#include "anchorlens/mmd.hpp"

namespace anchorlens::testing {

// 2x2 grid with 2 templates plus 1x1 grid with 3 templates: 11 anchors.
inline PyramidConfig eleven_anchor_config() {
  PyramidConfig config{ImageExtent(200, 200), {}};
  config.levels.push_back(PyramidLevel{2, 2, 100.0, 100.0,
                                       {TemplateSize{80, 80}, TemplateSize{120, 60}}});
  config.levels.push_back(PyramidLevel{1, 1, 200.0, 200.0,
                                       {TemplateSize{140, 140}, TemplateSize{200, 100}, TemplateSize{100, 200}}});
  return config;
}

// Two-level pyramid whose center anchors (ids 4 and 9) form a scale-boundary
// pair: 100x100 fine template, 125x125 coarse template, both centered at
// (150, 150) on a 300x300 image.
inline PyramidConfig scale_boundary_config() {
  PyramidConfig config{ImageExtent(300, 300), {}};
  config.levels.push_back(PyramidLevel{3, 3, 100.0, 100.0, {TemplateSize{100, 100}}});
  config.levels.push_back(PyramidLevel{1, 1, 300.0, 300.0, {TemplateSize{125, 125}}});
  return config;
}

// Single-level 3x3 grid, stride 100, one 100x100 template; ids 4 and 5 are
// horizontally adjacent cells of the middle row.
inline PyramidConfig grid_boundary_config() {
  PyramidConfig config{ImageExtent(300, 300), {}};
  config.levels.push_back(PyramidLevel{3, 3, 100.0, 100.0, {TemplateSize{100, 100}}});
  return config;
}

// 19x19 and 10x10 levels mirroring the two feature maps the scale-boundary
// case studies use.
inline PyramidConfig nineteen_ten_config() {
  PyramidConfig config{ImageExtent(304, 304), {}};
  config.levels.push_back(PyramidLevel{19, 19, 16.0, 16.0, {TemplateSize{60, 60}}});
  config.levels.push_back(PyramidLevel{10, 10, 30.0, 30.0, {TemplateSize{110, 110}}});
  return config;
}

// Rasterized-overlap oracle: subdivide the pair's bounding hull into
// 1000x1000 cells, count cells whose centers fall inside each box, and form
// the area ratio from cell counts. Independent of the closed-form iou path.
inline double rasterized_iou(const BBox& a, const BBox& b) {
  const double hx0 = std::min(a.x_min, b.x_min);
  const double hy0 = std::min(a.y_min, b.y_min);
  const double hx1 = std::max(a.x_max, b.x_max);
  const double hy1 = std::max(a.y_max, b.y_max);
  constexpr int kCells = 1000;
  const double cell_w = (hx1 - hx0) / kCells;
  const double cell_h = (hy1 - hy0) / kCells;

  long long cols_a = 0, cols_b = 0, cols_both = 0;
  for (int k = 0; k < kCells; ++k) {
    const double x = hx0 + (k + 0.5) * cell_w;
    const bool in_a = x >= a.x_min && x <= a.x_max;
    const bool in_b = x >= b.x_min && x <= b.x_max;
    cols_a += in_a;
    cols_b += in_b;
    cols_both += in_a && in_b;
  }
  long long rows_a = 0, rows_b = 0, rows_both = 0;
  for (int k = 0; k < kCells; ++k) {
    const double y = hy0 + (k + 0.5) * cell_h;
    const bool in_a = y >= a.y_min && y <= a.y_max;
    const bool in_b = y >= b.y_min && y <= b.y_max;
    rows_a += in_a;
    rows_b += in_b;
    rows_both += in_a && in_b;
  }

  const long long cells_a = cols_a * rows_a;
  const long long cells_b = cols_b * rows_b;
  const long long inter = cols_both * rows_both;
  const long long uni = cells_a + cells_b - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Integer-coordinate box pairs for the oracle comparison. Overlapping pairs
// span a hull of exactly [0,100]^2 so the 1000-cell subdivision lands on
// integer coordinates; roughly a third of the pairs are disjoint.
inline std::pair<BBox, BBox> random_oracle_box_pair(std::mt19937& rng) {
  std::uniform_int_distribution<int> lo(0, 40);
  std::uniform_int_distribution<int> hi(60, 100);
  std::uniform_int_distribution<int> mode(0, 2);
  const BBox a(lo(rng), lo(rng), 100, 100);
  const BBox b(0, 0, hi(rng), hi(rng));
  if (mode(rng) == 0) {
    const double off = 200 + lo(rng);
    return {a, BBox(b.x_min + off, b.y_min + off, b.x_max + off, b.y_max + off)};
  }
  return {a, b};
}

inline BBox random_box(std::mt19937& rng, double extent = 300.0) {
  std::uniform_real_distribution<double> pos(0.0, extent * 0.8);
  std::uniform_real_distribution<double> dim(extent * 0.05, extent * 0.5);
  const double x = pos(rng);
  const double y = pos(rng);
  return BBox(x, y, x + dim(rng), y + dim(rng));
}

// Direct substitution of the three MMD conditions, evaluated over a
// frame-indexed map rather than the track structure.
inline std::vector<int> mmd_oracle(const ScoreTrack& track, const MmdThresholds& th) {
  std::map<int, double> p;
  for (const TrackPoint& pt : track.points) p[pt.frame_index] = pt.score;
  std::vector<int> flagged;
  for (const auto& [t, p_t] : p) {
    const auto prev = p.find(t - 1);
    const auto next = p.find(t + 1);
    if (prev == p.end() || next == p.end()) continue;
    const bool cond_a = prev->second >= th.gamma_min && next->second >= th.gamma_min;
    const bool cond_b = prev->second > 0.0 && p_t / prev->second <= th.gamma_ratio;
    const bool cond_c = p_t < th.gamma_max;
    if (cond_a && cond_b && cond_c) flagged.push_back(t);
  }
  return flagged;
}

inline ScoreTrack random_track(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_int_distribution<int> start(0, 3);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_real_distribution<double> near_threshold(0.35, 0.95);
  std::bernoulli_distribution gap(0.15);
  std::bernoulli_distribution pick_near(0.5);

  ScoreTrack track;
  track.video_id = "rand";
  int frame = start(rng);
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && gap(rng)) ++frame;  // leave a hole
    const double score = pick_near(rng) ? near_threshold(rng) : uniform(rng);
    track.points.push_back(TrackPoint{frame, score, 0, false});
    ++frame;
  }
  return track;
}

}  // namespace anchorlens::testing
