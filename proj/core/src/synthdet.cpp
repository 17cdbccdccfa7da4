#include "anchorlens/synthdet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace anchorlens {

SynthParams::SynthParams(double tau_, double kappa_, double s_max_)
    : tau(tau_), kappa(kappa_), s_max(s_max_) {
  if (!(tau >= 0.0) || !(tau < 1.0)) {
    throw std::invalid_argument("SynthParams: tau must be in [0, 1)");
  }
  if (!(kappa >= 1.0)) throw std::invalid_argument("SynthParams: kappa must be >= 1");
  if (!(s_max > 0.0) || !(s_max <= 1.0)) {
    throw std::invalid_argument("SynthParams: s_max must be in (0, 1]");
  }
}

double synth_score(const Anchor& anchor, const BBox& obj, const SynthParams& p) {
  const double r = iou(anchor.box, obj);
  const double t = std::clamp((r - p.tau) / (1.0 - p.tau), 0.0, 1.0);
  return p.s_max * std::pow(t, p.kappa);
}

Trajectory make_trajectory(const BBox& base, WarpFamily family, const std::vector<int>& indices,
                           const ImageExtent& extent) {
  if (indices.empty()) throw std::invalid_argument("trajectory needs at least one step");
  const ProbeManifest manifest = build_manifest(family, extent);
  Trajectory traj;
  traj.base = base;
  traj.family = family;
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (int n : sorted) {
    traj.steps.push_back(TrajectoryStep{n, apply_warp(manifest.warp_at(n), base)});
  }
  return traj;
}

TrajectoryResult run_trajectory(const AnchorSet& anchors, const Trajectory& traj,
                                const SynthParams& p) {
  if (traj.steps.empty()) throw std::invalid_argument("trajectory has no steps");
  const std::size_t n_steps = traj.steps.size();
  const std::size_t n_anchors = anchors.size();

  // Score matrix first so noise, when enabled, is drawn in one fixed order.
  std::vector<double> scores(n_steps * n_anchors, 0.0);
  std::mt19937_64 rng(p.noise_seed);
  std::normal_distribution<double> noise(0.0, p.noise_sigma > 0.0 ? p.noise_sigma : 1.0);
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (std::size_t a = 0; a < n_anchors; ++a) {
      double value = synth_score(anchors.anchors()[a], traj.steps[s].box, p);
      if (p.noise_sigma > 0.0) value = std::clamp(value + noise(rng), 0.0, 1.0);
      scores[s * n_anchors + a] = value;
    }
  }

  TrajectoryResult result;
  result.track.video_id = "synthetic";
  std::set<int> contributors;
  for (std::size_t s = 0; s < n_steps; ++s) {
    // Track point: frame_score semantics over the synthetic responses.
    double best_score = 0.0;
    int best_id = -1;
    for (std::size_t a = 0; a < n_anchors; ++a) {
      if (!(iou(anchors.anchors()[a].box, traj.steps[s].box) > 0.5)) continue;
      const double value = scores[s * n_anchors + a];
      if (best_id < 0 || value > best_score) {
        best_score = value;
        best_id = static_cast<int>(a);
      }
    }
    if (best_id >= 0) {
      result.track.points.push_back(
          TrackPoint{static_cast<int>(s), best_score, best_id, false});
    } else {
      result.track.points.push_back(TrackPoint{static_cast<int>(s), 0.0, -1, true});
    }

    // Contributors: the top two responders, counted only when they respond.
    int first = -1, second = -1;
    for (std::size_t a = 0; a < n_anchors; ++a) {
      const double value = scores[s * n_anchors + a];
      if (value <= 0.0) continue;
      if (first < 0 || value > scores[s * n_anchors + static_cast<std::size_t>(first)]) {
        second = first;
        first = static_cast<int>(a);
      } else if (second < 0 ||
                 value > scores[s * n_anchors + static_cast<std::size_t>(second)]) {
        second = static_cast<int>(a);
      }
    }
    if (first >= 0) contributors.insert(first);
    if (second >= 0) contributors.insert(second);
  }

  for (int id : contributors) {
    ScoreProfile profile;
    profile.anchor_id = id;
    for (std::size_t s = 0; s < n_steps; ++s) {
      profile.scores[traj.steps[s].n] = scores[s * n_anchors + static_cast<std::size_t>(id)];
    }
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

}  // namespace anchorlens
