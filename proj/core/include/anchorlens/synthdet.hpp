#pragma once

#include <cstdint>
#include <vector>

#include "anchorlens/anchors.hpp"
#include "anchorlens/mmd.hpp"
#include "anchorlens/probe.hpp"

namespace anchorlens {

/// Response model of the synthetic detector: a clamped power of the
/// anchor-object IOU, zero at or below the onset tau and s_max at IOU 1.
/// The binary preset mimics a detector trained with IOU > 0.5 thresholding
/// (sharp response onset at 0.5); the soft preset mimics soft-threshold
/// training (onset lowered to 0.5 - alpha).
struct SynthParams {
  double tau = 0.5;
  double kappa = 1.0;
  double s_max = 0.95;
  double noise_sigma = 0.0;  // additive gaussian noise, 0 = deterministic
  std::uint64_t noise_seed = 0;

  SynthParams() = default;
  SynthParams(double tau, double kappa, double s_max);

  static SynthParams binary_preset() { return SynthParams{0.5, 1.0, 0.95}; }
  static SynthParams soft_preset() { return SynthParams{0.4, 1.0, 0.95}; }
};

/// s_max * clamp((iou - tau) / (1 - tau), 0, 1)^kappa
double synth_score(const Anchor& anchor, const BBox& obj, const SynthParams& p);

struct TrajectoryStep {
  int n = 0;
  BBox box{0, 0, 1, 1};
};

/// Simulated object motion: the base box pushed through a warp-family sweep
/// at the given indices. The step at n = 0, when present, is the base box.
struct Trajectory {
  BBox base{0, 0, 1, 1};
  WarpFamily family = WarpFamily::Scaling;
  std::vector<TrajectoryStep> steps;  // ascending n
};

Trajectory make_trajectory(const BBox& base, WarpFamily family, const std::vector<int>& indices,
                           const ImageExtent& extent);

struct TrajectoryResult {
  /// p_t per step under frame_score semantics (max score over anchors with
  /// IOU > 0.5); frame index = step position.
  ScoreTrack track;
  /// Raw score-vs-n curves for every anchor that ever places first or second
  /// with a positive score, ascending anchor id.
  std::vector<ScoreProfile> profiles;
};

TrajectoryResult run_trajectory(const AnchorSet& anchors, const Trajectory& traj,
                                const SynthParams& p);

}  // namespace anchorlens
