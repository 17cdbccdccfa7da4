#include "anchorlens/synthdet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/fixtures.hpp"

namespace anchorlens {
namespace {

using testing::grid_boundary_config;
using testing::random_box;
using testing::scale_boundary_config;

// Two concentric square templates with the coarse one twice the fine area
// ratio: IOU of the geometric-midpoint box with either anchor is 0.5 exactly.
AnchorSet half_iou_fixture() {
  PyramidConfig config{ImageExtent(300, 300), {}};
  config.levels.push_back(PyramidLevel{3, 3, 100.0, 100.0, {TemplateSize{100, 100}}});
  config.levels.push_back(PyramidLevel{1, 1, 300.0, 300.0, {TemplateSize{200, 200}}});
  return AnchorSet::generate(config);
}

TEST(SynthScore, CoincidentObjectScoresSMax) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  EXPECT_DOUBLE_EQ(synth_score(set.by_id(4), set.by_id(4).box, SynthParams::binary_preset()),
                   0.95);
}

TEST(SynthScore, OnsetIouScoresZero) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  // Concentric box at IOU exactly 0.5 with the 100x100 anchor.
  const BBox obj = BBox::from_center(150, 150, 100.0 * std::sqrt(0.5), 100.0 * std::sqrt(0.5));
  EXPECT_NEAR(iou(set.by_id(4).box, obj), 0.5, 1e-12);
  EXPECT_NEAR(synth_score(set.by_id(4), obj, SynthParams::binary_preset()), 0.0, 1e-12);
}

TEST(SynthScore, BinaryPresetAtIouZeroPointSix) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const BBox obj = BBox::from_center(150, 150, 100.0 * std::sqrt(0.6), 100.0 * std::sqrt(0.6));
  EXPECT_NEAR(iou(set.by_id(4).box, obj), 0.6, 1e-12);
  EXPECT_NEAR(synth_score(set.by_id(4), obj, SynthParams::binary_preset()), 0.19, 1e-9);
}

TEST(SynthScore, MonotoneInIou) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const Anchor& anchor = set.by_id(4);
  const SynthParams p = SynthParams::binary_preset();
  double prev_score = -1.0;
  // Concentric boxes of growing size up to the anchor box: IOU increases.
  for (int i = 1; i <= 100; ++i) {
    const BBox obj = BBox::from_center(150, 150, i, i);
    const double s = synth_score(anchor, obj, p);
    EXPECT_GE(s, prev_score);
    prev_score = s;
  }
}

TEST(SynthScore, SoftPresetDominatesBinaryPointwise) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  std::mt19937 rng(73);
  for (int trial = 0; trial < 500; ++trial) {
    const BBox obj = random_box(rng);
    for (const Anchor& anchor : set.anchors()) {
      EXPECT_GE(synth_score(anchor, obj, SynthParams::soft_preset()),
                synth_score(anchor, obj, SynthParams::binary_preset()));
    }
  }
}

TEST(SynthScore, RejectsInvalidParams) {
  EXPECT_THROW(SynthParams(1.0, 1.0, 0.95), std::invalid_argument);
  EXPECT_THROW(SynthParams(0.5, 0.5, 0.95), std::invalid_argument);
  EXPECT_THROW(SynthParams(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST(Trajectory, StepAtZeroIsTheBaseBox) {
  const BBox base = BBox::from_center(150, 150, 80, 80);
  const Trajectory traj =
      make_trajectory(base, WarpFamily::Scaling, {-8, 0, 8}, ImageExtent(300, 300));
  ASSERT_EQ(traj.steps.size(), 3u);
  EXPECT_EQ(traj.steps[1].n, 0);
  EXPECT_EQ(traj.steps[1].box, base);
}

TEST(RunTrajectory, SingleStepOnAnchorGivesSMax) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const Trajectory traj =
      make_trajectory(set.by_id(4).box, WarpFamily::Scaling, {0}, ImageExtent(300, 300));
  const TrajectoryResult result = run_trajectory(set, traj, SynthParams::binary_preset());
  ASSERT_EQ(result.track.points.size(), 1u);
  EXPECT_DOUBLE_EQ(result.track.points[0].score, 0.95);
  EXPECT_EQ(result.track.points[0].anchor_id, 4);
}

TEST(RunTrajectory, ReproducesBaseScoreAtOrigin) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const BBox base = BBox::from_center(150, 150, 112, 112);
  const Trajectory traj =
      make_trajectory(base, WarpFamily::Scaling, {-5, 0, 5}, ImageExtent(300, 300));
  const SynthParams p = SynthParams::binary_preset();
  const TrajectoryResult result = run_trajectory(set, traj, p);
  for (const ScoreProfile& profile : result.profiles) {
    EXPECT_DOUBLE_EQ(profile.scores.at(0),
                     synth_score(set.by_id(profile.anchor_id), base, p));
  }
}

TEST(RunTrajectory, ScaleCrossingHasStrictLocalMinimumAtBoundary) {
  // Neighboring anchors whose IOUs with the mid-size box are both exactly
  // 0.5: the binary-preset track bottoms out at the crossing step.
  const AnchorSet set = half_iou_fixture();
  const double w_mid = std::sqrt(100.0 * 200.0);
  const BBox base = BBox::from_center(150, 150, w_mid, w_mid);
  EXPECT_NEAR(iou(set.by_id(4).box, base), 0.5, 1e-12);
  EXPECT_NEAR(iou(set.by_id(9).box, base), 0.5, 1e-12);

  const Trajectory traj =
      make_trajectory(base, WarpFamily::Scaling, {-12, 0, 12}, ImageExtent(300, 300));
  const TrajectoryResult binary = run_trajectory(set, traj, SynthParams::binary_preset());
  ASSERT_EQ(binary.track.points.size(), 3u);
  EXPECT_LT(binary.track.points[1].score, binary.track.points[0].score);
  EXPECT_LT(binary.track.points[1].score, binary.track.points[2].score);
  EXPECT_LT(binary.track.points[1].score, 1e-9);  // IOU ~0.5 leaves (almost) no response

  // Soft preset: the envelope minimum sits strictly higher.
  const TrajectoryResult soft = run_trajectory(set, traj, SynthParams::soft_preset());
  double binary_min = 1.0, soft_min = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double b_env = 0.0, s_env = 0.0;
    for (const ScoreProfile& p : binary.profiles) b_env = std::max(b_env, p.scores.at(traj.steps[i].n));
    for (const ScoreProfile& p : soft.profiles) s_env = std::max(s_env, p.scores.at(traj.steps[i].n));
    binary_min = std::min(binary_min, b_env);
    soft_min = std::min(soft_min, s_env);
  }
  EXPECT_GT(soft_min, binary_min);
}

TEST(RunTrajectory, ContributorsAreTheTwoBoundaryAnchors) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const double w0 = std::sqrt(100.0 * 125.0);
  const BBox base = BBox::from_center(150, 150, w0, w0);
  std::vector<int> indices;
  for (int n = -29; n <= 29; ++n) indices.push_back(n);
  const Trajectory traj = make_trajectory(base, WarpFamily::Scaling, indices, ImageExtent(300, 300));
  const TrajectoryResult result = run_trajectory(set, traj, SynthParams::binary_preset());
  ASSERT_EQ(result.profiles.size(), 2u);
  EXPECT_EQ(result.profiles[0].anchor_id, 4);
  EXPECT_EQ(result.profiles[1].anchor_id, 9);
  EXPECT_EQ(result.profiles[0].scores.size(), 59u);
}

TEST(RunTrajectory, CanonicalBoundaryFixtureMmdContrast) {
  // The defining end-to-end property: the binary-trained detector flags an
  // MMD on the boundary crossing, the soft-trained one does not.
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const double w0 = std::sqrt(100.0 * 125.0);
  const BBox base = BBox::from_center(150, 150, w0, w0);
  const Trajectory traj =
      make_trajectory(base, WarpFamily::Scaling, {-8, 0, 8}, ImageExtent(300, 300));

  const TrajectoryResult binary = run_trajectory(set, traj, SynthParams::binary_preset());
  const TrajectoryResult soft = run_trajectory(set, traj, SynthParams::soft_preset());
  EXPECT_GE(extract_mmd(binary.track, MmdThresholds{}).size(), 1u);
  EXPECT_EQ(extract_mmd(soft.track, MmdThresholds{}).size(), 0u);
}

TEST(RunTrajectory, NoiseIsSeededAndDeterministic) {
  const AnchorSet set = AnchorSet::generate(scale_boundary_config());
  const Trajectory traj =
      make_trajectory(set.by_id(4).box, WarpFamily::Scaling, {-3, 0, 3}, ImageExtent(300, 300));
  SynthParams noisy = SynthParams::binary_preset();
  noisy.noise_sigma = 0.05;
  noisy.noise_seed = 99;
  const TrajectoryResult a = run_trajectory(set, traj, noisy);
  const TrajectoryResult b = run_trajectory(set, traj, noisy);
  ASSERT_EQ(a.track.points.size(), b.track.points.size());
  for (std::size_t i = 0; i < a.track.points.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.track.points[i].score, b.track.points[i].score);
    EXPECT_GE(a.track.points[i].score, 0.0);
    EXPECT_LE(a.track.points[i].score, 1.0);
  }
  noisy.noise_seed = 100;
  const TrajectoryResult c = run_trajectory(set, traj, noisy);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.track.points.size(); ++i) {
    any_difference |= a.track.points[i].score != c.track.points[i].score;
  }
  EXPECT_TRUE(any_difference);
}

}  // namespace
}  // namespace anchorlens
