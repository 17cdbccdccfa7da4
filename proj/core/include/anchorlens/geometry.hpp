#pragma once

#include <optional>

namespace anchorlens {

/// Axis-aligned box in continuous pixel coordinates. Construction rejects
/// boxes without strictly positive area.
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  BBox(double x0, double y0, double x1, double y1);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  static BBox from_center(double cx, double cy, double w, double h);

  bool operator==(const BBox&) const = default;
};

/// Axis-aligned warp: scale about a pivot (cx, cy), then translate.
/// p' = pivot + diag(sx, sy) * (p - pivot) + (tx, ty)
struct AxisWarp {
  double sx = 1.0;
  double sy = 1.0;
  double tx = 0.0;
  double ty = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  AxisWarp() = default;
  AxisWarp(double sx, double sy, double tx, double ty, double cx, double cy);

  bool is_identity() const { return sx == 1.0 && sy == 1.0 && tx == 0.0 && ty == 0.0; }

  bool operator==(const AxisWarp&) const = default;
};

struct ImageExtent {
  int width = 0;
  int height = 0;

  ImageExtent(int w, int h);

  bool operator==(const ImageExtent&) const = default;
};

/// Intersection area over union area; 0 for disjoint or edge-touching boxes.
double iou(const BBox& a, const BBox& b);

BBox apply_warp(const AxisWarp& w, const BBox& b);

/// Intersection of b with [0, width] x [0, height]; nullopt when the
/// intersection has zero area.
std::optional<BBox> clip_box(const BBox& b, const ImageExtent& e);

}  // namespace anchorlens
