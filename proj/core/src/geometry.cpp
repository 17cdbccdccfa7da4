#include "anchorlens/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace anchorlens {

BBox::BBox(double x0, double y0, double x1, double y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw std::invalid_argument(
        "BBox requires x_min < x_max and y_min < y_max, got (" +
        std::to_string(x0) + "," + std::to_string(y0) + "," +
        std::to_string(x1) + "," + std::to_string(y1) + ")");
  }
}

BBox BBox::from_center(double cx, double cy, double w, double h) {
  return BBox(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

AxisWarp::AxisWarp(double sx_, double sy_, double tx_, double ty_, double cx_, double cy_)
    : sx(sx_), sy(sy_), tx(tx_), ty(ty_), cx(cx_), cy(cy_) {
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw std::invalid_argument("AxisWarp requires positive scale factors");
  }
}

ImageExtent::ImageExtent(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("ImageExtent requires width >= 1 and height >= 1");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

BBox apply_warp(const AxisWarp& w, const BBox& b) {
  // Unit scales bypass the pivot arithmetic so identity and pure shifts are
  // exact.
  const auto map_x = [&](double x) {
    return w.sx == 1.0 ? x + w.tx : w.cx + w.sx * (x - w.cx) + w.tx;
  };
  const auto map_y = [&](double y) {
    return w.sy == 1.0 ? y + w.ty : w.cy + w.sy * (y - w.cy) + w.ty;
  };
  return BBox(map_x(b.x_min), map_y(b.y_min), map_x(b.x_max), map_y(b.y_max));
}

std::optional<BBox> clip_box(const BBox& b, const ImageExtent& e) {
  const double x0 = std::max(b.x_min, 0.0);
  const double y0 = std::max(b.y_min, 0.0);
  const double x1 = std::min(b.x_max, static_cast<double>(e.width));
  const double y1 = std::min(b.y_max, static_cast<double>(e.height));
  if (x0 >= x1 || y0 >= y1) return std::nullopt;
  return BBox(x0, y0, x1, y1);
}

}  // namespace anchorlens
