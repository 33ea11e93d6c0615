#pragma once

#include "demoflow/errors.hpp"
#include "demoflow/image.hpp"

namespace demoflow {

constexpr int kMarkerRadius = 8;
constexpr int kMarkerArm = 14;  // crosshair half-length
constexpr Pixel kMarkerColor{255, 32, 32, 255};

// Returns a copy of the observation with a high-contrast marker (filled
// circle plus crosshair) centered at `point`. Deterministic; clips at the
// image border; the input observation is untouched.
inline Observation annotate_click(const Observation& obs, Point point) {
  if (!obs.image) throw Error(errc::contract, "observation has no image");
  if (!obs.image->in_bounds(point))
    throw Error(errc::domain, "annotation point outside image bounds");

  Image img = *obs.image;
  int r2 = kMarkerRadius * kMarkerRadius;
  for (int dy = -kMarkerRadius; dy <= kMarkerRadius; ++dy) {
    for (int dx = -kMarkerRadius; dx <= kMarkerRadius; ++dx) {
      if (dx * dx + dy * dy > r2) continue;
      Point p{point.x + dx, point.y + dy};
      if (img.in_bounds(p)) img.set(p.x, p.y, kMarkerColor);
    }
  }
  for (int d = -kMarkerArm; d <= kMarkerArm; ++d) {
    Point h{point.x + d, point.y};
    Point v{point.x, point.y + d};
    if (img.in_bounds(h)) img.set(h.x, h.y, kMarkerColor);
    if (img.in_bounds(v)) img.set(v.x, v.y, kMarkerColor);
  }
  return Observation::from_image(std::move(img), obs.timestamp_ms);
}

}  // namespace demoflow
