#pragma once

#include <compare>
#include <string>

namespace demoflow {

// Integer pixel coordinates, origin top-left, y grows downward.
struct Point {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point&) const = default;
};

struct Size {
  int width = 0;
  int height = 0;
  auto operator<=>(const Size&) const = default;
  bool contains(Point p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height;
  }
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  auto operator<=>(const Rect&) const = default;
  bool contains(Point p) const {
    return p.x >= x && p.y >= y && p.x < x + w && p.y < y + h;
  }
  Point center() const { return {x + w / 2, y + h / 2}; }
  bool within(Size s) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= s.width && y + h <= s.height;
  }
};

inline std::string to_string(Point p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

}  // namespace demoflow
