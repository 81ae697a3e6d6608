#pragma once
// Exact planar points and elementary vector quantities.

#include <tuple>

#include "sdf/rational.hpp"

namespace sdf {

struct Pt {
  Q x, y;
  bool operator==(const Pt& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Pt& o) const { return !(*this == o); }
};

inline bool lex_less(const Pt& a, const Pt& b) {
  int cx = cmp(a.x, b.x);
  if (cx != 0) return cx < 0;
  return cmp(a.y, b.y) < 0;
}

inline Q dist2(const Pt& a, const Pt& b) {
  Q dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline Q norm2(const Pt& a) { return a.x * a.x + a.y * a.y; }

// Twice the signed area of triangle (a,b,c); > 0 iff counterclockwise.
inline Q cross3(const Pt& a, const Pt& b, const Pt& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace sdf
