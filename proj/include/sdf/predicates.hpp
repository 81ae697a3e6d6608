#pragma once
// Exact geometric predicates and scale-parametric root solving.
//
// Everything is parameterized by the squared scale s = α². A point carries a
// weight class: unfrozen (squared weight 0 at every s) or frozen with
// freezing value λ² (squared weight max(0, s − λ²)). Squared power distance
// uses the ADDED convention: π_p(x)² = ‖x−p‖² + w_p².
//
// Within one wave at most two classes appear (unfrozen, and frozen at one
// common λ²), so the lifted in-circle determinant is degree ≤ 1 in s and
// event scales are exact rationals.

#include <array>
#include <optional>
#include <stdexcept>

#include "sdf/point.hpp"

namespace sdf {

struct WeightClass {
  bool frozen = false;
  Q lambda2 = Q(0);
  static WeightClass unfrozen() { return WeightClass{false, Q(0)}; }
  static WeightClass frozen_at(Q l2) { return WeightClass{true, std::move(l2)}; }
};

// Squared weight at squared scale s.
inline Q wsq_at(const WeightClass& w, const Q& s) {
  if (!w.frozen) return Q(0);
  Q d = s - w.lambda2;
  return sgn(d) > 0 ? d : Q(0);
}

// Squared power distance from x to site (p, w) at scale s.
inline Q power_sq(const Pt& x, const Pt& p, const WeightClass& w, const Q& s) {
  return dist2(x, p) + wsq_at(w, s);
}

inline int orient2(const Pt& a, const Pt& b, const Pt& c) {
  return sgn(cross3(a, b, c));
}

namespace detail {

// det of rows (p_i − q, lift_i − lift_q), i = a,b,c.
inline Q lifted_det(const Pt& a, const Q& la, const Pt& b, const Q& lb,
                    const Pt& c, const Q& lc, const Pt& q, const Q& lq) {
  Q ax = a.x - q.x, ay = a.y - q.y, az = la - lq;
  Q bx = b.x - q.x, by = b.y - q.y, bz = lb - lq;
  Q cx = c.x - q.x, cy = c.y - q.y, cz = lc - lq;
  return ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) +
         az * (bx * cy - by * cx);
}

}  // namespace detail

// Sign of the lifted 4×4 determinant at scale s with lift ‖p‖² + w_p(s)².
// Pre: (a,b,c) positively oriented. +1 means q power-violates the orthoball
// of (a,b,c) at scale s (a flip is needed).
inline int power_incircle(const Pt& a, const WeightClass& wa, const Pt& b,
                          const WeightClass& wb, const Pt& c,
                          const WeightClass& wc, const Pt& q,
                          const WeightClass& wq, const Q& s) {
  if (orient2(a, b, c) == 0) throw std::runtime_error("degenerate triangle");
  Q la = norm2(a) + wsq_at(wa, s);
  Q lb = norm2(b) + wsq_at(wb, s);
  Q lc = norm2(c) + wsq_at(wc, s);
  Q lq = norm2(q) + wsq_at(wq, s);
  return sgn(detail::lifted_det(a, la, b, lb, c, lc, q, lq));
}

// Decompose the lifted determinant as det(s) = A + B·s on the linear branch
// (all frozen participants taken at w² = s − λ², no clamping). Shared by
// flip_scale and the event-seeding logic, which needs A and B directly.
struct DetLine {
  Q A, B;
  Q at(const Q& s) const { return A + B * s; }
};

inline DetLine lifted_det_line(const Pt& a, const WeightClass& wa, const Pt& b,
                               const WeightClass& wb, const Pt& c,
                               const WeightClass& wc, const Pt& q,
                               const WeightClass& wq) {
  auto u = [](const Pt& p, const WeightClass& w) {
    return w.frozen ? norm2(p) - w.lambda2 : norm2(p);
  };
  auto f = [](const WeightClass& w) { return w.frozen ? Q(1) : Q(0); };
  Q A = detail::lifted_det(a, u(a, wa), b, u(b, wb), c, u(c, wc), q, u(q, wq));
  Q B = detail::lifted_det(a, f(wa), b, f(wb), c, f(wc), q, f(wq));
  return DetLine{A, B};
}

namespace detail {

// Common λ² among frozen participants; throws if more than one value occurs.
inline std::optional<Q> common_lambda2(
    std::initializer_list<const WeightClass*> ws) {
  std::optional<Q> l2;
  for (const WeightClass* w : ws) {
    if (!w->frozen) continue;
    if (!l2) {
      l2 = w->lambda2;
    } else if (*l2 != w->lambda2) {
      throw std::runtime_error("not two-class");
    }
  }
  return l2;
}

}  // namespace detail

// The unique s at which the lifted determinant vanishes, if any. Returns
// nothing when the determinant is constant in s, or when the root would need
// a negative squared weight (s < λ² of the frozen participants).
inline std::optional<Q> flip_scale(const Pt& a, const WeightClass& wa,
                                   const Pt& b, const WeightClass& wb,
                                   const Pt& c, const WeightClass& wc,
                                   const Pt& q, const WeightClass& wq) {
  auto l2 = detail::common_lambda2({&wa, &wb, &wc, &wq});
  DetLine line = lifted_det_line(a, wa, b, wb, c, wc, q, wq);
  if (sgn(line.B) == 0) return std::nullopt;
  Q root = -line.A / line.B;
  root.canonicalize();
  if (l2 && root < *l2) return std::nullopt;  // would need w² < 0
  return root;
}

struct Orthoball {
  Pt center;
  Q r2;  // squared power radius: max over the simplex of π_p(center)²
};

// The point minimizing the maximum squared power distance to 1–3 sites at
// scale s, with that value. Throws "degenerate simplex" on affine dependence.
inline Orthoball orthoball(const std::array<Pt, 3>& pts,
                           const std::array<WeightClass, 3>& ws, int k,
                           const Q& s) {
  if (k == 1) {
    return Orthoball{pts[0], wsq_at(ws[0], s)};
  }
  if (k == 2) {
    const Pt &a = pts[0], &b = pts[1];
    Q L2 = dist2(a, b);
    if (sgn(L2) == 0) throw std::runtime_error("degenerate simplex");
    Q wa2 = wsq_at(ws[0], s), wb2 = wsq_at(ws[1], s);
    Q t = (L2 + wb2 - wa2) / (2 * L2);
    t.canonicalize();
    Pt center{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    Q r2 = dist2(center, a) + wa2;
    r2.canonicalize();
    return Orthoball{center, r2};
  }
  if (k != 3) throw std::runtime_error("degenerate simplex");
  const Pt &a = pts[0], &b = pts[1], &c = pts[2];
  if (orient2(a, b, c) == 0) throw std::runtime_error("degenerate simplex");
  Q wa2 = wsq_at(ws[0], s), wb2 = wsq_at(ws[1], s), wc2 = wsq_at(ws[2], s);
  // π_a² = π_b² ⟺ 2(b−a)·x = ‖b‖²−‖a‖² + wb²−wa², and likewise for c.
  Q m00 = 2 * (b.x - a.x), m01 = 2 * (b.y - a.y);
  Q m10 = 2 * (c.x - a.x), m11 = 2 * (c.y - a.y);
  Q r0 = norm2(b) - norm2(a) + wb2 - wa2;
  Q r1 = norm2(c) - norm2(a) + wc2 - wa2;
  Q det = m00 * m11 - m01 * m10;
  Pt center{(r0 * m11 - m01 * r1) / det, (m00 * r1 - r0 * m10) / det};
  center.x.canonicalize();
  center.y.canonicalize();
  Q r2 = dist2(center, a) + wa2;
  r2.canonicalize();
  return Orthoball{center, r2};
}

inline Orthoball orthoball_edge(const Pt& a, const WeightClass& wa,
                                const Pt& b, const WeightClass& wb,
                                const Q& s) {
  return orthoball({a, b, Pt{}}, {wa, wb, WeightClass{}}, 2, s);
}

inline Orthoball orthoball_tri(const Pt& a, const WeightClass& wa, const Pt& b,
                               const WeightClass& wb, const Pt& c,
                               const WeightClass& wc, const Q& s) {
  return orthoball({a, b, c}, {wa, wb, wc}, 3, s);
}

}  // namespace sdf
