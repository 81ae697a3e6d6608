#pragma once
// Between-wave mesh refinement.
//
// After a wave completes, every weight is back to zero and the structure is
// a plain Delaunay triangulation. A vertex whose cell is much larger than
// its nearest-neighbor distance would let later (smaller) waves interact
// with far-away geometry, so refinement inserts Steiner points at the
// farthest cell corners of such vertices until every bounded cell has
// aspect² = far-corner²/nearest-neighbor² ≤ 4/ε². Hull vertices (a ghost
// triangle in the star) own unbounded cells, report an unbounded aspect and
// are exempt: the bounding box is sized so that all input cells stay
// bounded. Inserted corners are snapped to a power-of-two grid fine enough
// (step ≤ corner-distance/2¹⁰) not to disturb the aspect bound, which keeps
// coordinate bit-lengths under control across refinement rounds.

#include <cmath>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdf/kinetic.hpp"
#include "sdf/predicates.hpp"

namespace sdf {

struct AspectReport {
  int vid = -1;
  bool bounded = false;
  Q nn2;      // squared distance to the nearest other vertex
  Q far2;     // squared distance to the farthest cell corner (bounded only)
  Q aspect2;  // far2 / nn2 (bounded only)
};

namespace detail {

// Exact power of two as a rational.
inline Q pow2_q(long k) {
  Z one = 1;
  if (k >= 0) return Q(one << static_cast<unsigned long>(k));
  Q q(one, one << static_cast<unsigned long>(-k));
  q.canonicalize();
  return q;
}

// log2 of a positive rational within ±1, from numerator/denominator bit
// lengths (exact integer arithmetic; no double overflow on huge values).
inline long log2_bits(const Q& x) {
  if (sgn(x) <= 0) throw std::logic_error("log2 of non-positive value");
  long bn = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2));
  long bd = static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 2));
  return bn - bd;
}

// Nearest multiple of step (a power of two), ties toward +inf.
inline Q snap_coord(const Q& x, const Q& step) {
  Q t = x / step + Q(1, 2);
  t.canonicalize();
  Z n;
  mpz_fdiv_q(n.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Q r = Q(n) * step;
  r.canonicalize();
  return r;
}

// Farthest in-box plain circumcenter among the real triangles around vid,
// with its squared distance; nullopt when every corner lies outside the box.
// Corners beyond the box boundary belong to the buffer ring between the
// input region and the box corners — no interior insertion could remove
// them, and nothing the engine does ever looks out there, so they are
// invisible to the refinement criterion exactly like unbounded cells.
// Ties pick the lexicographically smaller (x, y) center so the choice does
// not depend on star rotation order.
inline std::optional<std::pair<Q, Pt>> far_corner(const KineticCore& core,
                                                  int vid) {
  const Triangulation& tr = core.structure();
  const Pt& lo = core.box_min();
  const Pt& hi = core.box_max();
  WeightClass u = WeightClass::unfrozen();
  std::optional<Q> best;
  Pt best_c{Q(0), Q(0)};
  bool any = false;
  for (int t : tr.star(vid)) {
    if (tr.is_ghost(t))
      throw std::logic_error("unbounded cell has no far corner");
    any = true;
    const auto& T = tr.tri(t);
    Pt c = orthoball_tri(tr.point(T.v[0]), u, tr.point(T.v[1]), u,
                         tr.point(T.v[2]), u, Q(0))
               .center;
    if (c.x < lo.x || c.x > hi.x || c.y < lo.y || c.y > hi.y) continue;
    Q d2 = dist2(tr.point(vid), c);
    if (!best || d2 > *best ||
        (d2 == *best && (c.x < best_c.x || (c.x == best_c.x && c.y < best_c.y)))) {
      best = d2;
      best_c = c;
    }
  }
  if (!any) throw std::logic_error("isolated vertex");
  if (!best) return std::nullopt;
  return std::make_pair(*best, best_c);
}

}  // namespace detail

inline AspectReport aspect(const KineticCore& core, int vid) {
  const Triangulation& tr = core.structure();
  AspectReport r;
  r.vid = vid;
  r.nn2 = core.link_nn2(vid);
  for (int t : tr.star(vid))
    if (tr.is_ghost(t)) return r;  // unbounded cell
  auto fc = detail::far_corner(core, vid);
  if (!fc) return r;  // all corners in the buffer ring: exempt as unbounded
  r.bounded = true;
  r.far2 = fc->first;
  r.aspect2 = r.far2 / r.nn2;
  r.aspect2.canonicalize();
  return r;
}

// Runs the refinement loop at the core's current sweep position and returns
// the number of Steiner vertices inserted. Worst cell first (largest
// aspect², ties by smaller vertex id) with lazy revalidation on pop. The
// iteration guard is C·n·log(spread) with C = 64: quadtree-style packing
// bounds the number of Steiner points a refinement round can legitimately
// produce by a constant per vertex and octave of the coordinate spread, so
// hitting the guard means runaway insertion, not a big instance.
inline long refine(KineticCore& core, const Q& eps) {
  if (core.wave_active()) throw std::logic_error("refinement during a wave");
  const Triangulation& tr = core.structure();
  Q eps2 = eps * eps;
  Q g2 = (1 + eps) * (1 + eps);

  // Aspect threshold τ = 2(1+ε)²/ε. The separation argument needs every
  // inserted corner farther than 2α from all vertices (α² the current sweep
  // position): vertices inserted by the wave that just ended are only
  // guaranteed pairwise εα/(1+ε)² apart — their freezing value is their
  // insertion radius scaled by (1+ε)/ε and then rounded up one octave — so
  // the corner distance τ·nn clears 2α exactly when τ carries the extra
  // (1+ε)² factor. Refining at the bare 2/ε of the well-spacing target
  // would place corners up to (1+ε)² too close and let their cells clip
  // input cell intersections at still-unswept scales.
  auto over_threshold = [&](const AspectReport& r) {
    if (!r.bounded) return false;
    Q lhs = r.far2 * eps2;
    Q rhs = 4 * g2 * g2 * r.nn2;
    return lhs > rhs;  // aspect² > 4(1+ε)⁴/ε²
  };

  struct Item {
    Q aspect2;
    int vid;
  };
  struct ItemOrder {
    bool operator()(const Item& a, const Item& b) const {
      int c = cmp(a.aspect2, b.aspect2);
      if (c != 0) return c < 0;  // larger aspect pops first
      return a.vid > b.vid;      // then smaller vid
    }
  };
  std::priority_queue<Item, std::vector<Item>, ItemOrder> heap;

  // Coordinates of every known vertex — inserted or not — so a Steiner point
  // can never collide with an input that only arrives in a later wave.
  std::set<std::pair<Q, Q>> coords;
  Q xmin, xmax, ymin, ymax;
  std::optional<Q> min_nn2;
  for (int v = 0; v < tr.num_verts(); ++v) {
    const Pt& p = tr.point(v);
    coords.insert({p.x, p.y});
    if (v == 0) {
      xmin = xmax = p.x;
      ymin = ymax = p.y;
    } else {
      if (p.x < xmin) xmin = p.x;
      if (p.x > xmax) xmax = p.x;
      if (p.y < ymin) ymin = p.y;
      if (p.y > ymax) ymax = p.y;
    }
    if (!core.inserted(v)) continue;  // not part of the current structure
    Q nn2 = core.link_nn2(v);
    if (!min_nn2 || nn2 < *min_nn2) min_nn2 = nn2;
    AspectReport r = aspect(core, v);
    if (over_threshold(r)) heap.push(Item{r.aspect2, v});
  }

  Q diag2 = dist2(Pt{xmin, ymin}, Pt{xmax, ymax});
  long spread_bits = (sgn(diag2) > 0 && min_nn2)
                         ? detail::log2_bits(diag2) - detail::log2_bits(*min_nn2)
                         : 2;
  long octaves = std::max(1L, spread_bits / 2);
  long budget = 64 * static_cast<long>(tr.num_verts() + 8) * (octaves + 8);

  long added = 0;
  while (!heap.empty()) {
    Item it = heap.top();
    heap.pop();
    AspectReport r = aspect(core, it.vid);
    if (!over_threshold(r)) continue;
    if (r.aspect2 != it.aspect2) {
      heap.push(Item{r.aspect2, it.vid});  // stale priority: re-rank
      continue;
    }

    auto fco = detail::far_corner(core, it.vid);
    if (!fco) continue;  // raced into the buffer ring: exempt now
    const auto& fc = *fco;
    // Placement margin: snapping moves the point at most corner-distance/2⁹,
    // so a corner clearing 4s/(1−2⁻⁹)² in squared distance still clears the
    // 2√s separation bound after the snap. The aspect threshold guarantees
    // this; a shortfall here means the guarantee broke, so leave the cell
    // alone rather than insert a separation-violating point.
    if (fc.first * (511 * 511) <= core.current_s() * (4 * 512 * 512)) {
      ++core.stats().refinement_skips;
      continue;
    }
    const Pt& lo = core.box_min();
    const Pt& hi = core.box_max();
    const Pt& target = fc.second;
    // step = 2^k ≤ corner-distance/2^10, sized by exact bit counts.
    long k = (detail::log2_bits(fc.first) - 1) / 2 - 11;
    Pt snapped;
    bool placed = false;
    for (int attempt = 0; attempt < 80 && !placed; ++attempt, --k) {
      Q step = detail::pow2_q(k);
      Q sx = detail::snap_coord(target.x, step);
      Q sy = detail::snap_coord(target.y, step);
      // The target may coincide with an existing vertex; a one-step offset
      // stays within 2·step of it, so the placement bound is unaffected. At
      // most one existing vertex is that close once the step drops under
      // half the local point separation.
      for (const auto& cand :
           {Pt{sx, sy}, Pt{sx + step, sy}, Pt{sx, sy + step},
            Pt{sx + step, sy + step}, Pt{sx - step, sy}, Pt{sx, sy - step},
            Pt{sx - step, sy - step}}) {
        if (cand.x < lo.x || cand.x > hi.x || cand.y < lo.y ||
            cand.y > hi.y)
          continue;
        if (!coords.count({cand.x, cand.y})) {
          snapped = cand;
          placed = true;
          break;
        }
      }
    }
    if (!placed) throw std::runtime_error("refinement snapping failed");

    if (std::getenv("SDF_TRACE"))
      std::fprintf(stderr, "refine vid=%d far2=%g nn2=%g -> (%g, %g)\n",
                   it.vid, r.far2.get_d(), r.nn2.get_d(), snapped.x.get_d(),
                   snapped.y.get_d());
    if (--budget < 0) throw std::runtime_error("refinement budget exceeded");
    int z = core.add_steiner(snapped);
    core.insert_steiner(z);
    coords.insert({snapped.x, snapped.y});
    ++added;

    // Cells changed exactly for the new vertex and its link.
    std::set<int> affected;
    affected.insert(z);
    for (int t : tr.star(z)) {
      const auto& T = tr.tri(t);
      for (int v : T.v)
        if (v != Triangulation::GHOST) affected.insert(v);
    }
    for (int v : affected) {
      AspectReport rr = aspect(core, v);
      if (over_threshold(rr)) heap.push(Item{rr.aspect2, v});
    }
  }
  return added;
}

}  // namespace sdf
