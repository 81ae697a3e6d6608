#pragma once
// Independent brute-force ground-truth implementations:
//   * exact_alpha_filtration — alpha filtration of the full (unweighted)
//     Delaunay triangulation, O(n^4) empty-circumdisk test, exact arithmetic.
//   * nerve_slice_check — decides, for one scale s, which simplices (dim <= 2)
//     have a nonempty common intersection of clipped power cells, via exact
//     candidate-point enumeration (orthocenter / bisector feet / corners).
//   * naive_persistence — unoptimized left-to-right boundary reduction.
// These deliberately share no code with the kinetic engine's membership
// predicates so they can serve as cross-checks.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sdf/filtration.hpp"
#include "sdf/persistence.hpp"
#include "sdf/point.hpp"
#include "sdf/predicates.hpp"
#include "sdf/weights.hpp"

namespace sdf {

// ---------------------------------------------------------------------------
// exact_alpha_filtration

namespace detail {

struct Circle {
  Pt c;
  Q r2;
};

// Circumcircle of a non-degenerate triangle, exact.
inline Circle circumcircle(const Pt& a, const Pt& b, const Pt& c) {
  // 2 (b-a).x  2 (b-a).y  | |b|^2-|a|^2
  // 2 (c-a).x  2 (c-a).y  | |c|^2-|a|^2
  Q a11 = 2 * (b.x - a.x), a12 = 2 * (b.y - a.y);
  Q a21 = 2 * (c.x - a.x), a22 = 2 * (c.y - a.y);
  Q r1 = norm2(b) - norm2(a);
  Q r2 = norm2(c) - norm2(a);
  Q det = a11 * a22 - a12 * a21;
  if (sgn(det) == 0) throw std::runtime_error("degenerate triangle");
  Pt ctr{(r1 * a22 - r2 * a12) / det, (a11 * r2 - a21 * r1) / det};
  return Circle{ctr, dist2(ctr, a)};
}

}  // namespace detail

inline FiltrationStore exact_alpha_filtration(const std::vector<Pt>& pts) {
  int n = static_cast<int>(pts.size());
  if (n > 256)
    throw std::runtime_error("exact_alpha_filtration limited to 256 points");
  if (n == 0) throw std::runtime_error("empty point set");

  FiltrationStore st;
  st.n = n;
  st.eps = Q(0);
  for (int i = 0; i < n; ++i) st.entries.push_back({{i}, Q(0)});

  // Triangles: every empty-open-circumdisk triple; cocircular clusters are
  // triangulated canonically as a fan around their smallest-id point.
  std::map<std::tuple<Q, Q, Q>, char> seen_circle;
  std::vector<std::array<int, 3>> tris;
  std::vector<Q> tri_birth;
  bool any_triangle = false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (orient2(pts[i], pts[j], pts[k]) == 0) continue;
        any_triangle = true;
        auto cc = detail::circumcircle(pts[i], pts[j], pts[k]);
        bool empty_disk = true;
        std::vector<int> cluster;
        for (int t = 0; t < n && empty_disk; ++t) {
          Q d2 = dist2(pts[t], cc.c);
          if (d2 < cc.r2) empty_disk = false;
          else if (d2 == cc.r2) cluster.push_back(t);
        }
        if (!empty_disk) continue;
        auto key = std::make_tuple(cc.c.x, cc.c.y, cc.r2);
        if (seen_circle.count(key)) continue;
        seen_circle[key] = 1;
        if (cluster.size() == 3) {
          tris.push_back({i, j, k});
          tri_birth.push_back(cc.r2);
        } else {
          // Fan around the minimum-id cluster point: remaining cluster
          // points in CCW angular order starting from v0's direction.
          int v0 = *std::min_element(cluster.begin(), cluster.end());
          std::vector<int> cyc;
          cyc.push_back(v0);
          for (int t : cluster)
            if (t != v0) cyc.push_back(t);
          Q bx = pts[v0].x - cc.c.x, by = pts[v0].y - cc.c.y;
          auto quad_from_base = [&](int t) -> int {
            Q dx = pts[t].x - cc.c.x, dy = pts[t].y - cc.c.y;
            Q cr = bx * dy - by * dx;  // sin of the angle from v0's direction
            Q dt = bx * dx + by * dy;  // cos of the angle from v0's direction
            if (sgn(cr) > 0) return (sgn(dt) > 0) ? 0 : 1;
            if (sgn(cr) < 0) return (sgn(dt) < 0) ? 2 : 3;
            return (sgn(dt) > 0) ? 0 : 2;  // collinear: base ray or opposite
          };
          std::sort(cyc.begin() + 1, cyc.end(), [&](int u, int v) {
            int qu = quad_from_base(u), qv = quad_from_base(v);
            if (qu != qv) return qu < qv;
            Q ux = pts[u].x - cc.c.x, uy = pts[u].y - cc.c.y;
            Q vx = pts[v].x - cc.c.x, vy = pts[v].y - cc.c.y;
            return sgn(ux * vy - uy * vx) > 0;
          });
          for (size_t t = 1; t + 1 < cyc.size(); ++t) {
            std::array<int, 3> tv{cyc[0], cyc[t], cyc[t + 1]};
            std::sort(tv.begin(), tv.end());
            tris.push_back(tv);
            tri_birth.push_back(cc.r2);
          }
        }
      }

  // Edges.
  std::map<std::pair<int, int>, Q> edge_birth;
  auto gabriel = [&](int a, int b) -> std::optional<Q> {
    Pt m{(pts[a].x + pts[b].x) / 2, (pts[a].y + pts[b].y) / 2};
    Q r2 = dist2(pts[a], pts[b]) / 4;
    for (int t = 0; t < n; ++t) {
      if (t == a || t == b) continue;
      if (dist2(pts[t], m) < r2) return std::nullopt;
    }
    return r2;
  };
  if (any_triangle) {
    for (size_t ti = 0; ti < tris.size(); ++ti) {
      const auto& tv = tris[ti];
      int pairs[3][2] = {{tv[0], tv[1]}, {tv[0], tv[2]}, {tv[1], tv[2]}};
      for (auto& pr : pairs) {
        std::pair<int, int> key{pr[0], pr[1]};
        auto it = edge_birth.find(key);
        if (it == edge_birth.end()) edge_birth[key] = tri_birth[ti];
        else it->second = std::min(it->second, tri_birth[ti]);
      }
    }
    for (auto& [key, birth] : edge_birth) {
      auto g = gabriel(key.first, key.second);
      if (g) birth = *g;
      // else: already min of incident triangle values
    }
  } else if (n >= 2) {
    // All points collinear: consecutive pairs along the line.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return lex_less(pts[a], pts[b]); });
    for (int i = 0; i + 1 < n; ++i) {
      int a = order[i], b = order[i + 1];
      if (a > b) std::swap(a, b);
      edge_birth[{a, b}] = dist2(pts[a], pts[b]) / 4;
    }
  }

  for (const auto& [key, birth] : edge_birth)
    st.entries.push_back({{key.first, key.second}, birth});
  for (size_t ti = 0; ti < tris.size(); ++ti)
    st.entries.push_back(
        {{tris[ti][0], tris[ti][1], tris[ti][2]}, tri_birth[ti]});

  st.finalize();
  return st;
}

// ---------------------------------------------------------------------------
// nerve_slice_check

struct SliceComplex {
  std::set<std::vector<int>> simplices;
  bool contains(std::vector<int> v) const {
    std::sort(v.begin(), v.end());
    return simplices.count(v) > 0;
  }
};

namespace detail {

struct HLine {
  // A.x * x + A.y * y = c
  Q ax, ay, c;
};

// Power bisector of (a, wa) and (j, wj): points x with pi_a(x)^2 == pi_j(x)^2.
inline HLine power_bisector(const Pt& pa, const Q& wa2, const Pt& pj,
                            const Q& wj2) {
  return HLine{2 * (pj.x - pa.x), 2 * (pj.y - pa.y),
               norm2(pj) - norm2(pa) + wj2 - wa2};
}

inline std::optional<Pt> line_intersect(const HLine& l1, const HLine& l2) {
  Q det = l1.ax * l2.ay - l1.ay * l2.ax;
  if (sgn(det) == 0) return std::nullopt;
  return Pt{(l1.c * l2.ay - l2.c * l1.ay) / det,
            (l1.ax * l2.c - l2.ax * l1.c) / det};
}

inline bool same_line(const HLine& l1, const HLine& l2) {
  // Parallel and one shared point <=> proportional (ax, ay, c).
  if (sgn(l1.ax * l2.ay - l1.ay * l2.ax) != 0) return false;
  if (sgn(l1.ax * l2.c - l2.ax * l1.c) != 0) return false;
  if (sgn(l1.ay * l2.c - l2.ay * l1.c) != 0) return false;
  return true;
}

inline Pt foot_on_line(const Pt& p, const HLine& l) {
  Q n2 = l.ax * l.ax + l.ay * l.ay;
  Q t = (l.c - (l.ax * p.x + l.ay * p.y)) / n2;
  return Pt{p.x + t * l.ax, p.y + t * l.ay};
}

}  // namespace detail

// Decides simplices up to dim 2 of the clipped-power-cell nerve at scale s,
// for one general per-point weight assignment w_i(s)^2 = max(0, s - lambda_i^2).
inline SliceComplex nerve_slice_check(const std::vector<Pt>& pts,
                                      const std::vector<WeightClass>& cls,
                                      const Q& s) {
  int n = static_cast<int>(pts.size());
  if (n > 32)
    throw std::runtime_error("nerve_slice_check limited to 32 points");
  if (static_cast<int>(cls.size()) != n)
    throw std::runtime_error("weight class count mismatch");
  if (sgn(s) < 0) throw std::runtime_error("negative scale");

  std::vector<Q> w2(n);
  for (int i = 0; i < n; ++i) w2[i] = wsq_at(cls[i], s);
  auto pw2 = [&](const Pt& x, int i) -> Q { return dist2(x, pts[i]) + w2[i]; };

  // Members j of S must have equal power at a witness; outsiders at least it.
  // Witness exists iff min over the equal-power locus (intersected with the
  // outsider half-planes) of the power is <= s. The minimum is attained at a
  // candidate point: an unconstrained stationary point, a bisector foot, or a
  // corner; all are rational. Points farther than 4s (squared) from the
  // anchor can neither bind nor cut the relevant region.
  auto near_outsiders = [&](const std::vector<int>& S) -> std::vector<int> {
    std::vector<int> out;
    int a = S[0];
    for (int j = 0; j < n; ++j) {
      if (std::find(S.begin(), S.end(), j) != S.end()) continue;
      if (dist2(pts[j], pts[a]) <= 4 * s) out.push_back(j);
    }
    return out;
  };
  auto validate = [&](const Pt& x, const std::vector<int>& S,
                      const std::vector<int>& out) -> bool {
    Q f = pw2(x, S[0]);
    if (f > s) return false;
    for (size_t t = 1; t < S.size(); ++t)
      if (pw2(x, S[t]) != f) return false;
    for (int j : out)
      if (pw2(x, j) < f) return false;
    return true;
  };

  auto member = [&](const std::vector<int>& S) -> bool {
    auto out = near_outsiders(S);
    std::vector<Pt> cands;
    int a = S[0];
    if (S.size() == 1) {
      cands.push_back(pts[a]);
      std::vector<detail::HLine> walls;
      for (int j : out)
        walls.push_back(detail::power_bisector(pts[a], w2[a], pts[j], w2[j]));
      for (const auto& l : walls) cands.push_back(detail::foot_on_line(pts[a], l));
      for (size_t u = 0; u < walls.size(); ++u)
        for (size_t v = u + 1; v < walls.size(); ++v)
          if (auto x = detail::line_intersect(walls[u], walls[v]))
            cands.push_back(*x);
    } else if (S.size() == 2) {
      auto L = detail::power_bisector(pts[a], w2[a], pts[S[1]], w2[S[1]]);
      cands.push_back(detail::foot_on_line(pts[a], L));
      for (int j : out) {
        auto w = detail::power_bisector(pts[a], w2[a], pts[j], w2[j]);
        if (auto x = detail::line_intersect(L, w)) cands.push_back(*x);
      }
    } else {  // S.size() == 3
      auto L1 = detail::power_bisector(pts[a], w2[a], pts[S[1]], w2[S[1]]);
      auto L2 = detail::power_bisector(pts[a], w2[a], pts[S[2]], w2[S[2]]);
      if (auto x = detail::line_intersect(L1, L2)) {
        cands.push_back(*x);
      } else if (detail::same_line(L1, L2)) {
        cands.push_back(detail::foot_on_line(pts[a], L1));
        for (int j : out) {
          auto w = detail::power_bisector(pts[a], w2[a], pts[j], w2[j]);
          if (auto x = detail::line_intersect(L1, w)) cands.push_back(*x);
        }
      }
      // parallel distinct bisectors: empty locus, no candidates
    }
    for (const auto& x : cands)
      if (validate(x, S, out)) return true;
    return false;
  };

  SliceComplex sc;
  std::vector<int> verts;
  for (int i = 0; i < n; ++i)
    if (member({i})) {
      sc.simplices.insert({i});
      verts.push_back(i);
    }
  std::set<std::pair<int, int>> edges;
  for (size_t u = 0; u < verts.size(); ++u)
    for (size_t v = u + 1; v < verts.size(); ++v) {
      int i = verts[u], j = verts[v];
      if (member({i, j})) {
        sc.simplices.insert({i, j});
        edges.insert({i, j});
      }
    }
  for (size_t u = 0; u < verts.size(); ++u)
    for (size_t v = u + 1; v < verts.size(); ++v)
      for (size_t w = v + 1; w < verts.size(); ++w) {
        int i = verts[u], j = verts[v], k = verts[w];
        if (!edges.count({i, j}) || !edges.count({i, k}) ||
            !edges.count({j, k}))
          continue;
        if (member({i, j, k})) sc.simplices.insert({i, j, k});
      }
  return sc;
}

// Convenience overload: weights straight from a computed schedule.
inline SliceComplex nerve_slice_check(const std::vector<Pt>& pts,
                                      const WeightSchedule& sched, const Q& s) {
  std::vector<WeightClass> cls(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    cls[i] = sched.infinite[i] ? WeightClass::unfrozen()
                               : WeightClass::frozen_at(sched.lambda2[i]);
  return nerve_slice_check(pts, cls, s);
}

// ---------------------------------------------------------------------------
// naive_persistence: unoptimized left-to-right reduction (independent of
// persistence.reduce's bookkeeping: dense scans, set-based columns).

inline Diagram naive_persistence(const FiltrationStore& st) {
  size_t m = st.entries.size();
  if (m > 2000)
    throw std::runtime_error("naive_persistence limited to 2000 columns");
  {
    auto bad = st.validate();
    if (!bad.empty())
      throw std::runtime_error("invalid store: " + bad.front());
  }
  std::vector<std::set<int>> cols(m);
  for (size_t j = 0; j < m; ++j) {
    const auto& verts = st.entries[j].verts;
    if (verts.size() == 1) continue;
    for (size_t skip = 0; skip < verts.size(); ++skip) {
      std::vector<int> f;
      for (size_t t = 0; t < verts.size(); ++t)
        if (t != skip) f.push_back(verts[t]);
      cols[j].insert(static_cast<int>(st.index.at(f)));
    }
  }
  std::vector<char> done(m, 0);
  for (size_t j = 0; j < m; ++j) {
    bool changed = true;
    while (!cols[j].empty() && changed) {
      changed = false;
      int low = *cols[j].rbegin();
      for (size_t j0 = 0; j0 < j; ++j0) {
        if (!done[j0] || cols[j0].empty()) continue;
        if (*cols[j0].rbegin() != low) continue;
        for (int r : cols[j0]) {
          auto it = cols[j].find(r);
          if (it != cols[j].end()) cols[j].erase(it);
          else cols[j].insert(r);
        }
        changed = true;
        break;
      }
    }
    done[j] = 1;
  }
  std::vector<int> owner(m, -1);
  std::vector<char> creator(m, 0);
  for (size_t j = 0; j < m; ++j) {
    if (cols[j].empty()) creator[j] = 1;
    else owner[*cols[j].rbegin()] = static_cast<int>(j);
  }
  return detail::assemble_diagram(st, owner, creator);
}

}  // namespace sdf
