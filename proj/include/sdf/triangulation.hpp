#pragma once
// Incremental regular (power-weighted Delaunay) triangulation in the plane
// with exact predicates.
//
// Triangle records are immutable in identity: ids grow monotonically, are
// never reused, and a record's vertex tuple never changes — only its alive
// flag and neighbor links do. Event queues elsewhere rely on (id, alive) for
// staleness detection.
//
// The outer face is covered by ghost triangles {b, a, GHOST}, one per hull
// edge a->b (interior on the left of a->b). Points outside the hull are
// inserted by filling the contiguous arc of strictly visible hull edges.
// Legalization flips use the power test at a caller-supplied squared scale s;
// exact ties flip only toward the lexicographically smaller diagonal, whose
// fixed point on a cocircular polygon is the fan around its smallest vertex
// id.

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sdf/point.hpp"
#include "sdf/predicates.hpp"

namespace sdf {

class Triangulation {
 public:
  static constexpr int GHOST = -1;

  struct Tri {
    std::array<int, 3> v;    // CCW for real triangles; ghosts hold one GHOST
    std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]
    bool alive = true;
  };

  struct Change {
    std::vector<int> removed, created;  // triangle ids
    void append(const Change& o) {
      removed.insert(removed.end(), o.removed.begin(), o.removed.end());
      created.insert(created.end(), o.created.begin(), o.created.end());
    }
  };

  struct Locate {
    enum Kind { IN_TRI, ON_EDGE, ON_VERTEX, OUTSIDE } kind;
    int t = -1;   // IN_TRI: container; OUTSIDE: strictly visible ghost;
                  // ON_EDGE: one side
    int t2 = -1;  // ON_EDGE: the other side
    int a = -1, b = -1;  // ON_EDGE endpoints; ON_VERTEX: a is the vertex id
  };

  int add_vertex(const Pt& p, const WeightClass& wc) {
    pts_.push_back(p);
    wc_.push_back(wc);
    vert_tri_.push_back(-1);
    return static_cast<int>(pts_.size()) - 1;
  }

  int num_verts() const { return static_cast<int>(pts_.size()); }
  const Pt& point(int vid) const { return pts_.at(vid); }
  const WeightClass& wclass(int vid) const { return wc_.at(vid); }
  // Weight classes are mutable: the wave engine switches a vertex between
  // unfrozen and frozen-at-λ² so that at most two classes are ever live.
  void set_wclass(int vid, const WeightClass& wc) { wc_.at(vid) = wc; }
  // Some alive triangle incident to vid (-1 before the first incidence).
  int incident_tri(int vid) const { return vert_tri_.at(vid); }
  const std::vector<Tri>& tris() const { return tris_; }
  const Tri& tri(int t) const { return tris_.at(t); }
  bool alive(int t) const {
    return t >= 0 && t < static_cast<int>(tris_.size()) && tris_[t].alive;
  }
  static bool is_ghost_tri(const Tri& T) {
    return T.v[0] == GHOST || T.v[1] == GHOST || T.v[2] == GHOST;
  }
  bool is_ghost(int t) const { return is_ghost_tri(tris_.at(t)); }

  // Bootstrap: two CCW triangles over four existing vertices placed at the
  // corners of an axis-aligned box (bl, br, tl, tr), plus the ghost layer.
  void init_box(int bl, int br, int tl, int tr) {
    if (!tris_.empty()) throw std::runtime_error("triangulation not empty");
    int t0 = make_tri(bl, br, tr);
    int t1 = make_tri(bl, tr, tl);
    int g0 = make_tri(br, bl, GHOST);  // hull edge bl->br
    int g1 = make_tri(tr, br, GHOST);  // hull edge br->tr
    int g2 = make_tri(tl, tr, GHOST);  // hull edge tr->tl
    int g3 = make_tri(bl, tl, GHOST);  // hull edge tl->bl
    link_edge(t0, t1, bl, tr);
    link_edge(t0, g0, bl, br);
    link_edge(t0, g1, br, tr);
    link_edge(t1, g2, tr, tl);
    link_edge(t1, g3, tl, bl);
    link_edge(g0, g3, bl, GHOST);
    link_edge(g0, g1, br, GHOST);
    link_edge(g1, g2, tr, GHOST);
    link_edge(g2, g3, tl, GHOST);
  }

  Locate locate(const Pt& q) const { return locate(q, hint_); }

  // Straight-line walk from start_tri (any alive triangle, real or ghost).
  Locate locate(const Pt& q, int start_tri) const {
    if (start_tri < 0 || !alive(start_tri))
      throw std::runtime_error("empty triangulation");
    long budget = 4 * static_cast<long>(tris_.size()) + 16;
    int t = start_tri;
    bool in_ghost = is_ghost(t);
    while (budget-- > 0) {
      const Tri& T = tris_[t];
      if (!in_ghost) {
        for (int i = 0; i < 3; ++i)
          if (pts_[T.v[i]] == q) return Locate{Locate::ON_VERTEX, t, -1, T.v[i], -1};
        int exit = -1, zero_edge = -1;
        for (int i = 0; i < 3 && exit < 0; ++i) {
          int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
          int o = orient2(pts_[a], pts_[b], q);
          if (o < 0) exit = i;
          else if (o == 0) zero_edge = i;
        }
        if (exit >= 0) {
          int nxt = T.nbr[exit];
          if (is_ghost(nxt)) {
            t = nxt;
            in_ghost = true;
          } else {
            t = nxt;
          }
          continue;
        }
        if (zero_edge < 0) return Locate{Locate::IN_TRI, t, -1, -1, -1};
        int a = T.v[(zero_edge + 1) % 3], b = T.v[(zero_edge + 2) % 3];
        return Locate{Locate::ON_EDGE, t, T.nbr[zero_edge], a, b};
      }
      // Ghost phase: T = {b, a, GHOST} for hull edge a->b.
      int b = T.v[0], a = T.v[1];
      if (pts_[a] == q) return Locate{Locate::ON_VERTEX, t, -1, a, -1};
      if (pts_[b] == q) return Locate{Locate::ON_VERTEX, t, -1, b, -1};
      int vis = orient2(pts_[b], pts_[a], q);
      if (vis > 0) return Locate{Locate::OUTSIDE, t, -1, -1, -1};
      if (vis == 0) {
        // On the hull line: inside the open segment, beyond a, or beyond b.
        Q along = (q.x - pts_[a].x) * (pts_[b].x - pts_[a].x) +
                  (q.y - pts_[a].y) * (pts_[b].y - pts_[a].y);
        Q len2 = dist2(pts_[a], pts_[b]);
        if (sgn(along) > 0 && along < len2)
          return Locate{Locate::ON_EDGE, T.nbr[2], t, a, b};
        if (sgn(along) <= 0) t = T.nbr[0];  // toward the ghost ending at a
        else t = T.nbr[1];                  // toward the ghost starting at b
        continue;
      }
      // Interior side of this hull edge: re-enter the real walk.
      t = T.nbr[2];
      in_ghost = false;
    }
    throw std::runtime_error("locate failed to terminate");
  }

  // Full insertion of vertex vid at squared scale s: locate, split or fill,
  // then legalize with the power test. Throws if the position coincides with
  // an existing vertex.
  Change insert(int vid, const Q& s) {
    change_ = Change{};
    const Pt& q = pts_.at(vid);
    Locate loc = locate(q);
    std::vector<EdgeRef> suspects;
    switch (loc.kind) {
      case Locate::ON_VERTEX:
        throw std::runtime_error("vertex already present");
      case Locate::IN_TRI:
        split3(loc.t, vid, suspects);
        break;
      case Locate::ON_EDGE:
        split_edge(loc.t, loc.t2, loc.a, loc.b, vid, suspects);
        break;
      case Locate::OUTSIDE:
        fill_visible_arc(loc.t, vid, suspects);
        break;
    }
    legalize(suspects, s);
    return std::move(change_);
  }

  // Apply one flip of the edge shared by real alive triangles t1, t2.
  // No legalization; the caller owns event scheduling.
  Change flip(int t1, int t2) {
    change_ = Change{};
    do_flip(t1, t2);
    return std::move(change_);
  }

  // All alive triangles (real and ghost) incident to vid, in rotation order.
  std::vector<int> star(int vid) const {
    std::vector<int> out;
    int t0 = vert_tri_.at(vid);
    if (t0 < 0 || !tris_[t0].alive) return out;
    int t = t0;
    do {
      out.push_back(t);
      const Tri& T = tris_[t];
      int i = vert_index(T, vid);
      if (i < 0) throw std::logic_error("star: stale vertex link");
      t = T.nbr[(i + 1) % 3];
      if (t < 0 || !tris_[t].alive)
        throw std::logic_error("star: broken ring");
    } while (t != t0 && static_cast<int>(out.size()) <= 2 * num_verts() + 8);
    if (t != t0) throw std::logic_error("star: ring did not close");
    return out;
  }

  // The two alive triangles sharing edge (a, b), if the edge exists.
  std::optional<std::pair<int, int>> edge_tris(int a, int b) const {
    int t0 = vert_tri_.at(a);
    if (t0 < 0 || !tris_[t0].alive) return std::nullopt;
    for (int t : star(a)) {
      const Tri& T = tris_[t];
      int i = vert_index(T, b);
      if (i >= 0) {
        int j = opp_index_of_edge(T, a, b);
        return std::make_pair(t, T.nbr[j]);
      }
    }
    return std::nullopt;
  }

  static int vert_index(const Tri& T, int vid) {
    for (int i = 0; i < 3; ++i)
      if (T.v[i] == vid) return i;
    return -1;
  }

 private:
  struct EdgeRef {
    int t, a, b;
  };

  std::vector<Pt> pts_;
  std::vector<WeightClass> wc_;
  std::vector<int> vert_tri_;  // some alive incident triangle, or -1
  std::vector<Tri> tris_;
  int hint_ = -1;  // an alive real triangle
  Change change_;

  static int opp_index_of_edge(const Tri& T, int x, int y) {
    for (int i = 0; i < 3; ++i) {
      int p = T.v[(i + 1) % 3], r = T.v[(i + 2) % 3];
      if ((p == x && r == y) || (p == y && r == x)) return i;
    }
    throw std::logic_error("edge not in triangle");
  }

  int make_tri(int v0, int v1, int v2) {
    Tri T{{v0, v1, v2}, {-1, -1, -1}, true};
    if (!is_ghost_tri(T)) {
      if (orient2(pts_[v0], pts_[v1], pts_[v2]) <= 0)
        throw std::logic_error("non-CCW triangle created");
    }
    int id = static_cast<int>(tris_.size());
    tris_.push_back(T);
    for (int v : T.v)
      if (v != GHOST) vert_tri_[v] = id;
    if (!is_ghost_tri(T)) hint_ = id;
    change_.created.push_back(id);
    return id;
  }

  void kill(int t) {
    tris_[t].alive = false;
    change_.removed.push_back(t);
  }

  void link_edge(int t1, int t2, int x, int y) {
    tris_[t1].nbr[opp_index_of_edge(tris_[t1], x, y)] = t2;
    tris_[t2].nbr[opp_index_of_edge(tris_[t2], x, y)] = t1;
  }

  void split3(int t, int q, std::vector<EdgeRef>& suspects) {
    Tri old = tris_[t];
    kill(t);
    int n0 = make_tri(old.v[0], old.v[1], q);
    int n1 = make_tri(old.v[1], old.v[2], q);
    int n2 = make_tri(old.v[2], old.v[0], q);
    link_edge(n0, n1, old.v[1], q);
    link_edge(n1, n2, old.v[2], q);
    link_edge(n2, n0, old.v[0], q);
    link_edge(n0, old.nbr[2], old.v[0], old.v[1]);
    link_edge(n1, old.nbr[0], old.v[1], old.v[2]);
    link_edge(n2, old.nbr[1], old.v[2], old.v[0]);
    suspects.push_back({n0, old.v[0], old.v[1]});
    suspects.push_back({n1, old.v[1], old.v[2]});
    suspects.push_back({n2, old.v[2], old.v[0]});
  }

  // Split both triangles adjacent to edge (a, b) at point q on the open
  // segment; the far side may be a ghost (q on a hull edge).
  void split_edge(int t, int tg, int a, int b, int q,
                  std::vector<EdgeRef>& suspects) {
    Tri T1 = tris_[t];
    // Orient so T1 reads (c, a1, b1) CCW with {a1, b1} == {a, b}.
    int ic = opp_index_of_edge(T1, a, b);
    int c = T1.v[ic], a1 = T1.v[(ic + 1) % 3], b1 = T1.v[(ic + 2) % 3];
    Tri T2 = tris_[tg];
    kill(t);
    kill(tg);
    int p1 = make_tri(c, a1, q);
    int p2 = make_tri(c, q, b1);
    link_edge(p1, p2, c, q);
    link_edge(p1, T1.nbr[(ic + 2) % 3], c, a1);
    link_edge(p2, T1.nbr[(ic + 1) % 3], b1, c);
    suspects.push_back({p1, c, a1});
    suspects.push_back({p2, b1, c});
    if (!is_ghost_tri(T2)) {
      int d = T2.v[opp_index_of_edge(T2, a, b)];
      // T2 reads (d, b1, a1) CCW: the shared edge reversed, d on its left.
      int p3 = make_tri(d, b1, q);
      int p4 = make_tri(d, q, a1);
      link_edge(p3, p4, d, q);
      link_edge(p3, p2, q, b1);
      link_edge(p4, p1, a1, q);
      link_edge(p3, T2.nbr[opp_index_of_edge(T2, d, b1)], d, b1);
      link_edge(p4, T2.nbr[opp_index_of_edge(T2, d, a1)], d, a1);
      suspects.push_back({p3, d, b1});
      suspects.push_back({p4, d, a1});
    } else {
      // Ghost side: T2 == {b1, a1, GHOST} for hull edge a1->b1.
      int ga = make_tri(q, a1, GHOST);  // hull edge a1->q
      int gb = make_tri(b1, q, GHOST);  // hull edge q->b1
      link_edge(ga, gb, q, GHOST);
      link_edge(ga, T2.nbr[0], a1, GHOST);
      link_edge(gb, T2.nbr[1], b1, GHOST);
      link_edge(ga, p1, a1, q);
      link_edge(gb, p2, q, b1);
    }
  }

  // Fill the contiguous arc of hull edges strictly visible from q, starting
  // from ghost g which is already strictly visible.
  void fill_visible_arc(int g, int q, std::vector<EdgeRef>& suspects) {
    Tri G = tris_[g];
    int b1 = G.v[0], a1 = G.v[1];
    kill(g);
    int r = make_tri(b1, a1, q);
    int gqa = make_tri(q, a1, GHOST);  // hull edge a1->q
    int gbq = make_tri(b1, q, GHOST);  // hull edge q->b1
    link_edge(r, G.nbr[2], a1, b1);
    link_edge(r, gqa, a1, q);
    link_edge(r, gbq, q, b1);
    link_edge(gqa, gbq, q, GHOST);
    link_edge(gqa, G.nbr[0], a1, GHOST);
    link_edge(gbq, G.nbr[1], b1, GHOST);
    suspects.push_back({r, a1, b1});
    // Sweep left: eat hull edges ending at the current leftmost vertex while
    // they stay strictly visible from q. The ghost on q's left flank is
    // `qleft`; its (q, GHOST) side always links to `qright` and vice versa.
    int qleft = gqa, qright = gbq;
    while (true) {
      const Tri C = tris_[qleft];
      int acur = C.v[1];
      int gl = C.nbr[0];
      const Tri GL = tris_[gl];  // {acur, w, GHOST}: hull edge w->acur
      int w = GL.v[1];
      if (orient2(pts_[acur], pts_[w], pts_[q]) <= 0) break;
      int behind = C.nbr[2];
      kill(gl);
      kill(qleft);
      int r2 = make_tri(acur, w, q);
      int g2 = make_tri(q, w, GHOST);  // hull edge w->q
      link_edge(r2, GL.nbr[2], w, acur);
      link_edge(r2, behind, acur, q);
      link_edge(r2, g2, w, q);
      link_edge(g2, GL.nbr[0], w, GHOST);
      link_edge(g2, qright, q, GHOST);
      suspects.push_back({r2, w, acur});
      qleft = g2;
    }
    // Sweep right: eat hull edges starting at the current rightmost vertex.
    while (true) {
      const Tri C = tris_[qright];
      int bcur = C.v[0];
      int gr = C.nbr[1];
      const Tri GR = tris_[gr];  // {z, bcur, GHOST}: hull edge bcur->z
      int z = GR.v[0];
      if (orient2(pts_[z], pts_[bcur], pts_[q]) <= 0) break;
      int behind = C.nbr[2];
      kill(gr);
      kill(qright);
      int r2 = make_tri(z, bcur, q);
      int g2 = make_tri(z, q, GHOST);  // hull edge q->z
      link_edge(r2, GR.nbr[2], bcur, z);
      link_edge(r2, behind, q, bcur);
      link_edge(r2, g2, z, q);
      link_edge(g2, GR.nbr[1], z, GHOST);
      link_edge(g2, qleft, q, GHOST);
      suspects.push_back({r2, z, bcur});
      qright = g2;
    }
  }

  void do_flip(int t1, int t2) {
    if (!alive(t1) || !alive(t2))
      throw std::runtime_error("flip on dead triangle");
    Tri T1 = tris_[t1], T2 = tris_[t2];
    if (is_ghost_tri(T1) || is_ghost_tri(T2))
      throw std::runtime_error("flip on ghost triangle");
    int i1 = -1;
    for (int i = 0; i < 3; ++i)
      if (T1.nbr[i] == t2) i1 = i;
    if (i1 < 0) throw std::runtime_error("flip on non-adjacent triangles");
    int c = T1.v[i1], a = T1.v[(i1 + 1) % 3], b = T1.v[(i1 + 2) % 3];
    int i2 = opp_index_of_edge(T2, a, b);
    int d = T2.v[i2];
    kill(t1);
    kill(t2);
    int n1 = make_tri(c, a, d);
    int n2 = make_tri(c, d, b);
    link_edge(n1, n2, c, d);
    link_edge(n1, T1.nbr[(i1 + 2) % 3], c, a);
    link_edge(n1, T2.nbr[opp_index_of_edge(T2, a, d)], a, d);
    link_edge(n2, T2.nbr[opp_index_of_edge(T2, d, b)], d, b);
    link_edge(n2, T1.nbr[(i1 + 1) % 3], b, c);
  }

  void legalize(std::vector<EdgeRef>& suspects, const Q& s) {
    while (!suspects.empty()) {
      EdgeRef e = suspects.back();
      suspects.pop_back();
      if (!alive(e.t)) continue;
      const Tri& T = tris_[e.t];
      int i;
      try {
        i = opp_index_of_edge(T, e.a, e.b);
      } catch (const std::logic_error&) {
        continue;  // edge no longer in this triangle
      }
      int nb = T.nbr[i];
      if (is_ghost_tri(T) || nb < 0 || is_ghost(nb)) continue;
      const Tri& N = tris_[nb];
      int j = opp_index_of_edge(N, e.a, e.b);
      int d = N.v[j];
      int c = T.v[i];
      int sign = power_incircle(pts_[T.v[0]], wc_[T.v[0]], pts_[T.v[1]],
                                wc_[T.v[1]], pts_[T.v[2]], wc_[T.v[2]],
                                pts_[d], wc_[d], s);
      bool do_it = sign > 0;
      if (sign == 0) {
        auto key = [](int x, int y) {
          return std::pair<int, int>(x < y ? x : y, x < y ? y : x);
        };
        do_it = key(c, d) < key(e.a, e.b);
      }
      if (!do_it) continue;
      int t1 = e.t, t2 = nb;
      do_flip(t1, t2);
      int n1 = change_.created[change_.created.size() - 2];
      int n2 = change_.created[change_.created.size() - 1];
      suspects.push_back({n1, c, e.a});
      suspects.push_back({n1, e.a, d});
      suspects.push_back({n2, d, e.b});
      suspects.push_back({n2, e.b, c});
    }
  }
};

}  // namespace sdf
