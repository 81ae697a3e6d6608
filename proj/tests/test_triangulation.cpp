#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sdf/point.hpp"
#include "sdf/predicates.hpp"
#include "sdf/random.hpp"
#include "sdf/triangulation.hpp"

using sdf::Pt;
using sdf::Q;
using sdf::Triangulation;
using sdf::WeightClass;

namespace {

Pt P(long x, long y) { return Pt{Q(x), Q(y)}; }

// Structural invariants: CCW real triangles, symmetric neighbor links with
// matching shared edges, every edge bordered by exactly two alive triangles,
// a closed convex ghost cycle, and Euler's formula.
void check_integrity(const Triangulation& T) {
  const auto& tris = T.tris();
  std::map<std::pair<int, int>, int> edge_count;
  std::set<int> used_verts;
  int ghosts = 0, reals = 0;
  int some_ghost = -1;
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    if (!tris[t].alive) continue;
    const auto& Tr = tris[t];
    if (Triangulation::is_ghost_tri(Tr)) {
      ++ghosts;
      some_ghost = t;
      REQUIRE(Tr.v[2] == Triangulation::GHOST);
    } else {
      ++reals;
      REQUIRE(sdf::orient2(T.point(Tr.v[0]), T.point(Tr.v[1]),
                           T.point(Tr.v[2])) > 0);
    }
    for (int v : Tr.v)
      if (v != Triangulation::GHOST) used_verts.insert(v);
    for (int i = 0; i < 3; ++i) {
      int nb = Tr.nbr[i];
      REQUIRE(nb >= 0);
      REQUIRE(T.alive(nb));
      int a = Tr.v[(i + 1) % 3], b = Tr.v[(i + 2) % 3];
      const auto& N = T.tri(nb);
      bool back = false;
      for (int j = 0; j < 3; ++j) {
        if (N.nbr[j] != t) continue;
        bool same = (N.v[(j + 1) % 3] == a && N.v[(j + 2) % 3] == b) ||
                    (N.v[(j + 1) % 3] == b && N.v[(j + 2) % 3] == a);
        REQUIRE(same);
        back = true;
      }
      REQUIRE(back);
      edge_count[std::minmax(a, b)]++;
    }
  }
  int real_edges = 0;
  for (const auto& [e, c] : edge_count) {
    REQUIRE(c == 2);
    if (e.first != Triangulation::GHOST) ++real_edges;
  }
  // V - E + F = 2, counting the outer face once.
  REQUIRE(static_cast<int>(used_verts.size()) - real_edges + reals + 1 == 2);
  // Ghost cycle: following the "next hull edge" link visits every ghost.
  if (some_ghost >= 0) {
    int steps = 0, g = some_ghost;
    do {
      const auto& G = T.tri(g);
      // Hull edge a->b of ghost {b, a, GHOST}: all used vertices on or left.
      for (int v : used_verts)
        REQUIRE(sdf::orient2(T.point(G.v[1]), T.point(G.v[0]), T.point(v)) >=
                0);
      g = G.nbr[1];
      ++steps;
    } while (g != some_ghost && steps <= ghosts + 2);
    REQUIRE(steps == ghosts);
  }
}

// Every alive real triangle's orthoball is empty at scale s.
void check_regular(const Triangulation& T, const Q& s) {
  std::set<int> used;
  for (const auto& Tr : T.tris())
    if (Tr.alive)
      for (int v : Tr.v)
        if (v != Triangulation::GHOST) used.insert(v);
  for (const auto& Tr : T.tris()) {
    if (!Tr.alive || Triangulation::is_ghost_tri(Tr)) continue;
    for (int v : used) {
      if (v == Tr.v[0] || v == Tr.v[1] || v == Tr.v[2]) continue;
      REQUIRE(sdf::power_incircle(T.point(Tr.v[0]), T.wclass(Tr.v[0]),
                                  T.point(Tr.v[1]), T.wclass(Tr.v[1]),
                                  T.point(Tr.v[2]), T.wclass(Tr.v[2]),
                                  T.point(v), T.wclass(v), s) <= 0);
    }
  }
}

std::set<std::array<int, 3>> alive_real_triples(const Triangulation& T) {
  std::set<std::array<int, 3>> out;
  for (const auto& Tr : T.tris()) {
    if (!Tr.alive || Triangulation::is_ghost_tri(Tr)) continue;
    std::array<int, 3> key = {Tr.v[0], Tr.v[1], Tr.v[2]};
    std::sort(key.begin(), key.end());
    out.insert(key);
  }
  return out;
}

// True when direction (pa - c) strictly precedes (pb - c) counterclockwise
// from due east.
bool ccw_less(const Pt& c, const Pt& pa, const Pt& pb) {
  auto half = [](const Q& x, const Q& y) {
    int sy = sdf::sgn(y);
    if (sy != 0) return sy > 0 ? 0 : 1;
    return sdf::sgn(x) > 0 ? 0 : 1;
  };
  Q ax = pa.x - c.x, ay = pa.y - c.y;
  Q bx = pb.x - c.x, by = pb.y - c.y;
  int ha = half(ax, ay), hb = half(bx, by);
  if (ha != hb) return ha < hb;
  return sdf::sgn(ax * by - ay * bx) > 0;
}

// Unweighted Delaunay triangles by brute force: empty open circumdisk, with
// cocircular clusters resolved to the fan around their smallest vertex id —
// the fixed point of the tie rule that flips toward smaller diagonals.
std::set<std::array<int, 3>> brute_delaunay(const Triangulation& T,
                                            const std::vector<int>& vids) {
  std::set<std::array<int, 3>> out;
  int n = static_cast<int>(vids.size());
  WeightClass u = WeightClass::unfrozen();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Pt &a = T.point(vids[i]), &b = T.point(vids[j]),
                 &c = T.point(vids[k]);
        if (sdf::orient2(a, b, c) == 0) continue;
        auto ball = sdf::orthoball_tri(a, u, b, u, c, u, Q(1));
        bool empty = true;
        std::vector<int> cluster;
        for (int m = 0; m < n && empty; ++m) {
          Q d2 = sdf::dist2(T.point(vids[m]), ball.center);
          int c3 = cmp(d2, ball.r2);
          if (c3 < 0 && m != i && m != j && m != k) empty = false;
          if (c3 == 0) cluster.push_back(vids[m]);
        }
        if (!empty) continue;
        if (cluster.size() == 3) {
          out.insert({vids[i], vids[j], vids[k]});
          continue;
        }
        // Fan rule: ring order around the circle cut at the smallest id.
        int v0 = *std::min_element(cluster.begin(), cluster.end());
        std::sort(cluster.begin(), cluster.end(), [&](int x, int y) {
          return ccw_less(ball.center, T.point(x), T.point(y));
        });
        int m = static_cast<int>(cluster.size());
        int pos0 = static_cast<int>(
            std::find(cluster.begin(), cluster.end(), v0) - cluster.begin());
        std::vector<int> ring2;  // the others, CCW starting after v0
        for (int t = 1; t < m; ++t) ring2.push_back(cluster[(pos0 + t) % m]);
        std::array<int, 3> triple = {vids[i], vids[j], vids[k]};
        if (std::find(triple.begin(), triple.end(), v0) == triple.end())
          continue;
        std::vector<int> others;
        for (int v : triple)
          if (v != v0) others.push_back(v);
        auto p1 = std::find(ring2.begin(), ring2.end(), others[0]);
        auto p2 = std::find(ring2.begin(), ring2.end(), others[1]);
        if (std::abs(static_cast<int>(p1 - p2)) == 1) {
          std::sort(triple.begin(), triple.end());
          out.insert(triple);
        }
      }
  return out;
}

// A fresh triangulation over an axis-aligned box; returns the corner vids.
std::array<int, 4> boot(Triangulation& T, long x0, long y0, long x1, long y1) {
  WeightClass u = WeightClass::unfrozen();
  int bl = T.add_vertex(P(x0, y0), u);
  int br = T.add_vertex(P(x1, y0), u);
  int tl = T.add_vertex(P(x0, y1), u);
  int tr = T.add_vertex(P(x1, y1), u);
  T.init_box(bl, br, tl, tr);
  return {bl, br, tl, tr};
}

}  // namespace

TEST_CASE("box bootstrap and locate kinds") {
  Triangulation T;
  boot(T, 0, 0, 8, 8);
  check_integrity(T);

  auto loc = T.locate(P(3, 2));
  REQUIRE(loc.kind == Triangulation::Locate::IN_TRI);
  REQUIRE_FALSE(T.is_ghost(loc.t));

  loc = T.locate(P(2, 2));  // on the diagonal (corner 0)-(corner 3)
  REQUIRE(loc.kind == Triangulation::Locate::ON_EDGE);
  REQUIRE(std::minmax(loc.a, loc.b) == std::minmax(0, 3));
  REQUIRE_FALSE(T.is_ghost(loc.t));
  REQUIRE_FALSE(T.is_ghost(loc.t2));

  loc = T.locate(P(8, 0));
  REQUIRE(loc.kind == Triangulation::Locate::ON_VERTEX);
  REQUIRE(loc.a == 1);

  loc = T.locate(P(4, 0));  // on the bottom hull edge
  REQUIRE(loc.kind == Triangulation::Locate::ON_EDGE);
  REQUIRE(std::minmax(loc.a, loc.b) == std::minmax(0, 1));
  REQUIRE(T.is_ghost(loc.t2));

  for (Pt q : {P(9, 1), P(-1, -1), P(16, 0), P(4, -7)}) {
    loc = T.locate(q);
    REQUIRE(loc.kind == Triangulation::Locate::OUTSIDE);
    REQUIRE(T.is_ghost(loc.t));
    const auto& G = T.tri(loc.t);
    REQUIRE(sdf::orient2(T.point(G.v[0]), T.point(G.v[1]), q) > 0);
  }
}

TEST_CASE("interior insertions keep the structure Delaunay") {
  Triangulation T;
  boot(T, 0, 0, 8, 8);
  WeightClass u = WeightClass::unfrozen();
  std::vector<int> all = {0, 1, 2, 3};
  for (long x : {2L, 4L, 6L})
    for (long y : {2L, 4L, 6L}) {
      int vid = T.add_vertex(P(x, y), u);
      auto ch = T.insert(vid, Q(1));
      for (int t : ch.removed) REQUIRE_FALSE(T.alive(t));
      REQUIRE_FALSE(ch.created.empty());
      all.push_back(vid);
      check_integrity(T);
    }
  check_regular(T, Q(1));
  REQUIRE(alive_real_triples(T) == brute_delaunay(T, all));
  // Interior insertions leave the hull (and its four ghosts) unchanged.
  int ghosts = 0;
  for (const auto& Tr : T.tris())
    if (Tr.alive && Triangulation::is_ghost_tri(Tr)) ++ghosts;
  REQUIRE(ghosts == 4);
}

TEST_CASE("random points match the brute-force Delaunay triangulation") {
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    Triangulation T;
    Pt lo{Q(-1), Q(-1)}, hi{Q(2), Q(2)};
    WeightClass u = WeightClass::unfrozen();
    int bl = T.add_vertex(Pt{lo.x, lo.y}, u);
    int br = T.add_vertex(Pt{hi.x, lo.y}, u);
    int tl = T.add_vertex(Pt{lo.x, hi.y}, u);
    int tr = T.add_vertex(Pt{hi.x, hi.y}, u);
    T.init_box(bl, br, tl, tr);
    std::vector<int> all = {bl, br, tl, tr};
    for (const Pt& p : sdf::random_points(30, seed)) {
      int vid = T.add_vertex(p, u);
      T.insert(vid, Q(1));
      all.push_back(vid);
    }
    check_integrity(T);
    check_regular(T, Q(1));
    REQUIRE(alive_real_triples(T) == brute_delaunay(T, all));

    // Star and edge queries agree with the triangle records.
    for (int vid : all) {
      auto st = T.star(vid);
      REQUIRE_FALSE(st.empty());
      for (int t : st) {
        REQUIRE(T.alive(t));
        REQUIRE(Triangulation::vert_index(T.tri(t), vid) >= 0);
      }
      for (int t : st) {
        const auto& Tr = T.tri(t);
        for (int i = 0; i < 3; ++i) {
          int a = Tr.v[i], b = Tr.v[(i + 1) % 3];
          if (a == Triangulation::GHOST || b == Triangulation::GHOST) continue;
          auto pr = T.edge_tris(a, b);
          REQUIRE(pr.has_value());
          bool covers = (pr->first == t) || (pr->second == t);
          REQUIRE(covers);
        }
      }
    }
  }
}

TEST_CASE("outside insertions grow the hull") {
  Triangulation T;
  boot(T, 0, 0, 4, 4);
  WeightClass u = WeightClass::unfrozen();
  std::vector<int> all = {0, 1, 2, 3};
  // Includes a point exactly collinear with the bottom hull edge.
  for (Pt q : {P(9, 2), P(-4, 2), P(2, 11), P(8, 0), P(3, -6)}) {
    int vid = T.add_vertex(q, u);
    auto loc = T.locate(q);
    REQUIRE(loc.kind == Triangulation::Locate::OUTSIDE);
    T.insert(vid, Q(1));
    all.push_back(vid);
    check_integrity(T);
  }
  check_regular(T, Q(1));
  REQUIRE(alive_real_triples(T) == brute_delaunay(T, all));
}

TEST_CASE("on-edge insertions split both sides") {
  SECTION("interior edge") {
    Triangulation T;
    boot(T, 0, 0, 4, 4);
    int vid = T.add_vertex(P(2, 2), WeightClass::unfrozen());
    T.insert(vid, Q(1));
    check_integrity(T);
    REQUIRE(alive_real_triples(T).size() == 4);
    REQUIRE_FALSE(T.edge_tris(0, 3).has_value());
  }
  SECTION("hull edge") {
    Triangulation T;
    boot(T, 0, 0, 4, 4);
    int vid = T.add_vertex(P(2, 0), WeightClass::unfrozen());
    T.insert(vid, Q(1));
    check_integrity(T);
    int ghosts = 0;
    for (const auto& Tr : T.tris())
      if (Tr.alive && Triangulation::is_ghost_tri(Tr)) ++ghosts;
    REQUIRE(ghosts == 5);
    check_regular(T, Q(1));
  }
  SECTION("duplicate vertex is rejected") {
    Triangulation T;
    boot(T, 0, 0, 4, 4);
    int vid = T.add_vertex(P(4, 4), WeightClass::unfrozen());
    REQUIRE_THROWS_WITH(T.insert(vid, Q(1)), "vertex already present");
  }
}

TEST_CASE("cocircular insertions settle on the fan through the smallest id") {
  // Twelve integer points on the radius-5 circle around (8, 8).
  std::vector<Pt> ring;
  for (auto [dx, dy] : std::vector<std::pair<long, long>>{{5, 0},
                                                          {4, 3},
                                                          {3, 4},
                                                          {0, 5},
                                                          {-3, 4},
                                                          {-4, 3},
                                                          {-5, 0},
                                                          {-4, -3},
                                                          {-3, -4},
                                                          {0, -5},
                                                          {3, -4},
                                                          {4, -3}})
    ring.push_back(P(8 + dx, 8 + dy));

  auto build = [&](bool reversed) {
    Triangulation T;
    boot(T, 0, 0, 16, 16);
    WeightClass u = WeightClass::unfrozen();
    std::vector<int> vids;
    for (const Pt& p : ring) vids.push_back(T.add_vertex(p, u));
    if (reversed) std::reverse(vids.begin(), vids.end());
    for (int vid : vids) T.insert(vid, Q(1));
    check_integrity(T);
    return alive_real_triples(T);
  };
  auto forward = build(false), backward = build(true);
  REQUIRE(forward == backward);
  // Every triangle with all vertices on the circle belongs to the fan
  // around the smallest ring vid (vid 4).
  int fan = 0;
  for (const auto& tr : forward) {
    if (tr[0] < 4) continue;  // touches a box corner
    REQUIRE(tr[0] == 4);
    ++fan;
  }
  REQUIRE(fan == 10);  // a fan triangulates the 12-gon with 10 triangles
}

TEST_CASE("flip primitive swaps the diagonal and back") {
  Triangulation T;
  boot(T, 0, 0, 4, 4);
  auto before = alive_real_triples(T);
  auto pr = T.edge_tris(0, 3);
  REQUIRE(pr.has_value());
  auto ch = T.flip(pr->first, pr->second);
  REQUIRE(ch.removed.size() == 2);
  REQUIRE(ch.created.size() == 2);
  check_integrity(T);
  REQUIRE_FALSE(T.edge_tris(0, 3).has_value());
  REQUIRE(T.edge_tris(1, 2).has_value());
  auto pr2 = T.edge_tris(1, 2);
  T.flip(pr2->first, pr2->second);
  check_integrity(T);
  REQUIRE(alive_real_triples(T) == before);
}

TEST_CASE("weighted insertion respects the power test") {
  // A cocircular square whose smallest-id corner carries a frozen weight:
  // unweighted the tie rule keeps the diagonal at that corner, but at s = 9
  // its weight pushes the diagonal to the opposite pair.
  auto build = [](bool weighted, const Q& s) {
    Triangulation T;
    boot(T, 0, 0, 16, 16);
    WeightClass u = WeightClass::unfrozen();
    WeightClass w = weighted ? WeightClass::frozen_at(Q(0)) : u;
    int p4 = T.add_vertex(P(6, 6), w);
    int p5 = T.add_vertex(P(10, 6), u);
    int p6 = T.add_vertex(P(6, 10), u);
    int p7 = T.add_vertex(P(10, 10), u);
    for (int vid : {p4, p5, p6, p7}) T.insert(vid, s);
    check_integrity(T);
    check_regular(T, s);
    return T.edge_tris(4, 7).has_value();
  };
  REQUIRE(build(false, Q(9)) == true);    // tie: canonical diagonal (4, 7)
  REQUIRE(build(true, Q(9)) == false);    // weight at 4 flips it to (5, 6)
  REQUIRE(build(true, Q(0)) == true);     // below the freeze, weight is zero
}

TEST_CASE("insertion change sets report dead and new triangles") {
  Triangulation T;
  boot(T, 0, 0, 8, 8);
  int vid = T.add_vertex(P(3, 3), WeightClass::unfrozen());
  auto ch = T.insert(vid, Q(1));
  std::set<int> removed(ch.removed.begin(), ch.removed.end());
  std::set<int> created(ch.created.begin(), ch.created.end());
  for (int t : removed) REQUIRE_FALSE(T.alive(t));
  // Created triangles that were not immediately re-flipped are alive.
  int alive_created = 0;
  for (int t : created)
    if (T.alive(t)) ++alive_created;
  REQUIRE(alive_created >= 3);
  // Ids never repeat across the two lists' alive/dead split.
  for (int t : created) REQUIRE(removed.count(t) == 0);
}
