#pragma once
// Kinetic wave engine.
//
// The filtration is built by sweeping the squared scale s downward. Points
// are grouped into waves by their freezing value λ²; during the wave
// (λ², (1+ε)²λ²] exactly one frozen class is active (squared weight s − λ²),
// everything else is effectively unfrozen, so every certificate determinant
// is degree ≤ 1 in s and event scales are exact rationals. Processing a wave
// inserts all of its points — each one the moment its power cell opens — and
// performs the edge flips whose certificates fail along the way.
//
// Emission semantics: an input simplex σ belongs to the slice at scale γ
// exactly when the clipped power cells of its vertices share a common point,
// which by the added-weight identity ‖x−p‖² ≤ min(γ, λ_p²) ⟺ π_p(x)² ≤ γ
// reduces to orthoball tests on σ's dual face. The stored birth is the
// minimum such γ. A simplex structurally removed while it is a member has
// its minimum at the removal scale (it is absent below); one removed after
// its membership already lapsed is emitted at the projected lapse scale (the
// zero-weight threshold — exact whenever the lapse happens at zero weights,
// a documented projection otherwise, clamped to the creation scale and
// counted when the projection is inconsistent). Simplices alive at the end
// of the sweep are emitted at their zero-weight threshold when it is below
// the final sweep position, which is exact.
//
// The (2,2) flip of a quadruple S at scale s additionally emits S as a
// 3-simplex when its four cells share a point at s, i.e. when the common
// orthoball of the (cospherical) quadruple has squared radius ≤ s; the same
// rule applies per removed triangle of a (1,3) insertion flip. Simplices
// touching a synthetic vertex (bounding-box corner, Steiner point, or the
// infinite vertex) are never tracked and never emitted.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdf/filtration.hpp"
#include "sdf/oracle.hpp"
#include "sdf/predicates.hpp"
#include "sdf/triangulation.hpp"
#include "sdf/weights.hpp"

namespace sdf {

struct BuildOptions {
  // Finalization rule for the 3-simplex of a flip at scale s. The default
  // requires orthoradius²(s) ≤ s and s ≤ wave top; --paper-radius-rule drops
  // the wave-top clause. The two are equivalent for every schedule this
  // engine produces (no event exceeds its wave top); both are kept
  // selectable so tests can assert the equivalence.
  bool paper_radius_rule = false;
};

struct BuildStats {
  long waves = 0;
  long inserts = 0;              // insertion events executed from the queue
  long immediates = 0;           // insertions performed directly at the sweep position
  long lawson_flips = 0;         // edge flips executed
  long stale_events = 0;         // popped events that failed revalidation
  long nonconvex_skips = 0;      // certificate roots with a non-convex quad (expected 0)
  long strict_immediates = 0;    // cells already strictly open when first located —
                                 // legitimate for members located in the outer void,
                                 // where box corners dominate and the unclipped power
                                 // cell opens above the wave top
  long noncospherical_tetras = 0;// skipped tetra candidates lacking a common ball
  long survivor_closures = 0;    // membership intervals closed on surviving edges
  long monotone_violations = 0;  // memberships that reopened at a lower scale (expected 0)
  long recreations = 0;          // simplex keys created twice (expected 0)
  long late_roots = 0;           // armed roots above the sweep position (expected 0)
  long tentative_clamped = 0;    // projected births clamped to the creation scale
  long refinement_casualties = 0;// member simplices removed by a Steiner insert (expected 0)
  long refinement_skips = 0;     // over-threshold cells left unrefined for lack of separation margin (expected 0)
  long final_emits = 0;          // simplices emitted by the final pass
  long final_skips = 0;          // never-member survivors skipped by the final pass
  long steiners = 0;             // Steiner vertices inserted by refinement
  long separation_violations = 0;// Steiner inserts closer than twice the wave scale
};

class KineticCore {
 public:
  explicit KineticCore(Q eps, BuildOptions opt = BuildOptions{})
      : eps_(std::move(eps)), opt_(opt) {
    if (sgn(eps_) <= 0) throw std::runtime_error("epsilon must be > 0");
  }

  // ---- setup -------------------------------------------------------------

  int add_box_corner(const Pt& p) {
    int vid = tri_.add_vertex(p, WeightClass::unfrozen());
    meta_.push_back(Meta{});
    return vid;
  }

  void init_box(int bl, int br, int tl, int tr) {
    tri_.init_box(bl, br, tl, tr);
    for (int v : {bl, br, tl, tr}) meta_[v].inserted = true;
    box_min_ = tri_.point(bl);
    box_max_ = tri_.point(tr);
  }

  // Corners of the bounding box; every vertex the core ever holds must stay
  // inside (points on the boundary are allowed — they join the hull).
  const Pt& box_min() const { return box_min_; }
  const Pt& box_max() const { return box_max_; }

  // lambda2: permanent freezing value; nullopt for the never-frozen point.
  int add_input(const Pt& p, std::optional<Q> lambda2, int input_id,
                int pred_vid = -1) {
    int vid = tri_.add_vertex(p, WeightClass::unfrozen());
    Meta m;
    m.input_id = input_id;
    m.lam2 = std::move(lambda2);
    m.pred_vid = pred_vid;
    meta_.push_back(std::move(m));
    if (input_id >= static_cast<int>(input_vid_.size()))
      input_vid_.resize(input_id + 1, -1);
    input_vid_[input_id] = vid;
    return vid;
  }

  int add_steiner(const Pt& p) {
    int vid = tri_.add_vertex(p, WeightClass::unfrozen());
    meta_.push_back(Meta{});
    return vid;
  }

  // Structural insertion outside any wave (all weights zero).
  void insert_plain(int vid, const Q& s) {
    if (wave_active_) throw std::logic_error("plain insert during a wave");
    current_s_ = s;
    insert_now(vid, s, false);
  }

  // Steiner insertion at the current sweep position (between waves). Checks
  // the separation condition dist > 2·α against the nearest existing vertex.
  void insert_steiner(int vid) {
    if (wave_active_) throw std::logic_error("refinement during a wave");
    insert_now(vid, current_s_, true);
    ++stats_.steiners;
    Q nn2 = link_nn2(vid);
    if (!(nn2 > 4 * current_s_)) ++stats_.separation_violations;
  }

  // ---- point location ----------------------------------------------------

  // Containing triangle of an uninserted vertex: straight-line walk from the
  // nearest inserted predecessor. Ties on an edge resolve to the
  // lexicographically smallest triangle; landing on a vertex is an error.
  int locate_for(int vid) const {
    const Pt& q = tri_.point(vid);
    int start = -1;
    for (int h = meta_[vid].pred_vid; h >= 0; h = meta_[h].pred_vid)
      if (meta_[h].inserted) {
        start = tri_.incident_tri(h);
        break;
      }
    Triangulation::Locate loc =
        (start >= 0 && tri_.alive(start)) ? tri_.locate(q, start)
                                          : tri_.locate(q);
    switch (loc.kind) {
      case Triangulation::Locate::ON_VERTEX:
        throw std::runtime_error("duplicate point");
      case Triangulation::Locate::IN_TRI:
        return loc.t;
      case Triangulation::Locate::ON_EDGE:
        return lex_smaller_tri(loc.t, loc.t2);
      case Triangulation::Locate::OUTSIDE:
        return loc.t;  // the infinite triangle it falls in
    }
    throw std::logic_error("unreachable");
  }

  // ---- the wave ----------------------------------------------------------

  // Sweeps the scale from s_top down to s_bot, inserting every member the
  // moment its cell opens and flipping failed certificates, in decreasing
  // scale with (scale, kind, vertex-tuple) tie-breaks. Returns the entries
  // finalized during this call. stop_at (∈ (s_bot, s_top]) halts the sweep
  // mid-wave with weights still active — used to inspect slices.
  std::vector<FiltrationEntry> run_wave(const std::vector<int>& member_vids,
                                        const Q& s_top, const Q& s_bot,
                                        std::optional<Q> stop_at = {}) {
    if (wave_active_) throw std::logic_error("nested wave");
    Q g = 1 + eps_;
    Q expect_top = g * g * s_bot;
    if (s_top != expect_top) throw std::runtime_error("invalid wave scales");
    if (!pq_.empty()) throw std::logic_error("event queue not empty");
    for (int v : member_vids) {
      if (meta_[v].inserted || !meta_[v].lam2 || *meta_[v].lam2 != s_bot)
        throw std::runtime_error("inconsistent two-class regime");
    }
    ++stats_.waves;
    std::vector<FiltrationEntry> out;
    wave_out_ = &out;
    wave_active_ = true;
    wave_s_top_ = s_top;
    wave_s_bot_ = s_bot;
    current_s_ = s_top;
    for (int v : member_vids)
      tri_.set_wclass(v, WeightClass::frozen_at(s_bot));

    // Locate members; cells already open at the top insert immediately,
    // the rest get their certificate root queued.
    for (int v : member_vids) {
      int bt = locate_for(v);
      set_bucket(v, bt);
      schedule_uninserted(v, s_top);
    }
    drain_immediates();

    Q floor = s_bot;
    bool stopped_early = false;
    if (stop_at && *stop_at > s_bot) {
      floor = *stop_at;
      stopped_early = true;
    }
    while (!pq_.empty() && pq_.top().s > floor) {
      Event ev = pq_.top();
      pq_.pop();
      current_s_ = ev.s;
      if (ev.kind == 0)
        pop_insert(ev);
      else
        pop_lawson(ev);
      drain_immediates();
    }

    if (!stopped_early) {
      current_s_ = s_bot;
      for (int v : member_vids)
        if (!meta_[v].inserted)
          throw std::logic_error("wave member not inserted by wave end");
      for (int v : member_vids) tri_.set_wclass(v, WeightClass::unfrozen());
      pq_ = decltype(pq_)();  // roots at exactly s_bot are inert ties
      armed_.clear();
      for (int v : member_vids) clear_bucket(v);
      wave_active_ = false;
    } else {
      current_s_ = floor;
    }
    wave_out_ = nullptr;
    return out;
  }

  // Emits every still-live input simplex that was never finalized. The sweep
  // stops at the last wave's bottom; below it the structure and all weights
  // are static, so a fresh zero-weight threshold at or below the sweep
  // position is the exact birth. A simplex whose threshold lies above the
  // sweep position was live only at already-swept scales: if its membership
  // was ever confirmed, the lapse happened under the structure recorded by
  // its last member-state refresh, so the held projection (clamped by the
  // confirmation scale) is the birth — recomputing it against the final
  // structure would backdate it through changes that postdate the lapse. A
  // simplex never confirmed and not reachable was never a member at all.
  void final_pass() {
    if (wave_active_) throw std::logic_error("final pass during a wave");
    for (auto& kv : live_) {
      const std::vector<int>& key = kv.first;
      Live& L = kv.second;
      Q tau = plain_threshold(key);
      bool reachable = tau <= current_s_;
      std::optional<Q> b;
      if (reachable) {
        b = tau;
      } else if (L.seen) {
        b = L.tentative;
        if (*b > *L.seen) {
          b = *L.seen;
          ++stats_.tentative_clamped;
        }
      }
      auto em = emitted_.find(key);
      if (em == emitted_.end()) {
        if (b) {
          emit(key, *b);
          ++stats_.final_emits;
        } else {
          ++stats_.final_skips;
        }
      } else if (b && *b < em->second) {
        // A birth below an already-recorded one: membership reopened with no
        // structural event in between.
        ++stats_.monotone_violations;
        emit(key, *b);
      }
    }
  }

  // ---- queries -----------------------------------------------------------

  const Q& current_s() const { return current_s_; }
  bool wave_active() const { return wave_active_; }
  const Triangulation& structure() const { return tri_; }
  Triangulation& structure() { return tri_; }
  BuildStats& stats() { return stats_; }
  const BuildStats& stats() const { return stats_; }
  bool inserted(int vid) const { return meta_.at(vid).inserted; }
  int vid_of_input(int input_id) const { return input_vid_.at(input_id); }
  int input_of_vid(int vid) const { return meta_.at(vid).input_id; }

  // All finalized entries (vertices are the builder's responsibility).
  std::vector<FiltrationEntry> entries() const {
    std::vector<FiltrationEntry> out;
    out.reserve(emitted_.size());
    for (const auto& kv : emitted_)
      out.push_back(FiltrationEntry{kv.first, kv.second});
    return out;
  }

  // Projected birth of a simplex of inserted input vertices under the
  // current combinatorial structure, at zero weights (exact once every
  // participant's weight has melted; a projection mid-wave).
  Q birth_time(const std::vector<int>& input_ids) const {
    if (input_ids.empty() || input_ids.size() > 3)
      throw std::runtime_error("simplex not in current structure");
    std::vector<int> vids;
    for (int i : input_ids) {
      if (i < 0 || i >= static_cast<int>(input_vid_.size()) ||
          input_vid_[i] < 0 || !meta_[input_vid_[i]].inserted)
        throw std::runtime_error("simplex not in current structure");
      vids.push_back(input_vid_[i]);
    }
    if (vids.size() == 1) return Q(0);
    if (vids.size() == 2) {
      if (!tri_.edge_tris(vids[0], vids[1]))
        throw std::runtime_error("simplex not in current structure");
      return plain_tau_edge(vids[0], vids[1],
                            structural_opposites(vids[0], vids[1]));
    }
    auto et = tri_.edge_tris(vids[0], vids[1]);
    if (!et) throw std::runtime_error("simplex not in current structure");
    for (int t : {et->first, et->second}) {
      if (tri_.is_ghost(t)) continue;
      if (Triangulation::vert_index(tri_.tri(t), vids[2]) >= 0)
        return plain_circum_r2(vids[0], vids[1], vids[2]);
    }
    throw std::runtime_error("simplex not in current structure");
  }

  // The slice at scale s under the current structure: every input simplex
  // (dim ≤ 2) whose vertices' clipped cells share a point at s. The caller
  // is responsible for having swept down to s.
  SliceComplex live_slice(const Q& s) const {
    SliceComplex sc;
    for (int vid = 0; vid < tri_.num_verts(); ++vid) {
      if (meta_[vid].input_id < 0 || !meta_[vid].inserted) continue;
      if (member_vertex(vid, s))
        sc.simplices.insert({meta_[vid].input_id});
    }
    std::set<std::pair<int, int>> edges;
    for (int t = 0; t < static_cast<int>(tri_.tris().size()); ++t) {
      if (!tri_.alive(t) || tri_.is_ghost(t)) continue;
      const auto& T = tri_.tri(t);
      bool all_input = input_only(T);
      if (all_input && member_tri(T.v[0], T.v[1], T.v[2], s))
        sc.simplices.insert(key_of(T.v[0], T.v[1], T.v[2]));
      for (int i = 0; i < 3; ++i) {
        int a = T.v[i], b = T.v[(i + 1) % 3];
        if (meta_[a].input_id < 0 || meta_[b].input_id < 0) continue;
        edges.insert(std::minmax(a, b));
      }
    }
    for (const auto& e : edges) {
      if (member_edge(e.first, e.second,
                      structural_opposites(e.first, e.second), s))
        sc.simplices.insert(key_of(e.first, e.second));
    }
    return sc;
  }

  // True when no interior edge's certificate is strictly violated at the
  // current weights — the wave-end sanity hook.
  bool structure_valid(const Q& s) const {
    for (int t = 0; t < static_cast<int>(tri_.tris().size()); ++t) {
      if (!tri_.alive(t) || tri_.is_ghost(t)) continue;
      const auto& T = tri_.tri(t);
      for (int i = 0; i < 3; ++i) {
        int nb = T.nbr[i];
        if (nb < 0 || tri_.is_ghost(nb)) continue;
        int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
        int d = opposite_vertex(nb, a, b);
        if (power_incircle(tri_.point(T.v[0]), tri_.wclass(T.v[0]),
                           tri_.point(T.v[1]), tri_.wclass(T.v[1]),
                           tri_.point(T.v[2]), tri_.wclass(T.v[2]),
                           tri_.point(d), tri_.wclass(d), s) > 0)
          return false;
      }
    }
    return true;
  }

  // Squared distance from vid to its nearest link neighbor (its nearest
  // other vertex, by the empty-ball property).
  Q link_nn2(int vid) const {
    std::optional<Q> best;
    for (int t : tri_.star(vid)) {
      const auto& T = tri_.tri(t);
      for (int v : T.v) {
        if (v == vid || v == Triangulation::GHOST) continue;
        Q d2 = dist2(tri_.point(vid), tri_.point(v));
        if (!best || d2 < *best) best = d2;
      }
    }
    if (!best) throw std::logic_error("isolated vertex");
    return *best;
  }

 private:
  struct Meta {
    int input_id = -1;
    std::optional<Q> lam2;
    int pred_vid = -1;
    bool inserted = false;
  };

  struct Live {
    bool in = false;
    Q tentative;   // projected lapse scale: the zero-weight threshold
    Q s_created;   // scale at which the simplex became structural
    // Smallest scale at which membership was positively confirmed — by a
    // direct evaluation or as the face of a confirmed coface. Every
    // projected emission is clamped to it, which keeps faces no later than
    // their cofaces even when the projection is stale.
    std::optional<Q> seen;
  };

  struct Event {
    Q s;
    int kind;  // 0 = insertion, 1 = edge flip
    int a, b;  // insertion: (vid, -1); flip: edge vids, a < b
  };
  struct EventOrder {
    // priority_queue pops the largest; an event is "larger" when it comes
    // first: higher scale, then smaller kind, then smaller vertex tuple.
    bool operator()(const Event& x, const Event& y) const {
      int c = cmp(x.s, y.s);
      if (c != 0) return c < 0;
      if (x.kind != y.kind) return x.kind > y.kind;
      if (x.a != y.a) return x.a > y.a;
      return x.b > y.b;
    }
  };

  Q eps_;
  BuildOptions opt_;
  Triangulation tri_;
  std::vector<Meta> meta_;
  std::vector<int> input_vid_;
  BuildStats stats_;
  Pt box_min_, box_max_;

  Q current_s_ = Q(0);
  bool wave_active_ = false;
  Q wave_s_top_ = Q(0), wave_s_bot_ = Q(0);

  std::priority_queue<Event, std::vector<Event>, EventOrder> pq_;
  std::map<std::pair<int, int>, Q> armed_;  // latest certificate root per edge
  std::map<int, int> bucket_;               // uninserted vid -> containing tri
  std::map<int, std::vector<int>> tri_buckets_;
  std::set<int> imm_;                       // pending immediate insertions

  std::map<std::vector<int>, Live> live_;   // input-only structural simplices
  std::map<std::vector<int>, Q> emitted_;
  std::set<std::vector<int>> ever_created_;
  std::vector<FiltrationEntry>* wave_out_ = nullptr;

  // ---- small helpers -----------------------------------------------------

  bool input_only(const Triangulation::Tri& T) const {
    for (int v : T.v)
      if (v == Triangulation::GHOST || meta_[v].input_id < 0) return false;
    return true;
  }

  std::vector<int> key_of(int u, int v) const {
    std::vector<int> k{meta_[u].input_id, meta_[v].input_id};
    std::sort(k.begin(), k.end());
    return k;
  }
  std::vector<int> key_of(int u, int v, int w) const {
    std::vector<int> k{meta_[u].input_id, meta_[v].input_id,
                       meta_[w].input_id};
    std::sort(k.begin(), k.end());
    return k;
  }

  std::vector<int> vids_of_key(const std::vector<int>& key) const {
    std::vector<int> v;
    for (int i : key) v.push_back(input_vid_.at(i));
    return v;
  }

  int lex_smaller_tri(int t1, int t2) const {
    auto rank = [this](int t) {
      std::array<int, 3> v = tri_.tri(t).v;
      for (int& x : v)
        if (x == Triangulation::GHOST) x = tri_.num_verts();  // ghosts last
      std::sort(v.begin(), v.end());
      return v;
    };
    if (tri_.is_ghost(t1) != tri_.is_ghost(t2))
      return tri_.is_ghost(t1) ? t2 : t1;
    return rank(t1) <= rank(t2) ? t1 : t2;
  }

  int opposite_vertex(int t, int a, int b) const {
    const auto& T = tri_.tri(t);
    for (int i = 0; i < 3; ++i) {
      int p = T.v[(i + 1) % 3], r = T.v[(i + 2) % 3];
      if ((p == a && r == b) || (p == b && r == a)) return T.v[i];
    }
    throw std::logic_error("edge not in triangle");
  }

  // Opposite vertices of the (≤2) real triangles currently on edge (a, b).
  std::vector<int> structural_opposites(int a, int b) const {
    auto et = tri_.edge_tris(a, b);
    if (!et) throw std::logic_error("edge not in structure");
    std::vector<int> opp;
    for (int t : {et->first, et->second})
      if (!tri_.is_ghost(t)) opp.push_back(opposite_vertex(t, a, b));
    return opp;
  }

  // ---- membership and thresholds ------------------------------------------

  Q tri_orthoradius2(int v0, int v1, int v2, const Q& s) const {
    return orthoball_tri(tri_.point(v0), tri_.wclass(v0), tri_.point(v1),
                         tri_.wclass(v1), tri_.point(v2), tri_.wclass(v2), s)
        .r2;
  }

  bool member_tri(int v0, int v1, int v2, const Q& s) const {
    return tri_orthoradius2(v0, v1, v2, s) <= s;
  }

  // Edge membership given the opposite vertices of its incident real
  // triangles: the dual face is the interval of the weighted bisector
  // bounded by the incident orthocenters, so the minimum of the larger power
  // over it sits at the bisector foot when the foot is not cut off, else at
  // an incident orthocenter.
  bool member_edge(int a, int b, const std::vector<int>& opp,
                   const Q& s) const {
    Orthoball ob = orthoball_edge(tri_.point(a), tri_.wclass(a), tri_.point(b),
                                  tri_.wclass(b), s);
    if (ob.r2 <= s) {
      bool foot_ok = true;
      for (int d : opp)
        if (power_sq(ob.center, tri_.point(d), tri_.wclass(d), s) < ob.r2) {
          foot_ok = false;
          break;
        }
      if (foot_ok) return true;
    }
    for (int d : opp)
      if (member_tri(a, b, d, s)) return true;
    return false;
  }

  // Vertex membership: the nearest point of the (possibly weighted) cell to
  // the site is the site itself when no link neighbor beats it there, else a
  // bisector foot or an incident orthocenter; squared weight ≤ s always, so
  // a site interior to its cell is always a member.
  bool member_vertex(int vid, const Q& s) const {
    const Pt& p = tri_.point(vid);
    const WeightClass& w = tri_.wclass(vid);
    Q wp = wsq_at(w, s);
    std::vector<int> star = tri_.star(vid);
    std::set<int> link;
    bool site_ok = true;
    for (int t : star) {
      const auto& T = tri_.tri(t);
      for (int v : T.v)
        if (v != vid && v != Triangulation::GHOST) link.insert(v);
    }
    for (int u : link)
      if (power_sq(p, tri_.point(u), tri_.wclass(u), s) < wp) {
        site_ok = false;
        break;
      }
    if (site_ok) return wp <= s;
    for (int t : star) {
      if (tri_.is_ghost(t)) continue;
      const auto& T = tri_.tri(t);
      if (tri_orthoradius2(T.v[0], T.v[1], T.v[2], s) <= s) return true;
    }
    for (int u : link) {
      if (!tri_.edge_tris(vid, u)) continue;
      if (member_edge_foot_only(vid, u, s)) return true;
    }
    return false;
  }

  bool member_edge_foot_only(int a, int b, const Q& s) const {
    Orthoball ob = orthoball_edge(tri_.point(a), tri_.wclass(a), tri_.point(b),
                                  tri_.wclass(b), s);
    if (!(ob.r2 <= s)) return false;
    for (int d : structural_opposites(a, b))
      if (power_sq(ob.center, tri_.point(d), tri_.wclass(d), s) < ob.r2)
        return false;
    return true;
  }

  Q plain_circum_r2(int v0, int v1, int v2) const {
    auto u = WeightClass::unfrozen();
    return orthoball_tri(tri_.point(v0), u, tri_.point(v1), u, tri_.point(v2),
                         u, Q(0))
        .r2;
  }

  // Zero-weight membership threshold of an edge: the diametral value when
  // the midpoint is not cut off by an incident opposite vertex, else the
  // smaller incident circumradius.
  Q plain_tau_edge(int a, int b, const std::vector<int>& opp) const {
    const Pt &pa = tri_.point(a), &pb = tri_.point(b);
    Q L2 = dist2(pa, pb);
    Q quarter = L2 / 4;
    quarter.canonicalize();
    Pt mid{(pa.x + pb.x) / 2, (pa.y + pb.y) / 2};
    mid.x.canonicalize();
    mid.y.canonicalize();
    bool gabriel = true;
    for (int d : opp)
      if (dist2(mid, tri_.point(d)) < quarter) {
        gabriel = false;
        break;
      }
    if (gabriel) return quarter;
    std::optional<Q> best;
    for (int d : opp) {
      Q r2 = plain_circum_r2(a, b, d);
      if (!best || r2 < *best) best = r2;
    }
    if (!best) throw std::logic_error("edge with no real side");
    return *best;
  }

  Q plain_threshold(const std::vector<int>& key) const {
    std::vector<int> v = vids_of_key(key);
    if (v.size() == 2)
      return plain_tau_edge(v[0], v[1], structural_opposites(v[0], v[1]));
    return plain_circum_r2(v[0], v[1], v[2]);
  }

  // ---- emission ----------------------------------------------------------

  void emit(const std::vector<int>& key, const Q& s) {
    for (int id : key)
      if (id < 0) throw std::logic_error("synthetic vertex in emission");
    auto it = emitted_.find(key);
    if (it == emitted_.end()) {
      emitted_.emplace(key, s);
      if (wave_out_) wave_out_->push_back(FiltrationEntry{key, s});
      return;
    }
    if (s < it->second) {
      it->second = s;  // births record the minimum membership scale
      if (wave_out_)
        for (auto& e : *wave_out_)
          if (e.verts == key) e.birth = s;
    }
  }

  // Record that `key` was positively a member at scale s: clamp its future
  // projected emission, and repair an already-recorded larger birth.
  void witness(const std::vector<int>& key, const Q& s) {
    auto it = live_.find(key);
    if (it == live_.end()) throw std::logic_error("live entry missing");
    Live& L = it->second;
    if (!L.seen || s < *L.seen) L.seen = s;
    auto em = emitted_.find(key);
    if (em != emitted_.end() && em->second > s) {
      ++stats_.monotone_violations;
      emit(key, s);
    }
  }

  // A confirmed member triangle confirms its three edges.
  void witness_tri_faces(const std::vector<int>& tri_key, const Q& s) {
    for (int drop = 0; drop < 3; ++drop) {
      std::vector<int> ek;
      for (int i = 0; i < 3; ++i)
        if (i != drop) ek.push_back(tri_key[i]);
      witness(ek, s);
    }
  }

  void handle_removed(const std::vector<int>& key, bool member_now,
                      const Q& s, bool refining) {
    auto it = live_.find(key);
    if (it == live_.end()) throw std::logic_error("live entry missing");
    Live L = it->second;
    if (member_now && key.size() == 3) witness_tri_faces(key, s);
    live_.erase(key);
    if (member_now) {
      emit(key, s);
      if (refining) {
        ++stats_.refinement_casualties;
        if (std::getenv("SDF_TRACE")) {
          std::fprintf(stderr, "CASUALTY dim=%zu s=%.9g key=", key.size() - 1,
                       s.get_d());
          for (int id : key) std::fprintf(stderr, "%d ", id);
          std::fprintf(stderr, "\n");
        }
      }
      return;
    }
    if (L.seen) {
      Q b = L.tentative;
      if (b > *L.seen) {
        b = *L.seen;
        ++stats_.tentative_clamped;
      }
      emit(key, b);
    }
  }

  // A surviving edge whose local structure changed: refresh its membership
  // state. A closure (member → non-member) emits nothing — the lapse already
  // happened somewhere in (s, seen] under the structure recorded by the last
  // member-state refresh, so the projection held in `tentative` (clamped by
  // `seen`) is the right birth, and it is paid out when the edge is removed
  // or by the final pass. Emitting the observation scale here would understate
  // the birth by however long the edge went untouched.
  void handle_survivor_edge(int a, int b, const Q& s) {
    std::vector<int> key = key_of(a, b);
    auto it = live_.find(key);
    if (it == live_.end()) throw std::logic_error("live entry missing");
    Live& L = it->second;
    bool m = member_edge(a, b, structural_opposites(a, b), s);
    if (m) {
      witness(key, s);
      L.in = true;
      L.tentative = plain_tau_edge(a, b, structural_opposites(a, b));
    } else if (L.in) {
      ++stats_.survivor_closures;
      L.in = false;
    }
  }

  void register_created(const std::vector<int>& key, bool in_now, Q tentative,
                        const Q& s) {
    if (!ever_created_.insert(key).second) ++stats_.recreations;
    if (live_.count(key)) throw std::logic_error("created while live");
    Live L;
    L.in = in_now;
    L.tentative = std::move(tentative);
    L.s_created = s;
    if (in_now) L.seen = s;
    live_.emplace(key, std::move(L));
  }

  // ---- change classification ----------------------------------------------

  // Processes one structural change at scale s. new_vid ≥ 0 marks a (1,3)
  // insertion of that vertex; refining marks a Steiner insertion between
  // waves.
  void classify_change(const Triangulation::Change& ch, const Q& s,
                       int new_vid, bool refining) {
    // A triangle id appearing in both lists was created and flipped away
    // within this very change: it neither existed before nor exists after,
    // so it must not contribute to either side of the diff.
    std::set<int> rm(ch.removed.begin(), ch.removed.end());
    std::set<int> cr(ch.created.begin(), ch.created.end());
    std::map<std::vector<int>, std::array<int, 3>> rt, ct;  // input-only tris
    std::set<std::pair<int, int>> er, ec;                   // input-only edges
    for (int t : rm) {
      if (cr.count(t)) continue;
      const auto& T = tri_.tri(t);
      if (Triangulation::is_ghost_tri(T)) continue;
      for (int i = 0; i < 3; ++i) {
        int a = T.v[i], b = T.v[(i + 1) % 3];
        if (meta_[a].input_id >= 0 && meta_[b].input_id >= 0)
          er.insert(std::minmax(a, b));
      }
      if (input_only(T)) rt.emplace(key_of(T.v[0], T.v[1], T.v[2]), T.v);
    }
    for (int t : cr) {
      if (rm.count(t)) continue;
      const auto& T = tri_.tri(t);
      if (Triangulation::is_ghost_tri(T)) continue;
      for (int i = 0; i < 3; ++i) {
        int a = T.v[i], b = T.v[(i + 1) % 3];
        if (meta_[a].input_id >= 0 && meta_[b].input_id >= 0)
          ec.insert(std::minmax(a, b));
      }
      if (input_only(T)) ct.emplace(key_of(T.v[0], T.v[1], T.v[2]), T.v);
    }

    // 3-simplices: a flipped quadruple whose four cells share a point.
    bool rule_top_ok =
        opt_.paper_radius_rule || !wave_active_ || s <= wave_s_top_;
    if (new_vid >= 0 && meta_[new_vid].input_id >= 0) {
      const Pt& q = tri_.point(new_vid);
      const WeightClass& wq = tri_.wclass(new_vid);
      for (const auto& kv : rt) {
        const auto& v = kv.second;
        if (v[0] == new_vid || v[1] == new_vid || v[2] == new_vid) continue;
        int sign = power_incircle(tri_.point(v[0]), tri_.wclass(v[0]),
                                  tri_.point(v[1]), tri_.wclass(v[1]),
                                  tri_.point(v[2]), tri_.wclass(v[2]), q, wq,
                                  s);
        if (sign != 0) {
          ++stats_.noncospherical_tetras;
          continue;
        }
        if (tri_orthoradius2(v[0], v[1], v[2], s) <= s && rule_top_ok) {
          std::vector<int> tk = kv.first;
          tk.push_back(meta_[new_vid].input_id);
          std::sort(tk.begin(), tk.end());
          emit(tk, s);
        }
      }
    } else if (new_vid < 0 && !refining && rt.size() == 2) {
      // A (2,2) flip of an all-input quadruple (cospherical at its root).
      std::set<int> quad;
      for (const auto& kv : rt)
        quad.insert(kv.first.begin(), kv.first.end());
      if (quad.size() == 4 && rt.size() == ch.removed.size()) {
        const auto& v = rt.begin()->second;
        if (tri_orthoradius2(v[0], v[1], v[2], s) <= s && rule_top_ok)
          emit(std::vector<int>(quad.begin(), quad.end()), s);
      }
    }

    // Removed triangles (structure-free membership: their own orthoball).
    for (const auto& kv : rt) {
      if (ct.count(kv.first)) continue;
      const auto& v = kv.second;
      handle_removed(kv.first, member_tri(v[0], v[1], v[2], s), s, refining);
    }

    // Removed edges: both former sides are among the removed triangles.
    for (const auto& e : er) {
      if (ec.count(e)) continue;
      std::vector<int> opp;
      for (int t : rm) {
        if (cr.count(t)) continue;
        const auto& T = tri_.tri(t);
        if (Triangulation::is_ghost_tri(T)) continue;
        int i = Triangulation::vert_index(T, e.first);
        int j = Triangulation::vert_index(T, e.second);
        if (i >= 0 && j >= 0) opp.push_back(T.v[3 - i - j]);
      }
      handle_removed(key_of(e.first, e.second),
                     member_edge(e.first, e.second, opp, s), s, refining);
    }

    // Surviving edges: refresh or close their membership interval.
    for (const auto& e : er) {
      if (!ec.count(e)) continue;
      handle_survivor_edge(e.first, e.second, s);
    }

    // Created edges and triangles become live (edges first so a created
    // member triangle can confirm them as faces).
    for (const auto& e : ec) {
      if (er.count(e)) continue;
      auto opp = structural_opposites(e.first, e.second);
      register_created(key_of(e.first, e.second),
                       member_edge(e.first, e.second, opp, s),
                       plain_tau_edge(e.first, e.second, opp), s);
    }
    for (const auto& kv : ct) {
      if (rt.count(kv.first)) continue;
      const auto& v = kv.second;
      bool in_now = member_tri(v[0], v[1], v[2], s);
      register_created(kv.first, in_now, plain_circum_r2(v[0], v[1], v[2]), s);
      if (in_now) witness_tri_faces(kv.first, s);
    }
  }

  // ---- events ------------------------------------------------------------

  void set_bucket(int vid, int t) {
    bucket_[vid] = t;
    tri_buckets_[t].push_back(vid);
  }
  void clear_bucket(int vid) {
    auto it = bucket_.find(vid);
    if (it == bucket_.end()) return;
    auto& lst = tri_buckets_[it->second];
    lst.erase(std::remove(lst.begin(), lst.end(), vid), lst.end());
    bucket_.erase(it);
  }

  // Queue the insertion root of an uninserted, located vertex — or mark it
  // immediate when its cell is already open at scale s.
  void schedule_uninserted(int vid, const Q& s) {
    int bt = bucket_.at(vid);
    const auto& T = tri_.tri(bt);
    const Pt& q = tri_.point(vid);
    const WeightClass& wq = tri_.wclass(vid);
    int det = power_incircle(tri_.point(T.v[0]), tri_.wclass(T.v[0]),
                             tri_.point(T.v[1]), tri_.wclass(T.v[1]),
                             tri_.point(T.v[2]), tri_.wclass(T.v[2]), q, wq,
                             s);
    if (det >= 0) {
      if (det > 0) {
        ++stats_.strict_immediates;
        if (std::getenv("SDF_TRACE"))
          std::fprintf(stderr,
                       "STRICT vid=%d s=%.9g wave=%d s_top=%.9g tri=(%d,%d,%d)\n",
                       vid, s.get_d(), int(wave_active_), wave_s_top_.get_d(),
                       T.v[0], T.v[1], T.v[2]);
      }
      imm_.insert(vid);
      return;
    }
    auto root = flip_scale(tri_.point(T.v[0]), tri_.wclass(T.v[0]),
                           tri_.point(T.v[1]), tri_.wclass(T.v[1]),
                           tri_.point(T.v[2]), tri_.wclass(T.v[2]), q, wq);
    if (!root) throw std::logic_error("insertion root vanished");
    if (*root > s) {
      ++stats_.late_roots;
      imm_.insert(vid);
      return;
    }
    pq_.push(Event{*root, 0, vid, -1});
  }

  void drain_immediates() {
    while (!imm_.empty()) {
      int v = *imm_.begin();
      imm_.erase(imm_.begin());
      if (meta_[v].inserted) continue;
      ++stats_.immediates;
      insert_now(v, current_s_, false);
    }
  }

  void pop_insert(const Event& ev) {
    int v = ev.a;
    if (meta_[v].inserted) {
      ++stats_.stale_events;
      return;
    }
    int bt = bucket_.at(v);
    if (!tri_.alive(bt)) {
      ++stats_.stale_events;
      return;
    }
    const auto& T = tri_.tri(bt);
    auto root = flip_scale(tri_.point(T.v[0]), tri_.wclass(T.v[0]),
                           tri_.point(T.v[1]), tri_.wclass(T.v[1]),
                           tri_.point(T.v[2]), tri_.wclass(T.v[2]),
                           tri_.point(v), tri_.wclass(v));
    if (!root || *root != ev.s) {
      ++stats_.stale_events;
      return;
    }
    ++stats_.inserts;
    insert_now(v, ev.s, false);
  }

  void pop_lawson(const Event& ev) {
    auto am = armed_.find({ev.a, ev.b});
    if (am == armed_.end() || am->second != ev.s) {
      ++stats_.stale_events;
      return;
    }
    auto et = tri_.edge_tris(ev.a, ev.b);
    if (!et || tri_.is_ghost(et->first) || tri_.is_ghost(et->second)) {
      ++stats_.stale_events;
      return;
    }
    int t1 = et->first, t2 = et->second;
    // Orient as do_flip will: T1 = (c, a, b) with the edge opposite c.
    const auto& T1 = tri_.tri(t1);
    int i1 = -1;
    for (int i = 0; i < 3; ++i)
      if (T1.nbr[i] == t2) i1 = i;
    if (i1 < 0) throw std::logic_error("edge sides not adjacent");
    int c = T1.v[i1], a = T1.v[(i1 + 1) % 3], b = T1.v[(i1 + 2) % 3];
    int d = opposite_vertex(t2, a, b);
    auto root = flip_scale(tri_.point(c), tri_.wclass(c), tri_.point(a),
                           tri_.wclass(a), tri_.point(b), tri_.wclass(b),
                           tri_.point(d), tri_.wclass(d));
    if (!root || *root != ev.s) {
      ++stats_.stale_events;
      return;
    }
    if (orient2(tri_.point(c), tri_.point(a), tri_.point(d)) <= 0 ||
        orient2(tri_.point(c), tri_.point(d), tri_.point(b)) <= 0) {
      ++stats_.nonconvex_skips;
      return;
    }
    armed_.erase(am);
    Triangulation::Change ch = tri_.flip(t1, t2);
    ++stats_.lawson_flips;
    classify_change(ch, ev.s, -1, false);
    arm_after_change(ch.created);
    relocate_buckets(ch.removed);
  }

  void insert_now(int vid, const Q& s, bool refining) {
    clear_bucket(vid);
    imm_.erase(vid);
    Triangulation::Change ch = tri_.insert(vid, s);
    meta_[vid].inserted = true;
    classify_change(ch, s, vid, refining);
    arm_after_change(ch.created);
    relocate_buckets(ch.removed);
  }

  // Re-arm the certificates of every edge whose quadruple may have changed:
  // the edges of the created triangles. The flipped diagonal itself has a
  // constant-validity side below its (single) root and needs no certificate.
  void arm_after_change(const std::vector<int>& created) {
    std::set<std::pair<int, int>> edges;
    for (int t : created) {
      if (!tri_.alive(t)) continue;  // already re-flipped within a cascade
      const auto& T = tri_.tri(t);
      if (Triangulation::is_ghost_tri(T)) continue;
      for (int i = 0; i < 3; ++i)
        edges.insert(std::minmax(T.v[i], T.v[(i + 1) % 3]));
    }
    for (const auto& e : edges) {
      auto et = tri_.edge_tris(e.first, e.second);
      if (!et || tri_.is_ghost(et->first) || tri_.is_ghost(et->second))
        continue;
      int c = opposite_vertex(et->first, e.first, e.second);
      int d = opposite_vertex(et->second, e.first, e.second);
      auto root = flip_scale(tri_.point(c), tri_.wclass(c),
                             tri_.point(e.first), tri_.wclass(e.first),
                             tri_.point(e.second), tri_.wclass(e.second),
                             tri_.point(d), tri_.wclass(d));
      if (!root) continue;
      const Q& r = *root;
      // The certificate holds at the sweep position (the change was
      // legalized there), so a root at or above it means the line is valid
      // everywhere below — only a strictly lower root is a future event.
      // Roots exactly at the sweep position are cocircular ties that the
      // legalization tie rule already adjudicated; re-arming them would
      // flip back and forth forever.
      if (r >= current_s_) continue;
      auto it = armed_.find(e);
      if (it != armed_.end() && it->second == r) continue;
      armed_[e] = r;
      pq_.push(Event{r, 1, e.first, e.second});
    }
  }

  void relocate_buckets(const std::vector<int>& removed) {
    for (int t : removed) {
      auto it = tri_buckets_.find(t);
      if (it == tri_buckets_.end()) continue;
      std::vector<int> vids = std::move(it->second);
      tri_buckets_.erase(it);
      for (int v : vids) {
        bucket_.erase(v);
        if (meta_[v].inserted) continue;
        int start = -1;
        for (int x : tri_.tri(t).v)
          if (x != Triangulation::GHOST) {
            start = tri_.incident_tri(x);
            break;
          }
        const Pt& q = tri_.point(v);
        Triangulation::Locate loc = (start >= 0 && tri_.alive(start))
                                        ? tri_.locate(q, start)
                                        : tri_.locate(q);
        int nb;
        switch (loc.kind) {
          case Triangulation::Locate::ON_VERTEX:
            throw std::runtime_error("duplicate point");
          case Triangulation::Locate::IN_TRI:
            nb = loc.t;
            break;
          case Triangulation::Locate::ON_EDGE:
            nb = lex_smaller_tri(loc.t, loc.t2);
            break;
          default:
            throw std::logic_error("input point outside the hull");
        }
        set_bucket(v, nb);
        schedule_uninserted(v, current_s_);
      }
    }
  }
};

}  // namespace sdf
