#pragma once
// Top-level drivers: the full filtration build and exact slice extraction.
//
// build_filtration runs the complete pipeline: greedy permutation, freezing
// schedule, bounding box, one kinetic wave per freezing class from the
// largest scale down, mesh refinement between consecutive waves, and a final
// pass that emits every simplex still alive at the end of the sweep. The
// result is the Sparse Delaunay Filtration of the input: one entry per input
// simplex, sorted by (birth, dimension, vertex ids).
//
// build_slice replays the same pipeline but stops the sweep exactly at a
// requested squared scale s and reports which input simplices are present
// there — the ground truth the independent small-instance oracle is checked
// against.

#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sdf/filtration.hpp"
#include "sdf/greedy.hpp"
#include "sdf/kinetic.hpp"
#include "sdf/oracle.hpp"
#include "sdf/refine.hpp"
#include "sdf/weights.hpp"

namespace sdf {
namespace detail {

inline void check_duplicates(const std::vector<Pt>& pts) {
  std::set<std::pair<Q, Q>> seen;
  for (const Pt& p : pts)
    if (!seen.insert({p.x, p.y}).second)
      throw std::runtime_error("duplicate point");
}

struct CorePrep {
  KineticCore core;
  WeightSchedule sched;
  std::vector<std::vector<int>> wave_vids;  // aligned with sched.waves
  CorePrep(const Q& eps, const BuildOptions& opt) : core(eps, opt) {}
};

// Shared pipeline head: greedy order, schedule, bounding box (side 16·λ_max
// centered on the input bounding box — λ_max ≥ diam/2 puts the corners well
// clear of every input, and the first refinement round keeps its Steiner
// points separated from them), input registration, and the root insertion.
// Vertex ids: box corners 0–3, then inputs in input order (vid = 4 + index).
inline CorePrep prepare_core(const std::vector<Pt>& pts, const Q& eps,
                             const BuildOptions& opt) {
  CorePrep P(eps, opt);
  GreedyOrder g = greedy_permutation(pts, 0);
  P.sched = make_schedule(pts, g, eps);
  if (P.sched.waves.empty()) throw std::logic_error("no waves for n >= 2");

  Q xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Pt& p : pts) {
    if (p.x < xmin) xmin = p.x;
    if (p.x > xmax) xmax = p.x;
    if (p.y < ymin) ymin = p.y;
    if (p.y > ymax) ymax = p.y;
  }
  Q cx = (xmin + xmax) / 2, cy = (ymin + ymax) / 2;
  cx.canonicalize();
  cy.canonicalize();
  Q h = 8 * P.sched.waves.front().lambda;  // half the box side
  int bl = P.core.add_box_corner(Pt{cx - h, cy - h});
  int br = P.core.add_box_corner(Pt{cx + h, cy - h});
  int tl = P.core.add_box_corner(Pt{cx - h, cy + h});
  int tr = P.core.add_box_corner(Pt{cx + h, cy + h});
  P.core.init_box(bl, br, tl, tr);

  int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    int rank = g.rank_of[i];
    int pred_vid = rank == 0 ? -1 : 4 + g.order[g.pred[rank]];
    std::optional<Q> lam2;
    if (!P.sched.infinite[i]) lam2 = P.sched.lambda2[i];
    P.core.add_input(pts[i], std::move(lam2), i, pred_vid);
  }
  P.core.insert_plain(4 + g.order[0], P.sched.waves.front().s_top);

  for (const auto& w : P.sched.waves) {
    std::vector<int> vids;
    vids.reserve(w.members.size());
    for (int idx : w.members) vids.push_back(4 + idx);
    P.wave_vids.push_back(std::move(vids));
  }
  return P;
}

}  // namespace detail

inline FiltrationStore build_filtration(const std::vector<Pt>& pts,
                                        const Q& eps,
                                        const BuildOptions& opt = BuildOptions{},
                                        BuildStats* stats = nullptr) {
  if (sgn(eps) <= 0) throw std::runtime_error("epsilon must be > 0");
  if (pts.empty()) throw std::runtime_error("empty point set");
  detail::check_duplicates(pts);

  FiltrationStore st;
  st.n = static_cast<int>(pts.size());
  st.eps = eps;
  for (int i = 0; i < st.n; ++i)
    st.entries.push_back(FiltrationEntry{{i}, Q(0)});
  if (st.n == 1) {
    st.finalize();
    if (stats) *stats = BuildStats{};
    return st;
  }

  detail::CorePrep P = detail::prepare_core(pts, eps, opt);
  size_t nw = P.sched.waves.size();
  for (size_t w = 0; w < nw; ++w) {
    const auto& wv = P.sched.waves[w];
    P.core.run_wave(P.wave_vids[w], wv.s_top, wv.lambda2);
    if (w + 1 < nw) refine(P.core, eps);  // never after the last wave
  }
  P.core.final_pass();
  for (const FiltrationEntry& e : P.core.entries()) st.entries.push_back(e);
  st.finalize();
  if (stats) *stats = P.core.stats();
  return st;
}

// The set of input simplices present at squared scale s, computed by running
// the identical pipeline and halting the sweep exactly at s.
inline SliceComplex build_slice(const std::vector<Pt>& pts, const Q& eps,
                                const Q& s,
                                const BuildOptions& opt = BuildOptions{}) {
  if (sgn(eps) <= 0) throw std::runtime_error("epsilon must be > 0");
  if (pts.empty()) throw std::runtime_error("empty point set");
  detail::check_duplicates(pts);
  if (pts.size() == 1) {
    SliceComplex sc;
    if (sgn(s) >= 0) sc.simplices.insert({0});
    return sc;
  }

  detail::CorePrep P = detail::prepare_core(pts, eps, opt);
  size_t nw = P.sched.waves.size();
  for (size_t w = 0; w < nw; ++w) {
    const auto& wv = P.sched.waves[w];
    if (s > wv.s_top) break;  // in the static gap above this wave
    if (s > wv.lambda2) {
      P.core.run_wave(P.wave_vids[w], wv.s_top, wv.lambda2, s);
      return P.core.live_slice(s);
    }
    P.core.run_wave(P.wave_vids[w], wv.s_top, wv.lambda2);
    if (w + 1 < nw) refine(P.core, eps);
  }
  return P.core.live_slice(s);
}

}  // namespace sdf
