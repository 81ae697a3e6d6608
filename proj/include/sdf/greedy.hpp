#pragma once
// Greedy permutation with insertion radii and nearest predecessors.
//
// order[j] is the original index of the rank-j point. The rank-0 point has
// infinite insertion radius (sentinel); for j >= 1, radii_sq[j] is the exact
// squared distance from the rank-j point to its nearest predecessor, and
// pred[j] is that predecessor's rank. Farthest-point ties break toward the
// smallest original index, so the result is a deterministic function of the
// input order and the start index.

#include <stdexcept>
#include <vector>

#include "sdf/point.hpp"

namespace sdf {

struct GreedyOrder {
  std::vector<int> order;    // rank -> original index
  std::vector<int> rank_of;  // original index -> rank
  std::vector<Q> radii_sq;   // rank -> r_j² (rank 0: unused sentinel 0)
  std::vector<int> pred;     // rank -> predecessor rank (-1 for rank 0)
};

inline GreedyOrder greedy_permutation(const std::vector<Pt>& pts,
                                      int start = 0) {
  int n = static_cast<int>(pts.size());
  if (n == 0) throw std::runtime_error("empty point set");
  if (start < 0 || start >= n) throw std::runtime_error("invalid start index");

  GreedyOrder g;
  g.order.reserve(n);
  g.rank_of.assign(n, -1);
  g.radii_sq.assign(n, Q(0));
  g.pred.assign(n, -1);

  // Per original index: squared distance to the inserted prefix and the rank
  // realizing it. O(n²) total.
  std::vector<Q> best(n, Q(0));
  std::vector<int> best_rank(n, -1);

  auto insert = [&](int idx, int rank) {
    g.order.push_back(idx);
    g.rank_of[idx] = rank;
    for (int j = 0; j < n; ++j) {
      if (g.rank_of[j] >= 0) continue;
      Q d2 = dist2(pts[j], pts[idx]);
      if (sgn(d2) == 0) throw std::runtime_error("duplicate input points");
      if (best_rank[j] < 0 || d2 < best[j]) {
        best[j] = d2;
        best_rank[j] = rank;
      }
    }
  };

  insert(start, 0);
  for (int rank = 1; rank < n; ++rank) {
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      if (g.rank_of[j] >= 0) continue;
      if (pick < 0 || best[j] > best[pick]) pick = j;
      // ties: smallest original index; scanning ascending j keeps the first.
    }
    g.radii_sq[rank] = best[pick];
    g.pred[rank] = best_rank[pick];
    insert(pick, rank);
  }
  return g;
}

}  // namespace sdf
