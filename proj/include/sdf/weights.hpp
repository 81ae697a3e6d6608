#pragma once
// Freezing times, weight functions, clipping balls, and wave bucketing.
//
// Every point of greedy rank >= 1 freezes at λ = (1+ε)^k, the smallest
// integer power with λ ≥ ((1+ε)/ε)·r (r its insertion radius); the rank-0
// point never freezes. All comparisons are done on squared quantities so
// irrational insertion radii never appear. Points sharing k form one wave;
// the wave covers squared scales [λ², (1+ε)²λ²] and waves are processed in
// descending λ.

#include <map>
#include <stdexcept>
#include <vector>

#include "sdf/greedy.hpp"
#include "sdf/point.hpp"

namespace sdf {

struct FreezeInfo {
  Q lambda;   // (1+ε)^k
  Q lambda2;  // (1+ε)^{2k}
  long k;     // wave index
};

// Smallest integer k with (1+ε)^{2k} ≥ ((1+ε)/ε)²·r²; r given squared.
inline FreezeInfo freezing_time_sq(const Q& r2, const Q& eps) {
  if (sgn(r2) <= 0) throw std::runtime_error("freezing_time: r must be > 0");
  if (sgn(eps) <= 0) throw std::runtime_error("epsilon must be > 0");
  Q g = 1 + eps;          // growth per wave in length units
  Q g2 = g * g;           // growth in squared units
  Q target = (g / eps) * (g / eps) * r2;
  target.canonicalize();
  long k = 0;
  Q l2(1), l(1);
  if (l2 >= target) {
    while (l2 >= target) {
      --k;
      l2 /= g2;
      l /= g;
    }
    ++k;
    l2 *= g2;
    l *= g;
  } else {
    while (l2 < target) {
      ++k;
      l2 *= g2;
      l *= g;
    }
  }
  l.canonicalize();
  l2.canonicalize();
  return FreezeInfo{l, l2, k};
}

inline FreezeInfo freezing_time(const Q& r, const Q& eps) {
  if (sgn(r) <= 0) throw std::runtime_error("freezing_time: r must be > 0");
  return freezing_time_sq(r * r, eps);
}

// w_i(α)² with s = α².
inline Q weight_sq(const Q& lambda2, const Q& s) {
  Q d = s - lambda2;
  return sgn(d) > 0 ? d : Q(0);
}

// Squared radius of the clipping ball b_i^α = ball(p_i, min{α, λ_i}).
inline Q ball_radius_sq(const Q& lambda2, const Q& s) {
  return s < lambda2 ? s : lambda2;
}

struct WeightSchedule {
  Q eps;
  // Per original index. infinite[i] marks the never-freezing rank-0 point;
  // lambda/lambda2/wave_k are valid only when !infinite[i].
  std::vector<bool> infinite;
  std::vector<Q> lambda, lambda2;
  std::vector<long> wave_k;

  struct Wave {
    long k;
    Q lambda;   // (1+ε)^k
    Q lambda2;  // (1+ε)^{2k} = bottom squared scale s_bot
    Q s_top;    // (1+ε)²·λ²
    std::vector<int> members;  // original indices, ascending greedy rank
  };
  std::vector<Wave> waves;  // descending λ²
};

inline WeightSchedule make_schedule(const std::vector<Pt>& pts,
                                    const GreedyOrder& g, const Q& eps) {
  if (sgn(eps) <= 0) throw std::runtime_error("epsilon must be > 0");
  int n = static_cast<int>(pts.size());
  WeightSchedule ws;
  ws.eps = eps;
  ws.infinite.assign(n, false);
  ws.lambda.assign(n, Q(0));
  ws.lambda2.assign(n, Q(0));
  ws.wave_k.assign(n, 0);

  Q g2 = (1 + eps) * (1 + eps);
  std::map<long, WeightSchedule::Wave> by_k;
  for (int rank = 0; rank < n; ++rank) {
    int idx = g.order[rank];
    if (rank == 0) {
      ws.infinite[idx] = true;
      continue;
    }
    FreezeInfo f = freezing_time_sq(g.radii_sq[rank], eps);
    ws.lambda[idx] = f.lambda;
    ws.lambda2[idx] = f.lambda2;
    ws.wave_k[idx] = f.k;
    auto it = by_k.find(f.k);
    if (it == by_k.end()) {
      WeightSchedule::Wave w;
      w.k = f.k;
      w.lambda = f.lambda;
      w.lambda2 = f.lambda2;
      w.s_top = g2 * f.lambda2;
      w.s_top.canonicalize();
      it = by_k.emplace(f.k, std::move(w)).first;
    }
    it->second.members.push_back(idx);  // ascending rank by construction
  }
  for (auto it = by_k.rbegin(); it != by_k.rend(); ++it)
    ws.waves.push_back(it->second);
  return ws;
}

}  // namespace sdf
