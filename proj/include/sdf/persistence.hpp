#pragma once
// Persistence diagrams over GF(2) and bottleneck distances between diagrams.
//
// reduce() runs the standard left-to-right column reduction of the boundary
// matrix in filtration order (columns through dim 3 processed), drops
// zero-length pairs (exact rational birth == death), and reports dims 0 and 1
// with α = √s values. bottleneck distances are computed by binary search over
// the finite set of candidate radii with an augmenting-path perfect matching;
// the log-scale variant certifies multiplicative interleavings, mapping b = 0
// to a floor constant shared by both diagrams.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdf/filtration.hpp"
#include "sdf/io.hpp"

namespace sdf {

inline Diagram diagram_sorted(Diagram d) {
  std::sort(d.begin(), d.end(), [](const DiagramPair& a, const DiagramPair& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return d;
}

namespace detail {

// Symmetric difference of two ascending index vectors (GF(2) column add).
inline std::vector<int> xor_cols(const std::vector<int>& a,
                                 const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) out.push_back(a[i++]);
    else if (b[j] < a[i]) out.push_back(b[j++]);
    else { ++i; ++j; }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return out;
}

inline std::vector<std::vector<int>> boundary_columns(
    const FiltrationStore& st) {
  size_t m = st.entries.size();
  std::vector<std::vector<int>> cols(m);
  for (size_t j = 0; j < m; ++j) {
    const auto& verts = st.entries[j].verts;
    if (verts.size() == 1) continue;
    for (size_t skip = 0; skip < verts.size(); ++skip) {
      std::vector<int> f;
      for (size_t t = 0; t < verts.size(); ++t)
        if (t != skip) f.push_back(verts[t]);
      auto it = st.index.find(f);
      if (it == st.index.end())
        throw std::runtime_error("invalid store: face absent");
      cols[j].push_back(static_cast<int>(it->second));
    }
    std::sort(cols[j].begin(), cols[j].end());
  }
  return cols;
}

// Shared diagram assembly: pairs (creator position, killer position or -1).
inline Diagram assemble_diagram(const FiltrationStore& st,
                                const std::vector<int>& killer,
                                const std::vector<char>& creator) {
  Diagram d;
  for (size_t i = 0; i < st.entries.size(); ++i) {
    if (!creator[i]) continue;
    int dim = st.entries[i].dim();
    if (dim > 1) continue;
    if (killer[i] >= 0) {
      const Q& bs = st.entries[i].birth;
      const Q& ds = st.entries[killer[i]].birth;
      if (bs == ds) continue;  // zero-length pair
      d.push_back({dim, alpha_of_s(bs), alpha_of_s(ds)});
    } else {
      d.push_back({dim, alpha_of_s(st.entries[i].birth),
                   std::numeric_limits<long double>::infinity()});
    }
  }
  return diagram_sorted(std::move(d));
}

}  // namespace detail

inline Diagram reduce(const FiltrationStore& st) {
  {
    auto bad = st.validate();
    if (!bad.empty())
      throw std::runtime_error("invalid store: " + bad.front());
  }
  size_t m = st.entries.size();
  auto cols = detail::boundary_columns(st);
  // owner[i] = column whose reduced low is i, else -1.
  std::vector<int> owner(m, -1);
  std::vector<char> creator(m, 0);
  for (size_t j = 0; j < m; ++j) {
    auto& col = cols[j];
    while (!col.empty()) {
      int low = col.back();
      if (owner[low] < 0) {
        owner[low] = static_cast<int>(j);
        break;
      }
      col = detail::xor_cols(col, cols[owner[low]]);
    }
    if (col.empty()) creator[j] = 1;
  }
  return detail::assemble_diagram(st, owner, creator);
}

// ---------------------------------------------------------------------------
// Bottleneck distances.

namespace detail {

struct BPoint {
  long double b, d;  // transformed coordinates; d may be +inf
};

// Perfect matching feasibility at radius r on the augmented bipartite graph
// (points of A plus proxies for B's diagonals) x (points of B plus proxies
// for A's diagonals). Kuhn's augmenting paths; sizes are desk-scale.
inline bool feasible(const std::vector<BPoint>& A, const std::vector<BPoint>& B,
                     const std::vector<long double>& diagA,
                     const std::vector<long double>& diagB,
                     const std::vector<std::vector<long double>>& cost,
                     long double r) {
  int na = static_cast<int>(A.size()), nb = static_cast<int>(B.size());
  int nL = na + nb, nR = nb + na;  // left: A then B-proxies; right: B then A-proxies
  std::vector<std::vector<int>> adj(nL);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j)
      if (cost[i][j] <= r) adj[i].push_back(j);
    if (diagA[i] <= r) adj[i].push_back(nb + i);  // A_i -> its own proxy
  }
  for (int j = 0; j < nb; ++j) {
    int left = na + j;  // proxy of B_j
    if (diagB[j] <= r) adj[left].push_back(j);
    for (int i = 0; i < na; ++i) adj[left].push_back(nb + i);  // proxy-proxy
  }
  std::vector<int> matchR(nR, -1);
  std::vector<char> used;
  std::function<bool(int)> try_kuhn = [&](int u) -> bool {
    for (int v : adj[u]) {
      if (used[v]) continue;
      used[v] = 1;
      if (matchR[v] < 0 || try_kuhn(matchR[v])) {
        matchR[v] = u;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int u = 0; u < nL; ++u) {
    used.assign(nR, 0);
    if (try_kuhn(u)) ++matched;
  }
  return matched == nL;
}

// Bottleneck of the finite-death points with diagonal overflow.
inline long double finite_bottleneck(const std::vector<BPoint>& A,
                                     const std::vector<BPoint>& B) {
  if (A.empty() && B.empty()) return 0.0L;
  int na = static_cast<int>(A.size()), nb = static_cast<int>(B.size());
  std::vector<long double> diagA(na), diagB(nb);
  std::vector<std::vector<long double>> cost(na,
                                             std::vector<long double>(nb));
  std::vector<long double> cand;
  for (int i = 0; i < na; ++i) {
    diagA[i] = (A[i].d - A[i].b) / 2;
    cand.push_back(diagA[i]);
  }
  for (int j = 0; j < nb; ++j) {
    diagB[j] = (B[j].d - B[j].b) / 2;
    cand.push_back(diagB[j]);
  }
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      cost[i][j] = std::max(fabsl(A[i].b - B[j].b), fabsl(A[i].d - B[j].d));
      cand.push_back(cost[i][j]);
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  int lo = 0, hi = static_cast<int>(cand.size()) - 1;
  if (feasible(A, B, diagA, diagB, cost, cand[lo])) return cand[lo];
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (feasible(A, B, diagA, diagB, cost, cand[mid])) hi = mid;
    else lo = mid;
  }
  return cand[hi];
}

// 1-D bottleneck matching of infinite-death births (sorted order is optimal).
inline long double infinite_bottleneck(std::vector<long double> a,
                                       std::vector<long double> b) {
  if (a.size() != b.size())
    return std::numeric_limits<long double>::infinity();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  long double r = 0.0L;
  for (size_t i = 0; i < a.size(); ++i) r = std::max(r, fabsl(a[i] - b[i]));
  return r;
}

inline long double bottleneck_impl(const Diagram& d1, const Diagram& d2,
                                   bool log_scale) {
  // Shared floor for b = 0 in log scale: log(m/4), m the smallest positive
  // finite coordinate across both diagrams.
  long double floor_log = 0.0L;
  if (log_scale) {
    long double m = std::numeric_limits<long double>::infinity();
    for (const Diagram* d : {&d1, &d2})
      for (const auto& p : *d) {
        if (p.dim >= 1 && p.birth == 0.0L)
          throw std::runtime_error("log-scale undefined");
        if (p.birth > 0.0L) m = std::min(m, p.birth);
        if (!std::isinf(static_cast<double>(p.death)) && p.death > 0.0L)
          m = std::min(m, p.death);
      }
    if (std::isinf(static_cast<double>(m))) m = 1.0L;  // only (0, inf) pairs
    floor_log = logl(m / 4);
  }
  auto tf = [&](long double v) -> long double {
    if (!log_scale) return v;
    if (v == 0.0L) return floor_log;
    return logl(v);
  };

  long double worst = 0.0L;
  for (int dim = 0; dim <= 1; ++dim) {
    std::vector<BPoint> A, B;
    std::vector<long double> infA, infB;
    for (const auto& p : d1)
      if (p.dim == dim) {
        if (std::isinf(static_cast<double>(p.death))) infA.push_back(tf(p.birth));
        else A.push_back({tf(p.birth), tf(p.death)});
      }
    for (const auto& p : d2)
      if (p.dim == dim) {
        if (std::isinf(static_cast<double>(p.death))) infB.push_back(tf(p.birth));
        else B.push_back({tf(p.birth), tf(p.death)});
      }
    worst = std::max(worst, infinite_bottleneck(infA, infB));
    worst = std::max(worst, finite_bottleneck(A, B));
  }
  return worst;
}

}  // namespace detail

inline long double bottleneck_log(const Diagram& d1, const Diagram& d2) {
  return detail::bottleneck_impl(d1, d2, true);
}

inline long double bottleneck_raw(const Diagram& d1, const Diagram& d2) {
  return detail::bottleneck_impl(d1, d2, false);
}

}  // namespace sdf
