#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "sdf/greedy.hpp"
#include "sdf/oracle.hpp"
#include "sdf/random.hpp"
#include "sdf/weights.hpp"

using namespace sdf;

namespace {

const FiltrationEntry* entry(const FiltrationStore& st, std::vector<int> v) {
  return st.find(v);
}

std::set<std::vector<int>> simplices_up_to_s(const FiltrationStore& st,
                                             const Q& s) {
  std::set<std::vector<int>> out;
  for (const auto& e : st.entries)
    if (e.birth <= s && e.dim() <= 2) out.insert(e.verts);
  return out;
}

}  // namespace

TEST_CASE("exact_alpha_filtration: pinned stores") {
  SECTION("single triangle (0,0),(2,0),(1,2)") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(2), q_of(0)},
                           Pt{q_of(1), q_of(2)}};
    auto st = exact_alpha_filtration(pts);
    CHECK(st.validate().empty());
    REQUIRE(st.entries.size() == 7);
    CHECK(entry(st, {0})->birth == Q(0));
    CHECK(entry(st, {0, 1})->birth == Q(1));         // Gabriel: |01|^2/4
    CHECK(entry(st, {0, 2})->birth == q_of(5, 4));   // |02|^2 = 5
    CHECK(entry(st, {1, 2})->birth == q_of(5, 4));
    CHECK(entry(st, {0, 1, 2})->birth == q_of(25, 16));  // circumradius^2
  }
  SECTION("unit square: one diagonal chosen by the fan tie-break") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(1), q_of(0)},
                           Pt{q_of(0), q_of(1)}, Pt{q_of(1), q_of(1)}};
    auto st = exact_alpha_filtration(pts);
    CHECK(st.validate().empty());
    REQUIRE(st.entries.size() == 11);  // 4 verts, 5 edges, 2 triangles
    for (int i = 0; i < 4; ++i) CHECK(entry(st, {i})->birth == Q(0));
    CHECK(entry(st, {0, 1})->birth == q_of(1, 4));
    CHECK(entry(st, {0, 2})->birth == q_of(1, 4));
    CHECK(entry(st, {1, 3})->birth == q_of(1, 4));
    CHECK(entry(st, {2, 3})->birth == q_of(1, 4));
    REQUIRE(entry(st, {0, 3}) != nullptr);  // diagonal through min id 0
    CHECK(entry(st, {0, 3})->birth == q_of(1, 2));
    CHECK(entry(st, {1, 2}) == nullptr);
    CHECK(entry(st, {0, 1, 3})->birth == q_of(1, 2));
    CHECK(entry(st, {0, 2, 3})->birth == q_of(1, 2));
  }
  SECTION("two points") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(2), q_of(0)}};
    auto st = exact_alpha_filtration(pts);
    REQUIRE(st.entries.size() == 3);
    CHECK(entry(st, {0, 1})->birth == Q(1));
  }
  SECTION("single point") {
    std::vector<Pt> pts = {Pt{q_of(3), q_of(4)}};
    auto st = exact_alpha_filtration(pts);
    REQUIRE(st.entries.size() == 1);
    CHECK(st.entries[0].verts == std::vector<int>{0});
  }
  SECTION("collinear points get consecutive edges only") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(1), q_of(0)},
                           Pt{q_of(3), q_of(0)}};
    auto st = exact_alpha_filtration(pts);
    CHECK(st.validate().empty());
    REQUIRE(st.entries.size() == 5);
    CHECK(entry(st, {0, 1})->birth == q_of(1, 4));
    CHECK(entry(st, {1, 2})->birth == Q(1));
    CHECK(entry(st, {0, 2}) == nullptr);
  }
  SECTION("size guard") {
    std::vector<Pt> pts = random_points(257, 99);
    CHECK_THROWS_WITH(exact_alpha_filtration(pts),
                      Catch::Matchers::ContainsSubstring("limited to 256"));
  }
}

TEST_CASE("exact_alpha_filtration: random stores validate and cross-check") {
  for (uint64_t seed : {5u, 6u, 7u}) {
    auto pts = random_points(24, seed);
    auto st = exact_alpha_filtration(pts);
    INFO("seed " << seed);
    CHECK(st.validate().empty());
    // Cross-check the two independent reductions end to end.
    auto d1 = reduce(st);
    auto d2 = naive_persistence(st);
    REQUIRE(d1.size() == d2.size());
    for (size_t i = 0; i < d1.size(); ++i) {
      CHECK(d1[i].dim == d2[i].dim);
      CHECK(d1[i].birth == d2[i].birth);
      CHECK(d1[i].death == d2[i].death);
    }
    // Exactly one essential dim-0 class for a connected alpha complex.
    int ess = 0;
    for (const auto& p : d1)
      if (p.dim == 0 && std::isinf(static_cast<double>(p.death))) ++ess;
    CHECK(ess == 1);
  }
}

TEST_CASE("nerve_slice_check: pinned slices") {
  SECTION("s = 0 keeps vertices only") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(2), q_of(0)},
                           Pt{q_of(1), q_of(2)}};
    std::vector<WeightClass> cls(3, WeightClass::unfrozen());
    auto sc = nerve_slice_check(pts, cls, Q(0));
    CHECK(sc.simplices.size() == 3);
    CHECK(sc.contains({0}));
    CHECK(sc.contains({1}));
    CHECK(sc.contains({2}));
    CHECK(!sc.contains({0, 1}));
  }
  SECTION("huge s, all unfrozen: equals the full alpha complex") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(2), q_of(0)},
                           Pt{q_of(1), q_of(2)}};
    std::vector<WeightClass> cls(3, WeightClass::unfrozen());
    auto sc = nerve_slice_check(pts, cls, Q(100));
    auto st = exact_alpha_filtration(pts);
    CHECK(sc.simplices == simplices_up_to_s(st, Q(100)));
    CHECK(sc.simplices.size() == 7);
  }
  SECTION("two points distance 2 with lambda2^2 = 1: edge lives on [1, 9]") {
    std::vector<Pt> pts = {Pt{q_of(0), q_of(0)}, Pt{q_of(2), q_of(0)}};
    std::vector<WeightClass> cls = {WeightClass::unfrozen(),
                                    WeightClass::frozen_at(Q(1))};
    auto has_edge = [&](Q s) {
      return nerve_slice_check(pts, cls, s).contains({0, 1});
    };
    CHECK(!has_edge(q_of(1, 2)));
    CHECK(has_edge(Q(1)));
    CHECK(has_edge(Q(5)));
    CHECK(has_edge(Q(9)));   // witness (3,0): both powers exactly 9
    CHECK(!has_edge(Q(10)));
    // The frozen point's own cell empties just above s = 9 as well.
    CHECK(nerve_slice_check(pts, cls, Q(9)).contains({1}));
    CHECK(!nerve_slice_check(pts, cls, Q(10)).contains({1}));
    CHECK(nerve_slice_check(pts, cls, Q(10)).contains({0}));
  }
  SECTION("size guard") {
    auto pts = random_points(33, 4);
    std::vector<WeightClass> cls(33, WeightClass::unfrozen());
    CHECK_THROWS_WITH(nerve_slice_check(pts, cls, Q(1)),
                      Catch::Matchers::ContainsSubstring("limited to 32"));
  }
}

TEST_CASE("nerve_slice_check below the smallest lambda^2 is the alpha slice") {
  for (uint64_t seed : {101u, 202u}) {
    auto pts = random_points(12, seed);
    auto g = greedy_permutation(pts);
    auto sched = make_schedule(pts, g, Q(1));
    Q min_l2 = sched.waves.back().lambda2;  // waves descend
    auto st = exact_alpha_filtration(pts);
    for (int j : {1, 3, 7}) {
      Q s = min_l2 * j / 8;
      auto sc = nerve_slice_check(pts, sched, s);
      INFO("seed " << seed << " s=" << q_str(s));
      CHECK(sc.simplices == simplices_up_to_s(st, s));
    }
  }
}

TEST_CASE("naive_persistence guards") {
  SECTION("single vertex diagram") {
    FiltrationStore st;
    st.n = 1;
    st.entries = {FiltrationEntry{{0}, Q(0)}};
    st.finalize();
    auto d = naive_persistence(st);
    REQUIRE(d.size() == 1);
    CHECK(d[0].dim == 0);
    CHECK(d[0].birth == 0.0L);
    CHECK(std::isinf(static_cast<double>(d[0].death)));
  }
  SECTION("column limit") {
    FiltrationStore st;
    st.n = 2001;
    for (int i = 0; i < 2001; ++i)
      st.entries.push_back(FiltrationEntry{{i}, Q(0)});
    st.finalize();
    CHECK_THROWS_WITH(naive_persistence(st),
                      Catch::Matchers::ContainsSubstring("limited to 2000"));
  }
}
