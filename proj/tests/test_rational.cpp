#include <catch2/catch_amalgamated.hpp>

#include "sdf/point.hpp"
#include "sdf/random.hpp"
#include "sdf/rational.hpp"

using namespace sdf;

TEST_CASE("rational parse and canonical print") {
  CHECK(q_str(parse_q("4/8")) == "1/2");
  CHECK(q_str(parse_q("-4/8")) == "-1/2");
  CHECK(q_str(parse_q("7")) == "7/1");
  CHECK(q_str(parse_q("+7")) == "7/1");
  CHECK(q_str(parse_q("0.25")) == "1/4");
  CHECK(q_str(parse_q("-1.5")) == "-3/2");
  CHECK(q_str(parse_q("2.")) == "2/1");
  CHECK(q_str(parse_q(".5")) == "1/2");
  CHECK(parse_q("1000000000000000000000/3") ==
        Q(Z("1000000000000000000000"), Z(3)));
  CHECK_THROWS(parse_q(""));
  CHECK_THROWS(parse_q("1/0"));
  CHECK_THROWS(parse_q("a"));
  CHECK_THROWS(parse_q("1/ 2"));
  CHECK_THROWS(parse_q("1.2.3"));
  CHECK_THROWS(parse_q("--1"));
  CHECK_THROWS(parse_q("1/-2"));
}

TEST_CASE("rational round trip through q_str") {
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    long n = static_cast<long>(rng.below(2000001)) - 1000000;
    long d = static_cast<long>(rng.below(999999)) + 1;
    Q q = q_of(n, d);
    CHECK(parse_q(q_str(q)) == q);
  }
}

TEST_CASE("q_to_ld has ~106-bit accuracy") {
  // 1/3 in long double (64-bit mantissa) vs staged conversion.
  long double v = q_to_ld(q_of(1, 3));
  long double want = 1.0L / 3.0L;
  CHECK(fabsl(v - want) <= 0x1p-64L);
  // A value needing more than 53 bits: (2^60+1)/2^60.
  Q big(Z(1) << 60, 1);
  Q q = (big + 1) / big;
  long double got = q_to_ld(q);
  CHECK(got != 1.0L);
  CHECK(fabsl(got - (1.0L + powl(2.0L, -60))) <= 0x1p-80L);
}

TEST_CASE("alpha_of_s and fixed-format printing") {
  CHECK(fmt_ld(alpha_of_s(q_of(1, 2))) == "0.70710678118654752");
  CHECK(fmt_ld(alpha_of_s(q_of(4))) == "2");
  CHECK(fmt_ld(alpha_of_s(q_of(0))) == "0");
  CHECK_THROWS(alpha_of_s(q_of(-1)));
}

TEST_CASE("point helpers") {
  Pt a{q_of(0), q_of(0)}, b{q_of(3), q_of(0)}, c{q_of(0), q_of(4)};
  CHECK(dist2(a, b) == 9);
  CHECK(dist2(b, c) == 25);
  CHECK(cross3(a, b, c) == 12);   // CCW
  CHECK(cross3(a, c, b) == -12);  // CW
  CHECK(cross3(a, b, Pt{q_of(6), q_of(0)}) == 0);
  CHECK(lex_less(a, b));
  CHECK(lex_less(a, Pt{q_of(0), q_of(1)}));
}

TEST_CASE("random points are deterministic and distinct") {
  auto p1 = random_points(64, 42);
  auto p2 = random_points(64, 42);
  REQUIRE(p1.size() == 64);
  for (size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
  auto p3 = random_points(64, 43);
  bool same = true;
  for (size_t i = 0; i < p1.size(); ++i)
    if (!(p1[i] == p3[i])) same = false;
  CHECK(!same);
  for (size_t i = 0; i < p1.size(); ++i)
    for (size_t j = i + 1; j < p1.size(); ++j) CHECK(!(p1[i] == p1[j]));
}
