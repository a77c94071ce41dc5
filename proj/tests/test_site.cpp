#include <random>

#include "doctest.h"
#include "stacklab/site.hpp"

using namespace stacklab::site;

TEST_CASE("interval covers: level 0 and the documented level 1 shape") {
  auto u = IntervalSite::top();
  auto c0 = IntervalSite::covers(u, 0).at(0);
  REQUIRE(c0.pieces.size() == 1);
  CHECK(c0.pieces[0] == u);

  auto c1 = IntervalSite::covers(u, 1).at(0);
  REQUIRE(c1.pieces.size() == 2);
  CHECK(c1.pieces[0] == IntervalOpen{Rat(0), Rat(5, 8)});
  CHECK(c1.pieces[1] == IntervalOpen{Rat(3, 8), Rat(1)});
  auto m = IntervalSite::meet(c1.pieces[0], c1.pieces[1]);
  REQUIRE(m.has_value());
  CHECK(*m == IntervalOpen{Rat(3, 8), Rat(5, 8)});
  CHECK(covers_exactly(c1));
}

TEST_CASE("interval meets") {
  CHECK_FALSE(IntervalSite::meet({Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(1)}).has_value());
  auto m = IntervalSite::meet({Rat(0), Rat(2, 3)}, {Rat(1, 3), Rat(1)});
  REQUIRE(m.has_value());
  CHECK(*m == IntervalOpen{Rat(1, 3), Rat(2, 3)});
}

TEST_CASE("cantor covers and meets") {
  auto c = CantorSite::covers({""}, 1).at(0);
  REQUIRE(c.pieces.size() == 2);
  CHECK(c.pieces[0].bits == "0");
  CHECK(c.pieces[1].bits == "1");
  CHECK(covers_exactly(c));

  CHECK(CantorSite::meet({"01"}, {"0"}) == PrefixOpen{"01"});
  CHECK_FALSE(CantorSite::meet({"01"}, {"00"}).has_value());
  CHECK(covers_exactly(CantorSite::covers({"01"}, 3).at(0)));
}

TEST_CASE("cover invariants across levels and targets") {
  std::vector<IntervalOpen> targets = {{Rat(0), Rat(1)}, {Rat(1, 3), Rat(7, 8)}, {Rat(1, 10), Rat(2, 10)}};
  for (const auto& u : targets) {
    for (int k = 0; k <= 4; ++k) {
      auto c = IntervalSite::covers(u, k).at(0);
      CAPTURE(IntervalSite::to_string(u));
      CAPTURE(k);
      CHECK(covers_exactly(c));
      CHECK(is_chain_connected<IntervalSite>(c));
      for (const auto& p : c.pieces) CHECK(IntervalSite::leq(p, u));
      if (k > 0) {
        auto coarse = IntervalSite::covers(u, k - 1).at(0);
        CHECK(refines<IntervalSite>(c, coarse));
      }
    }
  }
  for (int k = 0; k <= 5; ++k) {
    auto c = CantorSite::covers({"10"}, k).at(0);
    CHECK(covers_exactly(c));
    if (k > 0) CHECK(refines<CantorSite>(c, CantorSite::covers({"10"}, k - 1).at(0)));
  }
}

TEST_CASE("refine: idempotence and two-sided refinement") {
  auto u = IntervalSite::top();
  auto c1 = IntervalSite::covers(u, 1).at(0);
  auto c2 = IntervalSite::covers(u, 2).at(0);
  auto self = refine<IntervalSite>(c1, c1);
  CHECK(self.pieces == c1.pieces);
  auto r = refine<IntervalSite>(c1, c2);
  CHECK(covers_exactly(r));
  CHECK(refines<IntervalSite>(r, c1));
  CHECK(refines<IntervalSite>(r, c2));

  auto d1 = CantorSite::covers({""}, 1).at(0);
  auto d2 = CantorSite::covers({""}, 2).at(0);
  auto rd = refine<CantorSite>(d1, d2);
  CHECK(rd.pieces == d2.pieces);
  CHECK(refine<CantorSite>(d1, d1).pieces == d1.pieces);
}

TEST_CASE("chain connectivity") {
  Cover<IntervalOpen> disconnected{{Rat(0), Rat(1)}, {{Rat(0), Rat(1, 3)}, {Rat(2, 3), Rat(1)}}};
  CHECK_FALSE(is_chain_connected<IntervalSite>(disconnected));
  CHECK_FALSE(covers_exactly(disconnected));
  Cover<IntervalOpen> single{{Rat(0), Rat(1)}, {{Rat(0), Rat(1)}}};
  CHECK(is_chain_connected<IntervalSite>(single));
}

TEST_CASE("meet agrees with endpoint arithmetic on random pairs") {
  std::mt19937 rng(2024);
  auto rand_rat = [&](int max_den) {
    std::uniform_int_distribution<std::int64_t> den(1, max_den);
    std::int64_t d = den(rng);
    std::uniform_int_distribution<std::int64_t> num(0, d);
    return Rat(num(rng), d);
  };
  int defined = 0;
  for (int i = 0; i < 200; ++i) {
    Rat a = rand_rat(40), b = rand_rat(40), c = rand_rat(40), d = rand_rat(40);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    if (a == b || c == d) continue;
    IntervalOpen u{a, b}, v{c, d};
    auto m = IntervalSite::meet(u, v);
    // oracle: the set-theoretic intersection of open intervals
    Rat lo = std::max(a, c), hi = std::min(b, d);
    if (lo < hi) {
      ++defined;
      REQUIRE(m.has_value());
      CHECK(m->lo == lo);
      CHECK(m->hi == hi);
    } else {
      CHECK_FALSE(m.has_value());
    }
  }
  CHECK(defined > 50);

  for (int i = 0; i < 200; ++i) {
    auto bits = [&](int len) {
      std::string s;
      for (int j = 0; j < len; ++j) s.push_back(rng() % 2 ? '1' : '0');
      return s;
    };
    PrefixOpen u{bits(static_cast<int>(rng() % 5))}, v{bits(static_cast<int>(rng() % 5))};
    auto m = CantorSite::meet(u, v);
    bool u_in_v = u.bits.rfind(v.bits, 0) == 0;
    bool v_in_u = v.bits.rfind(u.bits, 0) == 0;
    if (u_in_v)
      CHECK(m == u);
    else if (v_in_u)
      CHECK(m == v);
    else
      CHECK_FALSE(m.has_value());
  }
}

TEST_CASE("generated opens are bounded and include the target") {
  auto opens = generated_opens<IntervalSite>(IntervalSite::top(), 3);
  CHECK(opens.front() == IntervalSite::top());
  CHECK(opens.size() == 1 + 2 + 4 + 8);
  auto copens = generated_opens<CantorSite>({""}, 3);
  CHECK(copens.size() == 1 + 2 + 4 + 8);
}

TEST_CASE("rational parsing round-trips") {
  CHECK(parse_rat("3/8") == Rat(3, 8));
  CHECK(parse_rat("2") == Rat(2));
  CHECK(to_string(Rat(6, 8)) == "3/4");
  auto u = IntervalSite::parse_open("(1/4,3/4)");
  CHECK(u == IntervalOpen{Rat(1, 4), Rat(3, 4)});
  CHECK(IntervalSite::to_string(u) == "(1/4,3/4)");
}
