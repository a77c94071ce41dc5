#include <random>

#include "doctest.h"
#include "stacklab/kernel.hpp"
#include "util.hpp"

using namespace stacklab;
using namespace stacklab::syntax;
namespace k = stacklab::kernel;

namespace {

TermPtr tp(const std::string& s) { return resolve(parse_term(s), {}); }

k::ErrorKind infer_error(const k::Context& ctx, const TermPtr& t) {
  try {
    k::infer(ctx, t);
  } catch (const k::TypingError& e) {
    return e.kind;
  }
  throw std::runtime_error("expected a typing error");
}

k::ErrorKind check_error(const k::Context& ctx, const TermPtr& t, const TermPtr& ty) {
  try {
    k::check(ctx, t, ty);
  } catch (const k::TypingError& e) {
    return e.kind;
  }
  throw std::runtime_error("expected a typing error");
}

const std::string kUnitProp =
    "\\x y. case(\\a. Id (Enum 1) a y, [case(\\b. Id (Enum 1) #0:1 b, [refl #0:1], y)], x)";

}  // namespace

TEST_CASE("bidirectional basics") {
  k::Context empty;
  CHECK(infer_error(empty, tp("\\x. x")) == k::ErrorKind::NotAFunction);
  CHECK(equal(k::infer(empty, zero()), nat()));
  CHECK_THROWS_AS(k::infer(empty, tp("tin zero")), k::TypingError);
  k::check(empty, tp("tin zero"), tp("||Nat||"));  // must not throw
  k::check(empty, tp("refl zero"), tp("Id Nat zero zero"));
  CHECK(infer_error(empty, universe()) == k::ErrorKind::UniverseExpected);
}

TEST_CASE("truncation elimination discipline") {
  k::Context empty;
  auto ok = resolve(parse_term("trec(Enum 1, \\x. #0:1, " + kUnitProp + ", tin zero)"), {});
  k::check(empty, ok, enum_type(1));
  auto bad = tp("trec(Nat, \\n. n, \\x y. refl x, tin zero)");
  CHECK(check_error(empty, bad, nat()) == k::ErrorKind::PropWitnessInvalid);
}

TEST_CASE("normalization computes") {
  k::Context empty;
  CHECK(equal(k::normalize(empty, tp("(\\x. x) zero")).term, zero()));
  CHECK(equal(k::normalize(empty, tp("natrec(\\k. Nat, zero, \\k r. suc r, suc (suc zero))")).term,
              tp("suc (suc zero)")));
  CHECK(equal(k::normalize(empty, tp("trec(Nat, \\n. suc n, \\x y. refl x, tin zero)")).term,
              succ(zero())));
  CHECK(equal(k::normalize(empty, tp("case(\\c. Nat, [zero, suc zero], #1:2)")).term, succ(zero())));
  CHECK(equal(k::normalize(empty, tp("J(\\a b q. Nat, \\a. a, refl (suc zero))")).term, succ(zero())));
  CHECK(equal(k::normalize(empty, tp("fst (zero , suc zero)")).term, zero()));
}

TEST_CASE("conversion: eta, iota, truncation identification") {
  k::Context ctx;
  ctx.telescope.push_back(tp("Nat -> Nat"));  // f
  auto f = var(0);
  CHECK(k::conv(ctx, lambda(app(var(1), var(0))), f, tp("Nat -> Nat")));
  CHECK_FALSE(k::conv(ctx, zero(), succ(zero()), nat()));
  CHECK(k::conv(ctx, tp("tin zero"), tp("tin (suc zero)"), tp("||Nat||")));
  CHECK(k::conv(ctx, tp("natrec(\\k. Nat, zero, \\k r. suc r, suc zero)"), tp("suc zero"), nat()));
  // pair eta
  k::Context pctx;
  pctx.telescope.push_back(tp("Nat * Nat"));
  CHECK(k::conv(pctx, pair(proj_l(var(0)), proj_r(var(0))), var(0), tp("Nat * Nat")));
}

TEST_CASE("typed spine arguments respect truncation identification") {
  k::Context ctx;
  ctx.telescope.push_back(tp("||Nat|| -> Nat"));
  auto a = tp("tin zero");
  auto b = tp("tin (suc zero)");
  CHECK(k::conv(ctx, app(var(0), a), app(var(0), b), nat()));
}

TEST_CASE("context validation") {
  k::Context bad;
  bad.telescope.push_back(zero());  // not a type
  CHECK_THROWS_AS(k::check_context(bad), k::TypingError);
  try {
    k::check_context(bad);
  } catch (const k::TypingError& e) {
    CHECK(e.kind == k::ErrorKind::IllFormedContext);
  }
  k::Context good;
  good.telescope.push_back(universe());
  good.telescope.push_back(var(0));
  k::check_context(good);
}

TEST_CASE("golden corpus agrees with recorded verdicts") {
  k::FileChecker fc;
  auto run = [&](const std::string& file) {
    auto decls = parse_file(read_asset(file));
    return fc.run(decls);
  };
  int total = 0;
  for (const auto& file : {"prelude.tt", "statements.tt", "corpus_errors.tt"}) {
    for (const auto& r : run(file)) {
      ++total;
      CAPTURE(r.name);
      CAPTURE(r.message);
      if (r.expect.empty()) {
        CHECK(r.ok);
      } else {
        REQUIRE(r.error_kind.has_value());
        CHECK(r.expect == "REJECT " + k::to_string(*r.error_kind));
      }
    }
  }
  CHECK(total >= 40);
}

TEST_CASE("truncation propositionality proof checks") {
  k::FileChecker fc;
  fc.run(parse_file(read_asset("prelude.tt")));
  auto truncProp = fc.lookup_type("truncProp");
  REQUIRE(truncProp.has_value());
  // (A : U)(x y : ||A||) -> Id ||A|| x y
  auto expected = resolve(parse_term("(A : U)(x : ||A||)(y : ||A||) -> Id (||A||) x y"), {});
  CHECK(equal(*truncProp, expected));
}

namespace {

// Type-directed generator of well-typed inferable terms over a fixed context.
struct TypedGen {
  std::mt19937 rng;
  // context: f : Nat -> Nat, p : Nat * Nat, b : Bool (= Enum 2)
  k::Context ctx;

  TypedGen(unsigned seed) : rng(seed) {
    ctx.telescope.push_back(tp("Nat -> Nat"));
    ctx.telescope.push_back(tp("Nat * Nat"));
    ctx.telescope.push_back(enum_type(2));
  }

  int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermPtr gen_nat(int depth) {
    if (depth <= 0) return roll(2) ? zero() : succ(zero());
    switch (roll(6)) {
      case 0: return zero();
      case 1: return succ(gen_nat(depth - 1));
      case 2: return app(var(2), gen_nat(depth - 1));  // f applied
      case 3: return roll(2) ? proj_l(var(1)) : proj_r(var(1));
      case 4:
        return nat_elim(lambda(nat()), gen_nat(depth - 1),
                        lambda(lambda(succ(var(0)))), gen_nat(depth - 1));
      case 5:
        return enum_elim(lambda(nat()), {gen_nat(depth - 1), gen_nat(depth - 1)}, var(0));
    }
    return zero();
  }
};

}  // namespace

TEST_CASE("normalize is idempotent and type-preserving") {
  TypedGen g(777);
  for (int i = 0; i < 200; ++i) {
    auto t = g.gen_nat(4);
    auto n1 = k::normalize(g.ctx, t).term;
    auto n2 = k::normalize(g.ctx, n1).term;
    CAPTURE(pretty(t));
    CHECK(equal(n1, n2));
    auto ty1 = k::infer(g.ctx, t);
    auto ty2 = k::infer(g.ctx, n1);
    CHECK(k::conv(g.ctx, ty1, ty2, universe()));
  }
}

TEST_CASE("conv is an equivalence relation on well-typed terms") {
  TypedGen g(4242);
  auto variant_of = [&](const TermPtr& t) -> TermPtr {
    // equality-preserving rewrites: iota-unfold via normalize, or identity
    switch (g.roll(3)) {
      case 0: return k::normalize(g.ctx, t).term;
      case 1: return nat_elim(lambda(nat()), t, lambda(lambda(succ(var(0)))), zero());
      default: return t;
    }
  };
  int related = 0;
  for (int i = 0; i < 150; ++i) {
    auto t = g.gen_nat(3);
    auto u = g.roll(2) ? variant_of(t) : g.gen_nat(3);
    auto v = g.roll(2) ? variant_of(u) : g.gen_nat(3);
    bool tu = k::conv(g.ctx, t, u, nat());
    bool ut = k::conv(g.ctx, u, t, nat());
    CHECK(tu == ut);  // symmetry
    CHECK(k::conv(g.ctx, t, t, nat()));  // reflexivity
    bool uv = k::conv(g.ctx, u, v, nat());
    if (tu && uv) {
      ++related;
      CHECK(k::conv(g.ctx, t, v, nat()));  // transitivity
    }
  }
  CHECK(related > 20);  // the transitivity branch is actually exercised
}

TEST_CASE("inferred types come back in normal form") {
  k::Context empty;
  auto ty = k::infer(empty, tp("refl (natrec(\\k. Nat, suc zero, \\k r. suc r, suc zero))"));
  CHECK(equal(ty, tp("Id Nat (suc (suc zero)) (suc (suc zero))")));
}

TEST_CASE("definitions unfold during conversion") {
  k::FileChecker fc;
  fc.run(parse_file(read_asset("prelude.tt")));
  auto add = fc.lookup_type("addComputes");
  REQUIRE(add.has_value());
  CHECK(equal(fc.normalized_body("two"), tp("suc (suc zero)")));
}
