#include <random>

#include "doctest.h"
#include "stacklab/syntax.hpp"

using namespace stacklab::syntax;

TEST_CASE("parse polymorphic identity") {
  auto decls = parse_file("id : (A : U) -> A -> A\nid = \\A x. x");
  REQUIRE(decls.size() == 1);
  CHECK(decls[0].name == "id");
  REQUIRE(decls[0].body);
  auto ty = resolve(decls[0].annotation, {});
  auto body = resolve(decls[0].body, {});
  // (A : U) -> A -> A
  CHECK(equal(ty, pi(universe(), pi(var(0), var(1)))));
  CHECK(equal(body, lambda(lambda(var(0)))));
}

TEST_CASE("parse empty file") { CHECK(parse_file("").empty()); }

TEST_CASE("duplicate declaration name") {
  CHECK_THROWS_AS(parse_file("f : U\nf : U"), ParseError);
}

TEST_CASE("definition without annotation") {
  CHECK_THROWS_AS(parse_file("f = U"), ParseError);
}

TEST_CASE("resolve de Bruijn indices") {
  auto t = parse_term("\\A x. x");
  CHECK(equal(resolve(t, {}), lambda(lambda(var(0)))));
  auto u = parse_term("\\A x. A");
  CHECK(equal(resolve(u, {}), lambda(lambda(var(1)))));
  auto v = parse_term("\\x. y");
  CHECK_THROWS_AS(resolve(v, {}), UnboundError);
  CHECK(equal(resolve(parse_term("y"), {"y"}), var(0)));
}

TEST_CASE("alpha-equivalent terms resolve identically") {
  auto a = resolve(parse_term("\\f g x. f (g x)"), {});
  auto b = resolve(parse_term("\\u v w. u (v w)"), {});
  CHECK(equal(a, b));
}

TEST_CASE("pretty prints the documented forms") {
  CHECK(pretty(lambda(var(0))) == "\\x0. x0");
  CHECK(pretty(pi(universe(), var(0))) == "(x0 : U) -> x0");
  CHECK(pretty(trunc(nat())) == "||Nat||");
  CHECK(pretty(pi(nat(), nat())) == "Nat -> Nat");
  CHECK(pretty(enum_lit(2, 1)) == "#1:2");
}

TEST_CASE("multi-binder telescopes and groups") {
  auto a = resolve(parse_term("(A : U)(x y : A) -> Id A x y"), {});
  auto b = resolve(parse_term("(A : U) -> (x : A) -> (y : A) -> Id A x y"), {});
  CHECK(equal(a, b));
}

TEST_CASE("sigma and pair syntax") {
  auto t = resolve(parse_term("(x : Nat) * Id Nat x zero"), {});
  CHECK(t->kind == TermKind::Sigma);
  auto p = resolve(parse_term("(zero , suc zero)"), {});
  CHECK(equal(p, pair(zero(), succ(zero()))));
  auto triple = resolve(parse_term("(zero , zero , zero)"), {});
  CHECK(equal(triple, pair(zero(), pair(zero(), zero()))));
}

TEST_CASE("call forms parse") {
  auto t = resolve(parse_term("natrec(\\n. Nat, zero, \\k r. suc r, suc zero)"), {});
  CHECK(t->kind == TermKind::NatElim);
  auto c = resolve(parse_term("case(\\b. Nat, [zero, suc zero], #0:2)"), {});
  CHECK(c->kind == TermKind::EnumElim);
  CHECK(c->a == 2);
  auto e = resolve(parse_term("case(\\e. Nat, [], x)"), {"x"});
  CHECK(e->a == 0);
  auto j = resolve(parse_term("J(\\a b p. Nat, \\a. zero, refl zero)"), {});
  CHECK(j->kind == TermKind::IdElim);
  auto u = resolve(parse_term("ua(Enum 2, Enum 2, e)"), {"e"});
  CHECK(u->kind == TermKind::UnivalenceAx);
  auto tr = resolve(parse_term("trec(Enum 1, \\x. #0:1, w, tin zero)"), {"w"});
  CHECK(tr->kind == TermKind::TruncElim);
}

TEST_CASE("enum literal bounds checked at parse time") {
  CHECK_THROWS_AS(parse_term("#5:2"), ParseError);
  CHECK_THROWS_AS(parse_term("#2:2"), ParseError);
}

TEST_CASE("comments and continuation lines") {
  auto decls = parse_file(
      "-- a comment\n"
      "k : Nat -- trailing\n"
      "k = suc\n"
      "  (suc zero)\n");
  REQUIRE(decls.size() == 1);
  REQUIRE(decls[0].body);
  CHECK(equal(resolve(decls[0].body, {}), succ(succ(zero()))));
}

namespace {

// Structural fuzzer: closed terms of bounded depth over every former.
TermPtr gen_term(std::mt19937& rng, int depth, int scope);

TermPtr gen_term(std::mt19937& rng, int depth, int scope) {
  std::uniform_int_distribution<int> pick(0, depth <= 1 ? 6 : 21);
  switch (pick(rng)) {
    case 0: return nat();
    case 1: return zero();
    case 2: return universe();
    case 3: return enum_type(3);
    case 4: return enum_lit(3, std::uniform_int_distribution<int>(0, 2)(rng));
    case 5:
      if (scope > 0)
        return var(std::uniform_int_distribution<int>(0, scope - 1)(rng));
      return zero();
    case 6: return lambda(gen_term(rng, depth - 1, scope + 1));
    case 7: return pi(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope + 1));
    case 8: return sigma(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope + 1));
    case 9: return app(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope));
    case 10: return pair(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope));
    case 11: return proj_l(gen_term(rng, depth - 1, scope));
    case 12: return proj_r(gen_term(rng, depth - 1, scope));
    case 13:
      return id_type(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope),
                     gen_term(rng, depth - 1, scope));
    case 14: return refl(gen_term(rng, depth - 1, scope));
    case 15: return succ(gen_term(rng, depth - 1, scope));
    case 16: return trunc(gen_term(rng, depth - 1, scope));
    case 17: return trunc_in(gen_term(rng, depth - 1, scope));
    case 18:
      return nat_elim(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope),
                      gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope));
    case 19:
      return enum_elim(gen_term(rng, depth - 1, scope),
                       {gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope)},
                       gen_term(rng, depth - 1, scope));
    case 20:
      return id_elim(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope),
                     gen_term(rng, depth - 1, scope));
    default:
      return trunc_elim(gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope),
                        gen_term(rng, depth - 1, scope), gen_term(rng, depth - 1, scope));
  }
}

}  // namespace

TEST_CASE("round-trip: resolve(parse(pretty(t))) == t") {
  std::mt19937 rng(12345);
  for (int i = 0; i < 500; ++i) {
    auto t = gen_term(rng, 6, 0);
    auto printed = pretty(t);
    CAPTURE(printed);
    auto back = resolve(parse_term(printed), {});
    CHECK(equal(t, back));
  }
}

TEST_CASE("shift and uses_var") {
  auto t = lambda(app(var(0), var(1)));
  CHECK(equal(shift(t, 0, 2), lambda(app(var(0), var(3)))));
  CHECK(uses_var(*t, 0));
  CHECK_FALSE(uses_var(*t, 1));
  CHECK(free_depth(*t) == 1);
}
