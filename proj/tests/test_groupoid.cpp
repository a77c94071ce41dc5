#include "doctest.h"
#include "stacklab/interp.hpp"
#include "util.hpp"

using namespace stacklab;
using namespace stacklab::groupoid;
namespace syn = stacklab::syntax;
using syn::TermPtr;

namespace {

TermPtr tp(const std::string& s) { return syn::resolve(syn::parse_term(s), {}); }

Budget fresh_budget() { return Budget{}; }

}  // namespace

TEST_CASE("groupoid validation accepts the builders") {
  CHECK(validate_groupoid(discrete_groupoid(3)).ok);
  auto co = codiscrete_groupoid(2);
  CHECK(validate_groupoid(co).ok);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) CHECK(co.homset(x, y).size() == 1);
  CHECK(validate_groupoid(discrete_groupoid(0)).ok);
}

TEST_CASE("groupoid validation rejects a non-invertible table") {
  // a two-object category with a one-way arrow is not a groupoid
  FiniteGroupoid g;
  g.n_obj = 2;
  g.mor_src = {0, 1, 0};
  g.mor_dst = {0, 1, 1};
  g.comp = {{0, -1, -1}, {-1, 1, -1}, {-1, -1, -1}};
  g.comp[2][0] = 2;  // f . id = f
  g.comp[1][2] = 2;  // id . f = f
  g.id_mor = {0, 1};
  g.inv = {0, 1, -1};
  g.hom.assign(2, std::vector<std::vector<int>>(2));
  g.hom[0][0] = {0};
  g.hom[1][1] = {1};
  g.hom[0][1] = {2};
  auto rep = validate_groupoid(g);
  CHECK_FALSE(rep.ok);
  CHECK(rep.violation.find("inverse") != std::string::npos);
}

TEST_CASE("propositional groupoids") {
  CHECK(is_prop_groupoid(codiscrete_groupoid(5)));
  CHECK_FALSE(is_prop_groupoid(discrete_groupoid(2)));
  CHECK(is_prop_groupoid(discrete_groupoid(0)));  // vacuous
  CHECK(is_prop_groupoid(discrete_groupoid(1)));
}

TEST_CASE("interp: identity type over distinct enum points is empty") {
  auto env = empty_env();
  auto fam = interp_type(env, tp("Id (Enum 2) #0:2 #1:2"));
  CHECK(fam.fib[0].n_obj == 0);
}

TEST_CASE("interp: truncation is codiscrete") {
  auto env = empty_env();
  auto fam = interp_type(env, tp("||Enum 2||"));
  CHECK(fam.fib[0].n_obj == 2);
  CHECK(is_prop_groupoid(fam.fib[0]));
}

TEST_CASE("interp: function groupoid cardinalities match brute force") {
  auto env = empty_env();
  // |Pi(Enum m, Enum n)| = n^m over discrete fibers, identities only
  auto fam = interp_type(env, tp("Enum 2 -> Enum 3"));
  CHECK(fam.fib[0].n_obj == 9);
  CHECK(fam.fib[0].n_mor() == 9);
  auto fam2 = interp_type(env, tp("Enum 3 -> Enum 2"));
  CHECK(fam2.fib[0].n_obj == 8);
  // |Sigma(Enum m, Enum n)| = m*n
  auto fam3 = interp_type(env, tp("Enum 2 * Enum 3"));
  CHECK(fam3.fib[0].n_obj == 6);
  auto fam4 = interp_type(env, tp("(x : Enum 2) * Id (Enum 2) x #1:2"));
  CHECK(fam4.fib[0].n_obj == 1);  // only (1, refl)
}

TEST_CASE("families and sections validate exhaustively") {
  InterpOptions opts;
  opts.nat_cutoff = 5;
  auto env = empty_env(opts);
  for (const char* ty : {"Enum 3", "||Enum 3||", "Enum 2 -> Enum 2", "Enum 2 * Enum 2",
                         "Id (Enum 3) #1:3 #1:3", "Nat", "||Enum 0||", "U",
                         "Enum 2 -> ||Enum 2||", "||Enum 2|| -> Enum 2"}) {
    CAPTURE(ty);
    auto fam = interp_type(env, tp(ty));
    CHECK(validate_family(env.ctx, fam).ok);
  }
}

TEST_CASE("interp over a truncated context") {
  // context (t : ||Enum 2||): base groupoid is codiscrete(2)
  auto env = interp_context({tp("||Enum 2||")});
  CHECK(env.ctx.n_obj == 2);
  CHECK(is_prop_groupoid(env.ctx));
  auto fam = interp_type(env, tp("Enum 3"));
  CHECK(validate_family(env.ctx, fam).ok);
  auto s = interp_term(env, tp("#2:3"), tp("Enum 3"));
  CHECK(validate_section(env.ctx, fam, s).ok);
  CHECK(s.obj == std::vector<int>{2, 2});
}

TEST_CASE("interp over a universe context: El and transports") {
  auto env = interp_context({syn::universe()});
  // objects of the context are the cardinalities 0..max_card
  CHECK(env.ctx.n_obj == 5);
  auto fam = interp_type(env, syn::var(0));
  CHECK(validate_family(env.ctx, fam).ok);
  CHECK(fam.fib[0].n_obj == 0);
  CHECK(fam.fib[3].n_obj == 3);
  // identity function on the generic type
  auto s = interp_term(env, tp("\\x. x"), syn::pi(syn::var(0), syn::var(1)));
  auto pi_fam = interp_type(env, syn::pi(syn::var(0), syn::var(1)));
  CHECK(validate_family(env.ctx, pi_fam).ok);
  CHECK(validate_section(env.ctx, pi_fam, s).ok);
}

TEST_CASE("constant section examples") {
  auto env = empty_env();
  auto s = interp_term(env, tp("#1:3"), tp("Enum 3"));
  CHECK(s.obj == std::vector<int>{1});
  auto r = interp_term(env, tp("refl #0:2"), tp("Id (Enum 2) #0:2 #0:2"));
  CHECK(r.obj == std::vector<int>{0});
  auto idf = interp_term(env, tp("\\x. x"), tp("Enum 3 -> Enum 3"));
  auto fam = interp_type(env, tp("Enum 3 -> Enum 3"));
  CHECK(validate_section(env.ctx, fam, idf).ok);
}

namespace {

struct SoundnessCase {
  const char* lhs;
  const char* rhs;
  const char* type;
  bool conv_equal;        // expected conversion verdict
  bool sections_identical;  // table equality of the interpretations
};

// Thirty pairs over the context (g : Enum 2 -> Enum 2, x : Enum 2 * Enum 3,
// t : ||Enum 2||, u : Enum 3). Conversion-equal pairs must interpret to
// identical sections, except truncation cells, which are identified only up
// to the unique isomorphism of propositional fibers.
const SoundnessCase kSoundness[] = {
    {"#0:2", "#0:2", "Enum 2", true, true},
    {"\\y. y", "\\z. z", "Enum 3 -> Enum 3", true, true},
    {"\\y. g y", "g", "Enum 2 -> Enum 2", true, true},
    {"(fst x , snd x)", "x", "Enum 2 * Enum 3", true, true},
    {"fst x", "fst x", "Enum 2", true, true},
    {"snd x", "snd x", "Enum 3", true, true},
    {"refl (fst x)", "refl (fst x)", "Id (Enum 2) (fst x) (fst x)", true, true},
    {"t", "t", "||Enum 2||", true, true},
    {"tin (fst x)", "tin (fst x)", "||Enum 2||", true, true},
    {"u", "u", "Enum 3", true, true},
    {"\\y. g (g y)", "\\y. g (g y)", "Enum 2 -> Enum 2", true, true},
    {"(\\y. g y , tin #0:2)", "(g , tin #0:2)", "(Enum 2 -> Enum 2) * ||Enum 2||", true, true},
    {"\\y. fst x", "\\z. fst x", "Enum 3 -> Enum 2", true, true},
    {"suc zero", "suc zero", "Nat", true, true},
    {"\\p. fst p", "\\q. fst q", "(Enum 2 * Enum 2) -> Enum 2", true, true},
    {"\\y. x", "\\y. (fst x , snd x)", "Enum 3 -> (Enum 2 * Enum 3)", true, true},
    {"\\y. tin y", "\\y. tin y", "Enum 2 -> ||Enum 2||", true, true},
    {"(refl #1:2 , refl #0:3)", "(refl #1:2 , refl #0:3)",
     "(Id (Enum 2) #1:2 #1:2) * (Id (Enum 3) #0:3 #0:3)", true, true},
    {"\\y. snd x", "\\z. snd x", "Enum 2 -> Enum 3", true, true},
    {"ua(Enum 2, Enum 2, (\\a. a , \\a. a , \\a. refl a , \\b. refl b))",
     "ua(Enum 2, Enum 2, (\\a. a , \\a. a , \\a. refl a , \\b. refl b))",
     "Id U (Enum 2) (Enum 2)", true, true},
    // conversion-false pairs must interpret to different sections
    {"#0:2", "#1:2", "Enum 2", false, false},
    {"fst x", "case(\\c. Enum 2, [#1:2, #0:2], fst x)", "Enum 2", false, false},
    {"\\y. y", "\\y. case(\\c. Enum 2, [#1:2, #0:2], y)", "Enum 2 -> Enum 2", false, false},
    {"zero", "suc zero", "Nat", false, false},
    {"u", "#0:3", "Enum 3", false, false},
    {"(#0:2 , #1:2)", "(#1:2 , #1:2)", "Enum 2 * Enum 2", false, false},
    {"\\y. #0:2", "\\y. #1:2", "Enum 3 -> Enum 2", false, false},
    {"x", "(fst x , #0:3)", "Enum 2 * Enum 3", false, false},
    {"\\y. g y", "\\y. g (g y)", "Enum 2 -> Enum 2", false, false},
    // definitionally identified truncation cells: distinct tables, but the
    // fibers are propositional so the sections are uniquely isomorphic
    {"tin #0:2", "tin #1:2", "||Enum 2||", true, false},
};

}  // namespace

TEST_CASE("soundness corpus: conversion agreement transfers to sections") {
  std::vector<std::string> scope = {"g", "x", "t", "u"};
  std::vector<TermPtr> telescope = {tp("Enum 2 -> Enum 2"), tp("Enum 2 * Enum 3"),
                                    tp("||Enum 2||"), tp("Enum 3")};
  kernel::Context kctx;
  kctx.telescope = telescope;
  auto env = interp_context(telescope);
  int count = 0;
  for (const auto& c : kSoundness) {
    CAPTURE(c.lhs);
    CAPTURE(c.rhs);
    auto lhs = syn::resolve(syn::parse_term(c.lhs), scope);
    auto rhs = syn::resolve(syn::parse_term(c.rhs), scope);
    auto ty = syn::resolve(syn::parse_term(c.type), scope);
    CHECK(kernel::conv(kctx, lhs, rhs, ty) == c.conv_equal);
    auto fam = interp_type(env, ty);
    auto sl = interp_term(env, lhs, ty);
    auto sr = interp_term(env, rhs, ty);
    CHECK(validate_section(env.ctx, fam, sl).ok);
    CHECK(validate_section(env.ctx, fam, sr).ok);
    if (c.sections_identical) {
      CHECK(sl == sr);
    } else {
      CHECK(sl.obj != sr.obj);
      if (c.conv_equal) {
        // semantic proof irrelevance: the fibers identify the two cells
        for (const auto& fib : fam.fib) CHECK(is_prop_groupoid(fib));
      }
    }
    ++count;
  }
  CHECK(count == 30);
}

TEST_CASE("truncation fibers are propositional for every fragment type tested") {
  auto env = empty_env();
  for (const char* ty : {"Enum 0", "Enum 1", "Enum 3", "Enum 2 -> Enum 2", "Enum 2 * Enum 3",
                         "Id (Enum 2) #0:2 #0:2", "||Enum 2||", "U"}) {
    CAPTURE(ty);
    auto fam = interp_type(env, syn::trunc(tp(ty)));
    for (const auto& fib : fam.fib) CHECK(is_prop_groupoid(fib));
  }
}

TEST_CASE("univalence for the set universe at max_card 3") {
  auto rep = check_univalence_set_universe(3);
  CHECK(rep.ok);
  long diag[4] = {1, 1, 2, 6};
  for (const auto& cell : rep.cells) {
    if (cell.card_l == cell.card_r) {
      CHECK(cell.hom_count == diag[cell.card_l]);
      CHECK(cell.equiv_count == diag[cell.card_l]);
    } else {
      CHECK(cell.hom_count == 0);
      CHECK(cell.equiv_count == 0);
    }
    CHECK(cell.id_to_equiv_bijective);
  }
}

TEST_CASE("ua interprets as a genuine universe path") {
  auto env = empty_env();
  // identity equivalence on Enum 2 gives the identity path
  auto idequiv = tp("(\\x. x , \\x. x , \\x. refl x , \\y. refl y)");
  auto uaid = syn::ua(tp("Enum 2"), tp("Enum 2"), idequiv);
  auto s = interp_term(env, uaid, tp("Id U (Enum 2) (Enum 2)"));
  // swap equivalence gives the other one
  auto swap = tp(
      "(\\b. case(\\c. Enum 2, [#1:2, #0:2], b) , \\b. case(\\c. Enum 2, [#1:2, #0:2], b) , "
      "\\b. case(\\c. Id (Enum 2) (case(\\e. Enum 2, [#1:2, #0:2], case(\\e. Enum 2, [#1:2, #0:2], c))) c, "
      "[refl #0:2, refl #1:2], b) , "
      "\\b. case(\\c. Id (Enum 2) (case(\\e. Enum 2, [#1:2, #0:2], case(\\e. Enum 2, [#1:2, #0:2], c))) c, "
      "[refl #0:2, refl #1:2], b))");
  auto uaswap = syn::ua(tp("Enum 2"), tp("Enum 2"), swap);
  auto s2 = interp_term(env, uaswap, tp("Id U (Enum 2) (Enum 2)"));
  CHECK(s.obj != s2.obj);
  auto fam = interp_type(env, tp("Id U (Enum 2) (Enum 2)"));
  CHECK(fam.fib[0].n_obj == 2);  // two paths Bool = Bool
  CHECK(validate_section(env.ctx, fam, s).ok);
  CHECK(validate_section(env.ctx, fam, s2).ok);
}

TEST_CASE("nat sections respect the cutoff") {
  InterpOptions opts;
  opts.nat_cutoff = 4;
  auto env = empty_env(opts);
  auto s = interp_term(env, tp("suc (suc zero)"), syn::nat());
  CHECK(s.obj == std::vector<int>{2});
  CHECK_THROWS_AS(interp_term(env, tp("suc (suc (suc (suc (suc zero))))"), syn::nat()),
                  BoundExceeded);
}

TEST_CASE("equivalence search and validation") {
  auto b = fresh_budget();
  CHECK(are_equivalent(codiscrete_groupoid(3), codiscrete_groupoid(1), b));
  CHECK(are_equivalent(codiscrete_groupoid(2), discrete_groupoid(1), b));
  CHECK_FALSE(are_equivalent(discrete_groupoid(2), discrete_groupoid(3), b));
  CHECK_FALSE(are_equivalent(discrete_groupoid(0), discrete_groupoid(1), b));
  auto e = find_equivalence(codiscrete_groupoid(4), codiscrete_groupoid(2), b);
  REQUIRE(e.has_value());
  CHECK(validate_equivalence(codiscrete_groupoid(4), codiscrete_groupoid(2), *e).ok);
}

TEST_CASE("total groupoid of a constant family is a product") {
  Budget b;
  auto total = total_groupoid(discrete_groupoid(2), constant_family(discrete_groupoid(2), codiscrete_groupoid(3)), b);
  CHECK(total.gpd.n_obj == 6);
  CHECK(validate_groupoid(total.gpd).ok);
}
