#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacklab::syntax {

// Core terms are immutable, de Bruijn indexed, and shared freely.
enum class TermKind {
  Var,
  Pi,
  Lambda,
  App,
  Sigma,
  Pair,
  ProjL,
  ProjR,
  Id,
  Refl,
  IdElim,
  Nat,
  Zero,
  Succ,
  NatElim,
  Universe,
  Trunc,
  TruncIn,
  TruncElim,
  UnivalenceAx,
  Enum,
  EnumLit,
  EnumElim,
};

class Term;
using TermPtr = std::shared_ptr<const Term>;

// One node shape for every former: a kind, subterm list in fixed positional
// order, and up to two numeric payloads (de Bruijn index, cardinality,
// literal index). Binders: Pi/Sigma bind in subs[1], Lambda in subs[0].
class Term {
public:
  TermKind kind;
  std::vector<TermPtr> subs;
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  Term(TermKind k, std::vector<TermPtr> s, std::uint32_t a_ = 0, std::uint32_t b_ = 0)
      : kind(k), subs(std::move(s)), a(a_), b(b_) {}
};

inline TermPtr mk(TermKind k, std::vector<TermPtr> subs, std::uint32_t a = 0, std::uint32_t b = 0) {
  return std::make_shared<Term>(k, std::move(subs), a, b);
}

inline TermPtr var(std::uint32_t ix) { return mk(TermKind::Var, {}, ix); }
inline TermPtr pi(TermPtr dom, TermPtr cod) { return mk(TermKind::Pi, {std::move(dom), std::move(cod)}); }
inline TermPtr lambda(TermPtr body) { return mk(TermKind::Lambda, {std::move(body)}); }
inline TermPtr app(TermPtr fn, TermPtr arg) { return mk(TermKind::App, {std::move(fn), std::move(arg)}); }
inline TermPtr sigma(TermPtr fst, TermPtr snd) { return mk(TermKind::Sigma, {std::move(fst), std::move(snd)}); }
inline TermPtr pair(TermPtr fst, TermPtr snd) { return mk(TermKind::Pair, {std::move(fst), std::move(snd)}); }
inline TermPtr proj_l(TermPtr p) { return mk(TermKind::ProjL, {std::move(p)}); }
inline TermPtr proj_r(TermPtr p) { return mk(TermKind::ProjR, {std::move(p)}); }
inline TermPtr id_type(TermPtr ty, TermPtr lhs, TermPtr rhs) {
  return mk(TermKind::Id, {std::move(ty), std::move(lhs), std::move(rhs)});
}
inline TermPtr refl(TermPtr t) { return mk(TermKind::Refl, {std::move(t)}); }
inline TermPtr id_elim(TermPtr motive, TermPtr base, TermPtr target) {
  return mk(TermKind::IdElim, {std::move(motive), std::move(base), std::move(target)});
}
inline TermPtr nat() { return mk(TermKind::Nat, {}); }
inline TermPtr zero() { return mk(TermKind::Zero, {}); }
inline TermPtr succ(TermPtr n) { return mk(TermKind::Succ, {std::move(n)}); }
inline TermPtr nat_elim(TermPtr motive, TermPtr zcase, TermPtr scase, TermPtr target) {
  return mk(TermKind::NatElim, {std::move(motive), std::move(zcase), std::move(scase), std::move(target)});
}
inline TermPtr universe() { return mk(TermKind::Universe, {}); }
inline TermPtr trunc(TermPtr ty) { return mk(TermKind::Trunc, {std::move(ty)}); }
inline TermPtr trunc_in(TermPtr t) { return mk(TermKind::TruncIn, {std::move(t)}); }
inline TermPtr trunc_elim(TermPtr motive, TermPtr fn, TermPtr witness, TermPtr target) {
  return mk(TermKind::TruncElim, {std::move(motive), std::move(fn), std::move(witness), std::move(target)});
}
inline TermPtr ua(TermPtr ty_a, TermPtr ty_b, TermPtr equiv) {
  return mk(TermKind::UnivalenceAx, {std::move(ty_a), std::move(ty_b), std::move(equiv)});
}
inline TermPtr enum_type(std::uint32_t card) { return mk(TermKind::Enum, {}, card); }

inline TermPtr enum_lit(std::uint32_t card, std::uint32_t index) {
  if (index >= card) throw std::invalid_argument("enum literal index out of range");
  return mk(TermKind::EnumLit, {}, card, index);
}

// subs layout: [motive, case_0, ..., case_{k-1}, target]; a = k.
inline TermPtr enum_elim(TermPtr motive, std::vector<TermPtr> cases, TermPtr target) {
  std::vector<TermPtr> subs;
  subs.reserve(cases.size() + 2);
  subs.push_back(std::move(motive));
  auto card = static_cast<std::uint32_t>(cases.size());
  for (auto& c : cases) subs.push_back(std::move(c));
  subs.push_back(std::move(target));
  return mk(TermKind::EnumElim, std::move(subs), card);
}

inline const TermPtr& enum_elim_motive(const Term& t) { return t.subs[0]; }
inline const TermPtr& enum_elim_case(const Term& t, std::uint32_t i) { return t.subs[1 + i]; }
inline const TermPtr& enum_elim_target(const Term& t) { return t.subs[t.subs.size() - 1]; }

bool equal(const Term& lhs, const Term& rhs);
inline bool equal(const TermPtr& lhs, const TermPtr& rhs) { return equal(*lhs, *rhs); }

// Adds `amount` to every variable with index >= cutoff.
TermPtr shift(const TermPtr& t, std::uint32_t cutoff, std::uint32_t amount);

// True if variable `ix` (relative to the term's root) occurs free.
bool uses_var(const Term& t, std::uint32_t ix);

// Capture-avoiding substitution of `replacement` for variable `ix`;
// variables above `ix` shift down by one.
TermPtr subst(const TermPtr& t, std::uint32_t ix, const TermPtr& replacement);

// Largest free index + 1 (0 for closed terms).
std::uint32_t free_depth(const Term& t);

}  // namespace stacklab::syntax
