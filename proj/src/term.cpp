#include "stacklab/term.hpp"

#include <algorithm>

namespace stacklab::syntax {

bool equal(const Term& lhs, const Term& rhs) {
  if (lhs.kind != rhs.kind || lhs.a != rhs.a || lhs.b != rhs.b) return false;
  if (lhs.subs.size() != rhs.subs.size()) return false;
  for (std::size_t i = 0; i < lhs.subs.size(); ++i)
    if (!equal(*lhs.subs[i], *rhs.subs[i])) return false;
  return true;
}

namespace {

// Number of extra binders each child position introduces.
int binder_offset(TermKind kind, std::size_t child) {
  switch (kind) {
    case TermKind::Pi:
    case TermKind::Sigma:
      return child == 1 ? 1 : 0;
    case TermKind::Lambda:
      return 1;
    default:
      return 0;
  }
}

}  // namespace

TermPtr shift(const TermPtr& t, std::uint32_t cutoff, std::uint32_t amount) {
  if (amount == 0) return t;
  if (t->kind == TermKind::Var) {
    if (t->a >= cutoff) return var(t->a + amount);
    return t;
  }
  if (t->subs.empty()) return t;
  std::vector<TermPtr> subs;
  subs.reserve(t->subs.size());
  bool changed = false;
  for (std::size_t i = 0; i < t->subs.size(); ++i) {
    auto child = shift(t->subs[i], cutoff + binder_offset(t->kind, i), amount);
    changed = changed || child != t->subs[i];
    subs.push_back(std::move(child));
  }
  if (!changed) return t;
  return mk(t->kind, std::move(subs), t->a, t->b);
}

TermPtr subst(const TermPtr& t, std::uint32_t ix, const TermPtr& replacement) {
  if (t->kind == TermKind::Var) {
    if (t->a == ix) return replacement;
    if (t->a > ix) return var(t->a - 1);
    return t;
  }
  if (t->subs.empty()) return t;
  std::vector<TermPtr> subs;
  subs.reserve(t->subs.size());
  for (std::size_t i = 0; i < t->subs.size(); ++i) {
    auto off = static_cast<std::uint32_t>(binder_offset(t->kind, i));
    subs.push_back(subst(t->subs[i], ix + off, shift(replacement, 0, off)));
  }
  return mk(t->kind, std::move(subs), t->a, t->b);
}

bool uses_var(const Term& t, std::uint32_t ix) {
  if (t.kind == TermKind::Var) return t.a == ix;
  for (std::size_t i = 0; i < t.subs.size(); ++i)
    if (uses_var(*t.subs[i], ix + binder_offset(t.kind, i))) return true;
  return false;
}

std::uint32_t free_depth(const Term& t) {
  if (t.kind == TermKind::Var) return t.a + 1;
  std::uint32_t depth = 0;
  for (std::size_t i = 0; i < t.subs.size(); ++i) {
    auto off = static_cast<std::uint32_t>(binder_offset(t.kind, i));
    auto sub = free_depth(*t.subs[i]);
    depth = std::max(depth, sub > off ? sub - off : 0);
  }
  return depth;
}

}  // namespace stacklab::syntax
