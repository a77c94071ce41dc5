#include "stacklab/kernel.hpp"

#include <cassert>
#include <sstream>

namespace stacklab::kernel {

namespace syn = stacklab::syntax;
using syn::TermKind;

std::string to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Mismatch: return "Mismatch";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::NotAPair: return "NotAPair";
    case ErrorKind::UniverseExpected: return "UniverseExpected";
    case ErrorKind::PropWitnessInvalid: return "PropWitnessInvalid";
    case ErrorKind::Unbound: return "Unbound";
    case ErrorKind::IllFormedContext: return "IllFormedContext";
  }
  return "?";
}

namespace {

ValuePtr mkv(Value v) { return std::make_shared<Value>(std::move(v)); }

ValuePtr v_universe() {
  static const ValuePtr u = mkv({ValKind::Universe, {}, {}, 0, 0, {}});
  return u;
}
ValuePtr v_nat() {
  static const ValuePtr n = mkv({ValKind::Nat, {}, {}, 0, 0, {}});
  return n;
}
ValuePtr v_zero() {
  static const ValuePtr z = mkv({ValKind::Zero, {}, {}, 0, 0, {}});
  return z;
}
ValuePtr v_enum(std::uint32_t card) { return mkv({ValKind::Enum, {}, {}, card, 0, {}}); }
ValuePtr v_enum_lit(std::uint32_t card, std::uint32_t ix) {
  return mkv({ValKind::EnumLit, {}, {}, card, ix, {}});
}
ValuePtr v_pi(ValuePtr dom, Closure cod) {
  return mkv({ValKind::Pi, {std::move(dom)}, std::move(cod), 0, 0, {}});
}
ValuePtr v_sigma(ValuePtr fst, Closure snd) {
  return mkv({ValKind::Sigma, {std::move(fst)}, std::move(snd), 0, 0, {}});
}
ValuePtr v_id(ValuePtr ty, ValuePtr lhs, ValuePtr rhs) {
  return mkv({ValKind::Id, {std::move(ty), std::move(lhs), std::move(rhs)}, {}, 0, 0, {}});
}
ValuePtr v_trunc(ValuePtr ty) { return mkv({ValKind::Trunc, {std::move(ty)}, {}, 0, 0, {}}); }

ValuePtr push_spine(const Value& neutral, Elim e) {
  Value out = neutral;
  out.spine.push_back(std::move(e));
  return mkv(std::move(out));
}

ValuePtr do_proj_l(const ValuePtr& v);
ValuePtr do_proj_r(const ValuePtr& v);
ValuePtr do_nat_elim(const ValuePtr& motive, const ValuePtr& z, const ValuePtr& s, const ValuePtr& target);
ValuePtr do_enum_elim(const ValuePtr& motive, const std::vector<ValuePtr>& cases, std::uint32_t card,
                      const ValuePtr& target);
ValuePtr do_id_elim(const ValuePtr& motive, const ValuePtr& base, const ValuePtr& target);
ValuePtr do_trunc_elim(const ValuePtr& motive, const ValuePtr& fn, const ValuePtr& wit,
                       const ValuePtr& target);

}  // namespace

ValuePtr vvar(std::uint32_t level) { return mkv({ValKind::Neutral, {}, {}, level, 0, {}}); }

ValuePtr close_apply(const Closure& c, const ValuePtr& arg) {
  Env env = c.env;
  env.push_back(arg);
  return eval(env, *c.body);
}

ValuePtr vapp(const ValuePtr& fn, const ValuePtr& arg) {
  if (fn->kind == ValKind::Lambda) return close_apply(*fn->clo, arg);
  if (fn->kind == ValKind::Neutral) return push_spine(*fn, {Elim::Kind::App, {arg}, 0});
  throw std::logic_error("apply: not a function value");
}

namespace {

ValuePtr do_proj_l(const ValuePtr& v) {
  if (v->kind == ValKind::Pair) return v->vals[0];
  if (v->kind == ValKind::Neutral) return push_spine(*v, {Elim::Kind::ProjL, {}, 0});
  throw std::logic_error("proj_l: not a pair value");
}

ValuePtr do_proj_r(const ValuePtr& v) {
  if (v->kind == ValKind::Pair) return v->vals[1];
  if (v->kind == ValKind::Neutral) return push_spine(*v, {Elim::Kind::ProjR, {}, 0});
  throw std::logic_error("proj_r: not a pair value");
}

ValuePtr do_nat_elim(const ValuePtr& motive, const ValuePtr& z, const ValuePtr& s,
                     const ValuePtr& target) {
  if (target->kind == ValKind::Zero) return z;
  if (target->kind == ValKind::Succ) {
    const ValuePtr& pred = target->vals[0];
    return vapp(vapp(s, pred), do_nat_elim(motive, z, s, pred));
  }
  if (target->kind == ValKind::Neutral)
    return push_spine(*target, {Elim::Kind::NatElim, {motive, z, s}, 0});
  throw std::logic_error("nat_elim: not a numeral");
}

ValuePtr do_enum_elim(const ValuePtr& motive, const std::vector<ValuePtr>& cases, std::uint32_t card,
                      const ValuePtr& target) {
  if (target->kind == ValKind::EnumLit) return cases.at(target->b);
  if (target->kind == ValKind::Neutral) {
    std::vector<ValuePtr> args;
    args.push_back(motive);
    for (const auto& c : cases) args.push_back(c);
    return push_spine(*target, {Elim::Kind::EnumElim, std::move(args), card});
  }
  throw std::logic_error("enum_elim: not an enum literal");
}

ValuePtr do_id_elim(const ValuePtr& motive, const ValuePtr& base, const ValuePtr& target) {
  if (target->kind == ValKind::Refl) return vapp(base, target->vals[0]);
  // ua paths are inert: J on them stays stuck, as does J on neutral proofs.
  if (target->kind == ValKind::Neutral)
    return push_spine(*target, {Elim::Kind::IdElim, {motive, base}, 0});
  if (target->kind == ValKind::UA) {
    Value stuck{ValKind::Neutral, {target}, {}, UINT32_MAX, 0, {}};
    // Represent a stuck J-on-ua as a neutral with a sentinel head carrying
    // the axiom value; it only ever gets quoted or compared structurally.
    stuck.spine.push_back({Elim::Kind::IdElim, {motive, base}, 0});
    return mkv(std::move(stuck));
  }
  throw std::logic_error("id_elim: not an identity proof");
}

ValuePtr do_trunc_elim(const ValuePtr& motive, const ValuePtr& fn, const ValuePtr& wit,
                       const ValuePtr& target) {
  if (target->kind == ValKind::TruncIn) return vapp(fn, target->vals[0]);
  if (target->kind == ValKind::Neutral)
    return push_spine(*target, {Elim::Kind::TruncElim, {motive, fn, wit}, 0});
  throw std::logic_error("trunc_elim: not a truncation element");
}

}  // namespace

ValuePtr eval(const Env& env, const Term& t) {
  auto at = [&](std::size_t i) { return eval(env, *t.subs[i]); };
  switch (t.kind) {
    case TermKind::Var: {
      if (t.a >= env.size()) throw std::logic_error("eval: unbound variable");
      return env[env.size() - 1 - t.a];
    }
    case TermKind::Pi: return v_pi(at(0), Closure{env, t.subs[1]});
    case TermKind::Sigma: return v_sigma(at(0), Closure{env, t.subs[1]});
    case TermKind::Lambda: return mkv({ValKind::Lambda, {}, Closure{env, t.subs[0]}, 0, 0, {}});
    case TermKind::App: return vapp(at(0), at(1));
    case TermKind::Pair: return mkv({ValKind::Pair, {at(0), at(1)}, {}, 0, 0, {}});
    case TermKind::ProjL: return do_proj_l(at(0));
    case TermKind::ProjR: return do_proj_r(at(0));
    case TermKind::Id: return v_id(at(0), at(1), at(2));
    case TermKind::Refl: return mkv({ValKind::Refl, {at(0)}, {}, 0, 0, {}});
    case TermKind::IdElim: return do_id_elim(at(0), at(1), at(2));
    case TermKind::Nat: return v_nat();
    case TermKind::Zero: return v_zero();
    case TermKind::Succ: return mkv({ValKind::Succ, {at(0)}, {}, 0, 0, {}});
    case TermKind::NatElim: return do_nat_elim(at(0), at(1), at(2), at(3));
    case TermKind::Universe: return v_universe();
    case TermKind::Trunc: return v_trunc(at(0));
    case TermKind::TruncIn: return mkv({ValKind::TruncIn, {at(0)}, {}, 0, 0, {}});
    case TermKind::TruncElim: return do_trunc_elim(at(0), at(1), at(2), at(3));
    case TermKind::UnivalenceAx: return mkv({ValKind::UA, {at(0), at(1), at(2)}, {}, 0, 0, {}});
    case TermKind::Enum: return v_enum(t.a);
    case TermKind::EnumLit: return v_enum_lit(t.a, t.b);
    case TermKind::EnumElim: {
      std::vector<ValuePtr> cases;
      cases.reserve(t.a);
      for (std::uint32_t i = 0; i < t.a; ++i) cases.push_back(eval(env, *syn::enum_elim_case(t, i)));
      return do_enum_elim(at(0), cases, t.a, eval(env, *syn::enum_elim_target(t)));
    }
  }
  throw std::logic_error("eval: unhandled term");
}

// ---------------------------------------------------------------------------
// Synthetic motive/witness types. Written once as raw de Bruijn terms and
// evaluated in small environments.

namespace {

using syn::app;
using syn::id_type;
using syn::lambda;
using syn::mk;
using syn::pi;
using syn::refl;
using syn::sigma;
using syn::succ;
using syn::universe;
using syn::var;

// env [motive] |- (n : Nat) -> motive n -> motive (suc n)
const TermPtr& nat_step_type_term() {
  static const TermPtr t =
      pi(syn::nat(), pi(app(var(1), var(0)), app(var(2), succ(var(1)))));
  return t;
}

// env [T] |- (x y : T) -> Id T x y -> U
const TermPtr& id_motive_type_term() {
  static const TermPtr t =
      pi(var(0), pi(var(1), pi(id_type(var(2), var(1), var(0)), universe())));
  return t;
}

// env [T, motive] |- (x : T) -> motive x x (refl x)
const TermPtr& id_base_type_term() {
  static const TermPtr t =
      pi(var(1), app(app(app(var(1), var(0)), var(0)), refl(var(0))));
  return t;
}

// env [P] |- (x y : P) -> Id P x y
const TermPtr& prop_witness_type_term() {
  static const TermPtr t = pi(var(0), pi(var(1), id_type(var(2), var(1), var(0))));
  return t;
}

// env [A, B] |- sigma record of two maps with section/retraction homotopies
const TermPtr& equiv_record_term() {
  static const TermPtr t = sigma(
      pi(var(1), var(1)),
      sigma(pi(var(1), var(3)),
            sigma(pi(var(3), id_type(var(4), app(var(1), app(var(2), var(0))), var(0))),
                  pi(var(3), id_type(var(4), app(var(3), app(var(2), var(0))), var(0))))));
  return t;
}

ValuePtr eval_in(std::initializer_list<ValuePtr> env, const TermPtr& t) {
  return eval(Env(env), *t);
}

ValuePtr nat_motive_type() {
  static const ValuePtr v = eval_in({}, pi(syn::nat(), universe()));
  return v;
}

ValuePtr enum_motive_type(std::uint32_t card) {
  return eval_in({}, pi(syn::enum_type(card), universe()));
}

ValuePtr fn_type(const ValuePtr& dom, const ValuePtr& cod) {
  // codomain closure ignores its argument: env [cod], body var 1
  return v_pi(dom, Closure{{cod}, var(1)});
}

}  // namespace

// ---------------------------------------------------------------------------
// Checker

struct Checker::PathGuard {
  Checker& c;
  explicit PathGuard(Checker& c_, int ix) : c(c_) { c.path_.push_back(ix); }
  ~PathGuard() { c.path_.pop_back(); }
};

namespace {

// Scoped binder push for env/lvl_types.
struct BinderScope {
  Env& env;
  std::vector<ValuePtr>& lvls;
  BinderScope(Env& env_, std::vector<ValuePtr>& lvls_, const ValuePtr& type) : env(env_), lvls(lvls_) {
    env.push_back(vvar(static_cast<std::uint32_t>(env.size())));
    lvls.push_back(type);
  }
  ~BinderScope() {
    env.pop_back();
    lvls.pop_back();
  }
};

}  // namespace

Checker::Checker() = default;

Checker::Checker(const Context& ctx) {
  for (const auto& ty : ctx.telescope) {
    try {
      ensure_type(*ty);
    } catch (const TypingError& e) {
      throw TypingError(ErrorKind::IllFormedContext, e.path,
                        "ill-formed context entry: " + std::string(e.what()));
    }
    push_postulate(ty);
  }
}

void Checker::push_postulate(const TermPtr& type) {
  ValuePtr v = eval_here(*type);
  env_.push_back(vvar(static_cast<std::uint32_t>(env_.size())));
  lvl_types_.push_back(std::move(v));
}

void Checker::push_definition(const TermPtr& type, const TermPtr& body) {
  ValuePtr ty = eval_here(*type);
  ValuePtr v = eval_here(*body);
  env_.push_back(std::move(v));
  lvl_types_.push_back(std::move(ty));
}

void Checker::fail(ErrorKind kind, const std::string& msg, TermPtr expected, TermPtr actual) const {
  throw TypingError(kind, path_, msg, std::move(expected), std::move(actual));
}

ValuePtr Checker::equiv_record_type(const ValuePtr& a, const ValuePtr& b) const {
  return eval_in({a, b}, equiv_record_term());
}

ValuePtr Checker::infer_value(const Term& t) { return infer(t); }
void Checker::check_value(const Term& t, const ValuePtr& type) { check(t, type); }
bool Checker::conv_value(const ValuePtr& lhs, const ValuePtr& rhs, const ValuePtr& type) {
  return conv(lhs, rhs, type);
}

void Checker::ensure_type(const Term& t) {
  switch (t.kind) {
    case TermKind::Universe:
      return;
    case TermKind::Pi:
    case TermKind::Sigma: {
      {
        PathGuard g(*this, 0);
        ensure_type(*t.subs[0]);
      }
      ValuePtr dom = eval_here(*t.subs[0]);
      BinderScope scope(env_, lvl_types_, dom);
      PathGuard g(*this, 1);
      ensure_type(*t.subs[1]);
      return;
    }
    case TermKind::Trunc: {
      PathGuard g(*this, 0);
      ensure_type(*t.subs[0]);
      return;
    }
    case TermKind::Id: {
      {
        PathGuard g(*this, 0);
        ensure_type(*t.subs[0]);
      }
      ValuePtr ty = eval_here(*t.subs[0]);
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], ty);
      }
      PathGuard g(*this, 2);
      check(*t.subs[2], ty);
      return;
    }
    case TermKind::Nat:
    case TermKind::Enum:
      return;
    default:
      check(t, v_universe());
  }
}

ValuePtr Checker::infer_trunc_payload(const Term& target, ValuePtr* target_value) {
  // trec's target: when it is a literal `tin a` the payload type is inferred
  // from a; otherwise the target itself must synthesize some ||A||.
  if (target.kind == TermKind::TruncIn) {
    ValuePtr payload_ty;
    {
      PathGuard g(*this, 0);
      payload_ty = infer(*target.subs[0]);
    }
    *target_value = eval_here(target);
    return payload_ty;
  }
  ValuePtr ty = infer(target);
  if (ty->kind != ValKind::Trunc)
    fail(ErrorKind::Mismatch, "truncation eliminee must have a truncation type",
         syn::trunc(syn::universe()), quote_type(ty));
  *target_value = eval_here(target);
  return ty->vals[0];
}

ValuePtr Checker::infer(const Term& t) {
  switch (t.kind) {
    case TermKind::Var: {
      if (t.a >= env_.size()) fail(ErrorKind::Unbound, "variable index out of scope");
      return lvl_types_[env_.size() - 1 - t.a];
    }
    case TermKind::Pi:
    case TermKind::Sigma: {
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], v_universe());
      }
      ValuePtr dom = eval_here(*t.subs[0]);
      BinderScope scope(env_, lvl_types_, dom);
      PathGuard g(*this, 1);
      check(*t.subs[1], v_universe());
      return v_universe();
    }
    case TermKind::Lambda:
      fail(ErrorKind::NotAFunction, "cannot synthesize a function type for a bare lambda");
    case TermKind::App: {
      ValuePtr fn_ty;
      {
        PathGuard g(*this, 0);
        fn_ty = infer(*t.subs[0]);
      }
      if (fn_ty->kind != ValKind::Pi)
        fail(ErrorKind::NotAFunction, "application head is not a function",
             nullptr, quote_type(fn_ty));
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], fn_ty->vals[0]);
      }
      return close_apply(*fn_ty->clo, eval_here(*t.subs[1]));
    }
    case TermKind::Pair:
      fail(ErrorKind::NotAPair, "cannot synthesize a pair type; annotate the pair");
    case TermKind::ProjL: {
      ValuePtr ty;
      {
        PathGuard g(*this, 0);
        ty = infer(*t.subs[0]);
      }
      if (ty->kind != ValKind::Sigma)
        fail(ErrorKind::NotAPair, "projection target is not a pair", nullptr, quote_type(ty));
      return ty->vals[0];
    }
    case TermKind::ProjR: {
      ValuePtr ty;
      {
        PathGuard g(*this, 0);
        ty = infer(*t.subs[0]);
      }
      if (ty->kind != ValKind::Sigma)
        fail(ErrorKind::NotAPair, "projection target is not a pair", nullptr, quote_type(ty));
      return close_apply(*ty->clo, do_proj_l(eval_here(*t.subs[0])));
    }
    case TermKind::Id: {
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], v_universe());
      }
      ValuePtr ty = eval_here(*t.subs[0]);
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], ty);
      }
      PathGuard g(*this, 2);
      check(*t.subs[2], ty);
      return v_universe();
    }
    case TermKind::Refl: {
      ValuePtr ty;
      {
        PathGuard g(*this, 0);
        ty = infer(*t.subs[0]);
      }
      ValuePtr v = eval_here(*t.subs[0]);
      return v_id(ty, v, v);
    }
    case TermKind::IdElim: {
      ValuePtr proof_ty;
      {
        PathGuard g(*this, 2);
        proof_ty = infer(*t.subs[2]);
      }
      if (proof_ty->kind != ValKind::Id)
        fail(ErrorKind::Mismatch, "J target must be an identity proof",
             syn::id_type(syn::universe(), syn::var(0), syn::var(0)), quote_type(proof_ty));
      const ValuePtr& ty = proof_ty->vals[0];
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], eval_in({ty}, id_motive_type_term()));
      }
      ValuePtr motive = eval_here(*t.subs[0]);
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], eval_in({ty, motive}, id_base_type_term()));
      }
      return vapp(vapp(vapp(motive, proof_ty->vals[1]), proof_ty->vals[2]),
                   eval_here(*t.subs[2]));
    }
    case TermKind::Nat:
      return v_universe();
    case TermKind::Zero:
      return v_nat();
    case TermKind::Succ: {
      PathGuard g(*this, 0);
      check(*t.subs[0], v_nat());
      return v_nat();
    }
    case TermKind::NatElim: {
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], nat_motive_type());
      }
      ValuePtr motive = eval_here(*t.subs[0]);
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], vapp(motive, v_zero()));
      }
      {
        PathGuard g(*this, 2);
        check(*t.subs[2], eval_in({motive}, nat_step_type_term()));
      }
      {
        PathGuard g(*this, 3);
        check(*t.subs[3], v_nat());
      }
      return vapp(motive, eval_here(*t.subs[3]));
    }
    case TermKind::Universe:
      fail(ErrorKind::UniverseExpected, "the universe has no type (U : U is rejected)");
    case TermKind::Trunc: {
      PathGuard g(*this, 0);
      check(*t.subs[0], v_universe());
      return v_universe();
    }
    case TermKind::TruncIn:
      fail(ErrorKind::Mismatch,
           "cannot synthesize the type of a truncation introduction; a checking annotation is needed",
           nullptr, nullptr);
    case TermKind::TruncElim: {
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], v_universe());
      }
      ValuePtr motive = eval_here(*t.subs[0]);
      ValuePtr target_value;
      ValuePtr payload;
      {
        PathGuard g(*this, 3);
        payload = infer_trunc_payload(*t.subs[3], &target_value);
      }
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], fn_type(payload, motive));
      }
      {
        PathGuard g(*this, 2);
        try {
          check(*t.subs[2], eval_in({motive}, prop_witness_type_term()));
        } catch (const TypingError& e) {
          fail(ErrorKind::PropWitnessInvalid,
               std::string("elimination target type is not a proposition: ") + e.what());
        }
      }
      return motive;
    }
    case TermKind::UnivalenceAx: {
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], v_universe());
      }
      {
        PathGuard g(*this, 1);
        check(*t.subs[1], v_universe());
      }
      ValuePtr a = eval_here(*t.subs[0]);
      ValuePtr b = eval_here(*t.subs[1]);
      {
        PathGuard g(*this, 2);
        check(*t.subs[2], equiv_record_type(a, b));
      }
      return v_id(v_universe(), a, b);
    }
    case TermKind::Enum:
      return v_universe();
    case TermKind::EnumLit:
      return v_enum(t.a);
    case TermKind::EnumElim: {
      {
        PathGuard g(*this, 0);
        check(*syn::enum_elim_motive(t), enum_motive_type(t.a));
      }
      ValuePtr motive = eval_here(*syn::enum_elim_motive(t));
      for (std::uint32_t i = 0; i < t.a; ++i) {
        PathGuard g(*this, static_cast<int>(1 + i));
        check(*syn::enum_elim_case(t, i), vapp(motive, v_enum_lit(t.a, i)));
      }
      {
        PathGuard g(*this, static_cast<int>(t.subs.size() - 1));
        check(*syn::enum_elim_target(t), v_enum(t.a));
      }
      return vapp(motive, eval_here(*syn::enum_elim_target(t)));
    }
  }
  throw std::logic_error("infer: unhandled term");
}

void Checker::check(const Term& t, const ValuePtr& type) {
  switch (t.kind) {
    case TermKind::Lambda: {
      if (type->kind != ValKind::Pi)
        fail(ErrorKind::Mismatch, "lambda checked against a non-function type",
             quote_type(type), syn::lambda(t.subs[0]));
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      ValuePtr cod = close_apply(*type->clo, fresh);
      BinderScope scope(env_, lvl_types_, type->vals[0]);
      PathGuard g(*this, 0);
      check(*t.subs[0], cod);
      return;
    }
    case TermKind::Pair: {
      if (type->kind != ValKind::Sigma)
        fail(ErrorKind::Mismatch, "pair checked against a non-pair type",
             quote_type(type), syn::pair(t.subs[0], t.subs[1]));
      {
        PathGuard g(*this, 0);
        check(*t.subs[0], type->vals[0]);
      }
      PathGuard g(*this, 1);
      check(*t.subs[1], close_apply(*type->clo, eval_here(*t.subs[0])));
      return;
    }
    case TermKind::TruncIn: {
      if (type->kind != ValKind::Trunc)
        fail(ErrorKind::Mismatch, "truncation introduction checked against a non-truncation type",
             quote_type(type), syn::trunc_in(t.subs[0]));
      PathGuard g(*this, 0);
      check(*t.subs[0], type->vals[0]);
      return;
    }
    case TermKind::Refl: {
      if (type->kind == ValKind::Id) {
        {
          PathGuard g(*this, 0);
          check(*t.subs[0], type->vals[0]);
        }
        ValuePtr v = eval_here(*t.subs[0]);
        if (!conv(v, type->vals[1], type->vals[0]) || !conv(v, type->vals[2], type->vals[0]))
          fail(ErrorKind::Mismatch, "refl endpoint does not match the identity type",
               quote_type(type), quote_type(v_id(type->vals[0], v, v)));
        return;
      }
      break;  // fall through to synthesis
    }
    case TermKind::UnivalenceAx: {
      if (type->kind == ValKind::Id && type->vals[0]->kind == ValKind::Universe) {
        {
          PathGuard g(*this, 0);
          check(*t.subs[0], v_universe());
        }
        {
          PathGuard g(*this, 1);
          check(*t.subs[1], v_universe());
        }
        ValuePtr a = eval_here(*t.subs[0]);
        ValuePtr b = eval_here(*t.subs[1]);
        if (!conv_type(a, type->vals[1]) || !conv_type(b, type->vals[2]))
          fail(ErrorKind::Mismatch, "ua endpoints do not match the identity type",
               quote_type(type), quote_type(v_id(v_universe(), a, b)));
        PathGuard g(*this, 2);
        check(*t.subs[2], equiv_record_type(a, b));
        return;
      }
      break;
    }
    default:
      break;
  }
  ValuePtr actual = infer(t);
  if (!conv_type(actual, type))
    fail(ErrorKind::Mismatch, "type mismatch", quote_type(type), quote_type(actual));
}

// ---------------------------------------------------------------------------
// Conversion

bool Checker::conv(const ValuePtr& l, const ValuePtr& r, const ValuePtr& type) {
  switch (type->kind) {
    case ValKind::Trunc:
      // Elements of a truncation are definitionally identified.
      return true;
    case ValKind::Pi: {
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      ValuePtr cod = close_apply(*type->clo, fresh);
      BinderScope scope(env_, lvl_types_, type->vals[0]);
      return conv(vapp(l, fresh), vapp(r, fresh), cod);
    }
    case ValKind::Sigma: {
      ValuePtr lf = do_proj_l(l), rf = do_proj_l(r);
      if (!conv(lf, rf, type->vals[0])) return false;
      return conv(do_proj_r(l), do_proj_r(r), close_apply(*type->clo, lf));
    }
    case ValKind::Universe:
      return conv_type(l, r);
    case ValKind::Nat: {
      const Value *a = l.get(), *b = r.get();
      while (a->kind == ValKind::Succ && b->kind == ValKind::Succ) {
        a = a->vals[0].get();
        b = b->vals[0].get();
      }
      if (a->kind == ValKind::Zero && b->kind == ValKind::Zero) return true;
      if (a->kind == ValKind::Neutral && b->kind == ValKind::Neutral)
        return conv_neutral(*a, *b).has_value();
      return false;
    }
    case ValKind::Enum:
      if (l->kind == ValKind::EnumLit && r->kind == ValKind::EnumLit) return l->b == r->b;
      if (l->kind == ValKind::Neutral && r->kind == ValKind::Neutral)
        return conv_neutral(*l, *r).has_value();
      return false;
    case ValKind::Id: {
      if (l->kind == ValKind::Refl && r->kind == ValKind::Refl)
        return conv(l->vals[0], r->vals[0], type->vals[0]);
      if (l->kind == ValKind::UA && r->kind == ValKind::UA)
        return conv_type(l->vals[0], r->vals[0]) && conv_type(l->vals[1], r->vals[1]) &&
               conv(l->vals[2], r->vals[2], equiv_record_type(l->vals[0], l->vals[1]));
      if (l->kind == ValKind::Neutral && r->kind == ValKind::Neutral)
        return conv_neutral(*l, *r).has_value();
      return false;
    }
    default:
      // Neutral type: both sides are neutral for well-typed input.
      if (l->kind == ValKind::Neutral && r->kind == ValKind::Neutral)
        return conv_neutral(*l, *r).has_value();
      return false;
  }
}

bool Checker::conv_type(const ValuePtr& l, const ValuePtr& r) {
  if (l->kind != r->kind) {
    if (l->kind == ValKind::Neutral || r->kind == ValKind::Neutral) return false;
    return false;
  }
  switch (l->kind) {
    case ValKind::Universe:
    case ValKind::Nat:
      return true;
    case ValKind::Enum:
      return l->a == r->a;
    case ValKind::Trunc:
      return conv_type(l->vals[0], r->vals[0]);
    case ValKind::Pi:
    case ValKind::Sigma: {
      if (!conv_type(l->vals[0], r->vals[0])) return false;
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      BinderScope scope(env_, lvl_types_, l->vals[0]);
      return conv_type(close_apply(*l->clo, fresh), close_apply(*r->clo, fresh));
    }
    case ValKind::Id:
      return conv_type(l->vals[0], r->vals[0]) && conv(l->vals[1], r->vals[1], l->vals[0]) &&
             conv(l->vals[2], r->vals[2], l->vals[0]);
    case ValKind::Neutral:
      return conv_neutral(*l, *r).has_value();
    default:
      return false;
  }
}

std::optional<ValuePtr> Checker::conv_neutral(const Value& l, const Value& r) {
  if (l.a != r.a || l.spine.size() != r.spine.size()) return std::nullopt;
  ValuePtr type;
  if (l.a == UINT32_MAX) {
    // stuck J-on-ua sentinel: compare the carried axiom values structurally
    if (r.a != UINT32_MAX) return std::nullopt;
    if (!conv_type(l.vals[0]->vals[0], r.vals[0]->vals[0]) ||
        !conv_type(l.vals[0]->vals[1], r.vals[0]->vals[1]))
      return std::nullopt;
    type = v_id(v_universe(), l.vals[0]->vals[0], l.vals[0]->vals[1]);
  } else {
    if (l.a >= lvl_types_.size()) return std::nullopt;
    type = lvl_types_[l.a];
  }
  // Reconstruct the neutral step by step so elimination result types can be
  // formed for motives.
  Value target{ValKind::Neutral, l.vals, {}, l.a, 0, {}};
  for (std::size_t i = 0; i < l.spine.size(); ++i) {
    const Elim& el = l.spine[i];
    const Elim& er = r.spine[i];
    if (el.kind != er.kind) return std::nullopt;
    ValuePtr target_v = mkv(target);
    switch (el.kind) {
      case Elim::Kind::App: {
        if (type->kind != ValKind::Pi) return std::nullopt;
        if (!conv(el.args[0], er.args[0], type->vals[0])) return std::nullopt;
        type = close_apply(*type->clo, el.args[0]);
        break;
      }
      case Elim::Kind::ProjL: {
        if (type->kind != ValKind::Sigma) return std::nullopt;
        type = type->vals[0];
        break;
      }
      case Elim::Kind::ProjR: {
        if (type->kind != ValKind::Sigma) return std::nullopt;
        type = close_apply(*type->clo, do_proj_l(target_v));
        break;
      }
      case Elim::Kind::NatElim: {
        if (type->kind != ValKind::Nat) return std::nullopt;
        if (!conv(el.args[0], er.args[0], nat_motive_type())) return std::nullopt;
        const ValuePtr& motive = el.args[0];
        if (!conv(el.args[1], er.args[1], vapp(motive, v_zero()))) return std::nullopt;
        if (!conv(el.args[2], er.args[2], eval_in({motive}, nat_step_type_term())))
          return std::nullopt;
        type = vapp(motive, target_v);
        break;
      }
      case Elim::Kind::EnumElim: {
        if (type->kind != ValKind::Enum || el.card != er.card) return std::nullopt;
        if (!conv(el.args[0], er.args[0], enum_motive_type(el.card))) return std::nullopt;
        const ValuePtr& motive = el.args[0];
        for (std::uint32_t c = 0; c < el.card; ++c)
          if (!conv(el.args[1 + c], er.args[1 + c], vapp(motive, v_enum_lit(el.card, c))))
            return std::nullopt;
        type = vapp(motive, target_v);
        break;
      }
      case Elim::Kind::IdElim: {
        if (type->kind != ValKind::Id) return std::nullopt;
        const ValuePtr& ty = type->vals[0];
        if (!conv(el.args[0], er.args[0], eval_in({ty}, id_motive_type_term())))
          return std::nullopt;
        const ValuePtr& motive = el.args[0];
        if (!conv(el.args[1], er.args[1], eval_in({ty, motive}, id_base_type_term())))
          return std::nullopt;
        type = vapp(vapp(vapp(motive, type->vals[1]), type->vals[2]), target_v);
        break;
      }
      case Elim::Kind::TruncElim: {
        if (type->kind != ValKind::Trunc) return std::nullopt;
        if (!conv_type(el.args[0], er.args[0])) return std::nullopt;
        const ValuePtr& motive = el.args[0];
        if (!conv(el.args[1], er.args[1], fn_type(type->vals[0], motive))) return std::nullopt;
        if (!conv(el.args[2], er.args[2], eval_in({motive}, prop_witness_type_term())))
          return std::nullopt;
        type = motive;
        break;
      }
    }
    target.spine.push_back(el);
  }
  return type;
}

// ---------------------------------------------------------------------------
// Readback

TermPtr Checker::quote_neutral(const Value& n) {
  TermPtr acc;
  if (n.a == UINT32_MAX) {
    const Value& ax = *n.vals[0];
    acc = syn::ua(quote_type(ax.vals[0]), quote_type(ax.vals[1]), quote_untyped(ax.vals[2]));
  } else {
    std::size_t d = env_.size();
    if (n.a >= d) throw std::logic_error("quote: variable level out of scope");
    acc = syn::var(static_cast<std::uint32_t>(d - 1 - n.a));
  }
  for (const Elim& e : n.spine) {
    switch (e.kind) {
      case Elim::Kind::App:
        acc = syn::app(acc, quote_untyped(e.args[0]));
        break;
      case Elim::Kind::ProjL:
        acc = syn::proj_l(acc);
        break;
      case Elim::Kind::ProjR:
        acc = syn::proj_r(acc);
        break;
      case Elim::Kind::NatElim:
        acc = syn::nat_elim(quote_untyped(e.args[0]), quote_untyped(e.args[1]),
                            quote_untyped(e.args[2]), acc);
        break;
      case Elim::Kind::EnumElim: {
        std::vector<TermPtr> cases;
        for (std::uint32_t c = 0; c < e.card; ++c) cases.push_back(quote_untyped(e.args[1 + c]));
        acc = syn::enum_elim(quote_untyped(e.args[0]), std::move(cases), acc);
        break;
      }
      case Elim::Kind::IdElim:
        acc = syn::id_elim(quote_untyped(e.args[0]), quote_untyped(e.args[1]), acc);
        break;
      case Elim::Kind::TruncElim:
        acc = syn::trunc_elim(quote_type(e.args[0]), quote_untyped(e.args[1]),
                              quote_untyped(e.args[2]), acc);
        break;
    }
  }
  return acc;
}

TermPtr Checker::quote_untyped(const ValuePtr& v) {
  switch (v->kind) {
    case ValKind::Neutral:
      return quote_neutral(*v);
    case ValKind::Lambda: {
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      BinderScope scope(env_, lvl_types_, v_universe());
      return syn::lambda(quote_untyped(vapp(v, fresh)));
    }
    case ValKind::Pair:
      return syn::pair(quote_untyped(v->vals[0]), quote_untyped(v->vals[1]));
    case ValKind::Refl:
      return syn::refl(quote_untyped(v->vals[0]));
    case ValKind::Zero:
      return syn::zero();
    case ValKind::Succ:
      return syn::succ(quote_untyped(v->vals[0]));
    case ValKind::TruncIn:
      return syn::trunc_in(quote_untyped(v->vals[0]));
    case ValKind::EnumLit:
      return syn::enum_lit(v->a, v->b);
    case ValKind::UA:
      return syn::ua(quote_type(v->vals[0]), quote_type(v->vals[1]), quote_untyped(v->vals[2]));
    default:
      return quote_type(v);
  }
}

TermPtr Checker::quote_type(const ValuePtr& ty) {
  switch (ty->kind) {
    case ValKind::Universe:
      return syn::universe();
    case ValKind::Nat:
      return syn::nat();
    case ValKind::Enum:
      return syn::enum_type(ty->a);
    case ValKind::Trunc:
      return syn::trunc(quote_type(ty->vals[0]));
    case ValKind::Pi:
    case ValKind::Sigma: {
      TermPtr dom = quote_type(ty->vals[0]);
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      ValuePtr cod = close_apply(*ty->clo, fresh);
      BinderScope scope(env_, lvl_types_, ty->vals[0]);
      TermPtr cod_t = quote_type(cod);
      return ty->kind == ValKind::Pi ? syn::pi(dom, cod_t) : syn::sigma(dom, cod_t);
    }
    case ValKind::Id: {
      TermPtr t = quote_type(ty->vals[0]);
      return syn::id_type(t, quote(ty->vals[1], ty->vals[0]), quote(ty->vals[2], ty->vals[0]));
    }
    case ValKind::Neutral:
      return quote_neutral(*ty);
    default:
      return quote_untyped(ty);
  }
}

TermPtr Checker::quote(const ValuePtr& v, const ValuePtr& type) {
  if (!type) return quote_untyped(v);
  switch (type->kind) {
    case ValKind::Pi: {
      // eta-long readback at function type
      ValuePtr fresh = vvar(static_cast<std::uint32_t>(env_.size()));
      ValuePtr cod = close_apply(*type->clo, fresh);
      ValuePtr body = vapp(v, fresh);
      BinderScope scope(env_, lvl_types_, type->vals[0]);
      return syn::lambda(quote(body, cod));
    }
    case ValKind::Sigma: {
      ValuePtr fst = do_proj_l(v);
      TermPtr fst_t = quote(fst, type->vals[0]);
      return syn::pair(fst_t, quote(do_proj_r(v), close_apply(*type->clo, fst)));
    }
    case ValKind::Universe:
      return quote_type(v);
    default:
      return quote_untyped(v);
  }
}

// ---------------------------------------------------------------------------
// Public term-level operations

TermPtr infer(const Context& ctx, const TermPtr& t) {
  Checker c(ctx);
  return c.quote_type(c.infer_value(*t));
}

void check(const Context& ctx, const TermPtr& t, const TermPtr& type) {
  Checker c(ctx);
  c.ensure_type(*type);
  c.check_value(*t, c.eval_here(*type));
}

NormalForm normalize(const Context& ctx, const TermPtr& t) {
  Checker c(ctx);
  // Type-directed readback gives eta-long forms; checked-but-uninferable
  // terms (lambda- or pair-headed) still normalize, without eta expansion.
  try {
    ValuePtr ty = c.infer_value(*t);
    return NormalForm{c.quote(c.eval_here(*t), ty)};
  } catch (const TypingError&) {
    return NormalForm{c.quote(c.eval_here(*t), nullptr)};
  }
}

bool conv(const Context& ctx, const TermPtr& t, const TermPtr& u, const TermPtr& type) {
  Checker c(ctx);
  c.ensure_type(*type);
  ValuePtr ty = c.eval_here(*type);
  c.check_value(*t, ty);
  c.check_value(*u, ty);
  return c.conv_value(c.eval_here(*t), c.eval_here(*u), ty);
}

void check_context(const Context& ctx) { Checker c(ctx); }

// ---------------------------------------------------------------------------
// Files

TermPtr FileChecker::resolve_rec(const syntax::RawTerm& t, std::vector<std::string>& binders) const {
  if (t.kind == TermKind::Var) {
    for (std::size_t i = 0; i < binders.size(); ++i) {
      std::size_t ix = binders.size() - 1 - i;
      if (binders[ix] == t.name) return syn::var(static_cast<std::uint32_t>(i));
    }
    auto g = globals_.find(t.name);
    if (g == globals_.end()) throw syn::UnboundError(t.name);
    auto depth = static_cast<std::uint32_t>(binders.size());
    auto tele = static_cast<std::uint32_t>(ctx_.telescope.size());
    return syn::var(depth + (tele - 1 - g->second.index));
  }
  switch (t.kind) {
    case TermKind::Pi:
    case TermKind::Sigma: {
      auto dom = resolve_rec(*t.subs[0], binders);
      binders.push_back(t.name);
      auto cod = resolve_rec(*t.subs[1], binders);
      binders.pop_back();
      return syn::mk(t.kind, {std::move(dom), std::move(cod)});
    }
    case TermKind::Lambda: {
      binders.push_back(t.name);
      auto body = resolve_rec(*t.subs[0], binders);
      binders.pop_back();
      return syn::lambda(std::move(body));
    }
    default: {
      std::vector<TermPtr> subs;
      subs.reserve(t.subs.size());
      for (const auto& s : t.subs) subs.push_back(resolve_rec(*s, binders));
      return syn::mk(t.kind, std::move(subs), t.a, t.b);
    }
  }
}

TermPtr FileChecker::resolve(const syntax::RawTermPtr& t) const {
  std::vector<std::string> binders;
  return resolve_rec(*t, binders);
}

std::optional<TermPtr> FileChecker::lookup_body(const std::string& name) const {
  auto it = globals_.find(name);
  if (it == globals_.end() || !it->second.body) return std::nullopt;
  return it->second.body;
}

std::optional<TermPtr> FileChecker::lookup_type(const std::string& name) const {
  auto it = globals_.find(name);
  if (it == globals_.end()) return std::nullopt;
  return it->second.type;
}

TermPtr FileChecker::normalized_body(const std::string& name) {
  auto it = globals_.find(name);
  if (it == globals_.end() || !it->second.body) throw syn::UnboundError(name);
  ValuePtr ty = checker_.eval_prefix(it->second.index, *it->second.type);
  return checker_.quote(checker_.eval_prefix(it->second.index, *it->second.body), ty);
}

std::vector<DeclResult> FileChecker::run(const std::vector<syntax::Declaration>& decls) {
  std::vector<DeclResult> results;
  for (const auto& d : decls) {
    DeclResult res;
    res.name = d.name;
    res.expect = d.expect;
    res.postulate = !d.body;
    try {
      TermPtr annot = resolve(d.annotation);
      checker_.ensure_type(*annot);
      ValuePtr type_v = checker_.eval_here(*annot);
      res.normalized_type = checker_.quote_type(type_v);
      res.pretty_type = syn::pretty(*res.normalized_type, names_);
      TermPtr body;
      if (d.body) {
        body = resolve(d.body);
        checker_.check_value(*body, type_v);
      }
      auto index = static_cast<std::uint32_t>(ctx_.telescope.size());
      globals_[d.name] = Global{index, annot, body};
      ctx_.telescope.push_back(annot);
      names_.push_back(d.name);
      if (body)
        checker_.push_definition(annot, body);
      else
        checker_.push_postulate(annot);
      res.ok = true;
    } catch (const TypingError& e) {
      res.ok = false;
      res.error_kind = e.kind;
      res.message = e.what();
    } catch (const syn::UnboundError& e) {
      res.ok = false;
      res.error_kind = ErrorKind::Unbound;
      res.message = e.what();
    }
    results.push_back(std::move(res));
  }
  return results;
}

std::vector<DeclResult> check_file(const std::string& source) {
  FileChecker fc;
  return fc.run(syntax::parse_file(source));
}

}  // namespace stacklab::kernel
