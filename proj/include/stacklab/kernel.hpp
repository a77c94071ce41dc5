#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stacklab/syntax.hpp"
#include "stacklab/term.hpp"

namespace stacklab::kernel {

using syntax::Term;
using syntax::TermPtr;

enum class ErrorKind {
  Mismatch,
  NotAFunction,
  NotAPair,
  UniverseExpected,
  PropWitnessInvalid,
  Unbound,
  IllFormedContext,
};

std::string to_string(ErrorKind k);

struct TypingError : std::runtime_error {
  ErrorKind kind;
  std::vector<int> path;  // child indices from the checked term's root
  // For Mismatch: expected holds the required type; actual holds the
  // synthesized type, or the subject term when none can be synthesized.
  TermPtr expected;
  TermPtr actual;

  TypingError(ErrorKind kind_, std::vector<int> path_, std::string message,
              TermPtr expected_ = nullptr, TermPtr actual_ = nullptr)
      : std::runtime_error(std::move(message)),
        kind(kind_),
        path(std::move(path_)),
        expected(std::move(expected_)),
        actual(std::move(actual_)) {}
};

// A typing context: telescope of types, each well-formed under its prefix,
// innermost entry last.
struct Context {
  std::vector<TermPtr> telescope;
};

struct NormalForm {
  TermPtr term;
};

// Values for environment-based normalization.
struct Value;
using ValuePtr = std::shared_ptr<const Value>;
using Env = std::vector<ValuePtr>;  // innermost binding last

struct Closure {
  Env env;
  TermPtr body;
};

enum class ValKind {
  Pi,
  Lambda,
  Sigma,
  Pair,
  Id,
  Refl,
  Nat,
  Zero,
  Succ,
  Universe,
  Trunc,
  TruncIn,
  Enum,
  EnumLit,
  UA,
  Neutral,
};

struct Elim {
  enum class Kind { App, ProjL, ProjR, NatElim, EnumElim, IdElim, TruncElim };
  Kind kind;
  // App: [arg]; NatElim: [motive, zcase, scase]; EnumElim: [motive, cases...];
  // IdElim: [motive, base]; TruncElim: [motive, fn, witness].
  std::vector<ValuePtr> args;
  std::uint32_t card = 0;  // EnumElim cardinality
};

struct Value {
  ValKind kind;
  std::vector<ValuePtr> vals;
  std::optional<Closure> clo;
  std::uint32_t a = 0;  // Enum card / EnumLit card / Neutral head level
  std::uint32_t b = 0;  // EnumLit index
  std::vector<Elim> spine;
};

ValuePtr eval(const Env& env, const Term& t);
ValuePtr vvar(std::uint32_t level);
ValuePtr vapp(const ValuePtr& fn, const ValuePtr& arg);
ValuePtr close_apply(const Closure& c, const ValuePtr& arg);

// The checker holds the evaluation environment and per-level types of the
// context it runs under. Conversion is type-directed: elements of a
// truncation are identified outright, functions and pairs compare by eta.
class Checker {
public:
  Checker();
  explicit Checker(const Context& ctx);  // throws IllFormedContext

  std::size_t depth() const { return env_.size(); }

  // Core judgments over values.
  ValuePtr infer_value(const Term& t);
  void check_value(const Term& t, const ValuePtr& type);
  void ensure_type(const Term& t);
  bool conv_value(const ValuePtr& lhs, const ValuePtr& rhs, const ValuePtr& type);

  ValuePtr eval_here(const Term& t) const { return eval(env_, t); }
  // Evaluates under the first `prefix_len` context entries (for bodies
  // resolved before the context grew).
  ValuePtr eval_prefix(std::size_t prefix_len, const Term& t) const {
    return eval(Env(env_.begin(), env_.begin() + static_cast<std::ptrdiff_t>(prefix_len)), t);
  }
  TermPtr quote(const ValuePtr& v, const ValuePtr& type);
  TermPtr quote_type(const ValuePtr& ty);

  // Extends the context in place: postulates bind a fresh neutral, defined
  // names bind their value so evaluation unfolds them.
  void push_postulate(const TermPtr& type);
  void push_definition(const TermPtr& type, const TermPtr& body);

private:
  struct PathGuard;

  ValuePtr infer(const Term& t);
  void check(const Term& t, const ValuePtr& type);
  bool conv(const ValuePtr& l, const ValuePtr& r, const ValuePtr& type);
  bool conv_type(const ValuePtr& l, const ValuePtr& r);
  std::optional<ValuePtr> conv_neutral(const Value& l, const Value& r);
  ValuePtr equiv_record_type(const ValuePtr& a, const ValuePtr& b) const;
  ValuePtr infer_trunc_payload(const Term& target, ValuePtr* target_value);

  TermPtr quote_untyped(const ValuePtr& v);
  TermPtr quote_neutral(const Value& n);

  [[noreturn]] void fail(ErrorKind kind, const std::string& msg, TermPtr expected = nullptr,
                         TermPtr actual = nullptr) const;

  Env env_;
  std::vector<ValuePtr> lvl_types_;
  std::vector<int> path_;
};

// Spec-level operations over plain terms.
TermPtr infer(const Context& ctx, const TermPtr& t);
void check(const Context& ctx, const TermPtr& t, const TermPtr& type);
NormalForm normalize(const Context& ctx, const TermPtr& t);
bool conv(const Context& ctx, const TermPtr& t, const TermPtr& u, const TermPtr& type);
void check_context(const Context& ctx);

// File-level checking: definitions are inlined at use sites, postulates
// extend the ambient telescope.
struct DeclResult {
  std::string name;
  bool ok = false;
  std::optional<ErrorKind> error_kind;
  std::string message;
  TermPtr normalized_type;      // null on error
  std::string pretty_type;
  bool postulate = false;
  std::string expect;           // harness pragma carried through
};

class FileChecker {
public:
  FileChecker() = default;

  std::vector<DeclResult> run(const std::vector<syntax::Declaration>& decls);

  // Resolves a raw term against the accumulated globals/telescope.
  TermPtr resolve(const syntax::RawTermPtr& t) const;
  const Context& context() const { return ctx_; }
  const std::vector<std::string>& telescope_names() const { return names_; }
  Checker& checker() { return checker_; }
  std::optional<TermPtr> lookup_body(const std::string& name) const;
  std::optional<TermPtr> lookup_type(const std::string& name) const;

  // Normal form of `name`'s body (or of a closed term), with every
  // definition unfolded.
  TermPtr normalized_body(const std::string& name);

private:
  struct Global {
    std::uint32_t index;  // telescope position
    TermPtr type;
    TermPtr body;  // null for postulates
  };

  TermPtr resolve_rec(const syntax::RawTerm& t, std::vector<std::string>& binders) const;

  std::map<std::string, Global> globals_;
  Context ctx_;
  std::vector<std::string> names_;
  Checker checker_;
};

std::vector<DeclResult> check_file(const std::string& source);

}  // namespace stacklab::kernel
