#pragma once

#include <memory>

#include "stacklab/groupoid.hpp"
#include "stacklab/kernel.hpp"
#include "stacklab/term.hpp"

namespace stacklab::groupoid {

using syntax::TermPtr;

struct FragmentUnsupported : std::runtime_error {
  explicit FragmentUnsupported(const std::string& what) : std::runtime_error(what) {}
};

struct BoundExceeded : std::runtime_error {
  explicit BoundExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct InterpOptions {
  int nat_cutoff = 32;
  int max_card = 4;
};

// Semantic environment: the interpreted context, one projection section and
// weakened family per variable (innermost first), and the syntactic
// telescope for kernel queries.
struct SemEnv {
  FiniteGroupoid ctx;
  std::vector<Family> var_fams;
  std::vector<Section> vars;
  std::vector<TermPtr> var_types;  // innermost first, weakened to full scope
  kernel::Context kctx;            // outermost first
  InterpOptions opts;
  std::shared_ptr<Budget> budget;
};

SemEnv empty_env(InterpOptions opts = {});

// Interprets `type` over env and extends the context by it.
SemEnv extend(const SemEnv& env, const TermPtr& type);

Family interp_type(const SemEnv& env, const TermPtr& type);
Section interp_term(const SemEnv& env, const TermPtr& term, const TermPtr& type);

// Convenience: environment for a telescope of fragment types.
SemEnv interp_context(const std::vector<TermPtr>& telescope, InterpOptions opts = {});

}  // namespace stacklab::groupoid
