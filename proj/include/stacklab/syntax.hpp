#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stacklab/term.hpp"

namespace stacklab::syntax {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + what_),
        line(line_),
        col(col_) {}
};

struct UnboundError : std::runtime_error {
  std::string name;
  explicit UnboundError(std::string name_)
      : std::runtime_error("unbound identifier: " + name_), name(std::move(name_)) {}
};

// Surface terms carry binder names; the core is nameless.
struct RawTerm;
using RawTermPtr = std::shared_ptr<const RawTerm>;

struct RawTerm {
  TermKind kind;
  std::string name;              // Var: referenced name; binders: bound name
  std::vector<RawTermPtr> subs;  // same positional layout as Term
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

RawTermPtr raw(TermKind kind, std::string name, std::vector<RawTermPtr> subs,
               std::uint32_t a = 0, std::uint32_t b = 0);

struct Declaration {
  std::string name;
  RawTermPtr annotation;
  RawTermPtr body;  // null for postulates
  int line = 0;

  // Harness pragma attached via a `--! expect ...` comment; empty = accept.
  std::string expect;
};

// Parses a `.tt` source: `name : TYPE` then optionally `name = TERM`,
// continuation lines indented, comments from `--` to end of line.
std::vector<Declaration> parse_file(const std::string& text);

// Parses a single surface term (used by tests and the round-trip property).
RawTermPtr parse_term(const std::string& text);

// Replaces names by de Bruijn indices; `scope` lists binders innermost last.
TermPtr resolve(const RawTermPtr& term, std::vector<std::string> scope);

std::string pretty(const Term& t);
inline std::string pretty(const TermPtr& t) { return pretty(*t); }

// Names free variables from `free_names` (innermost scope entry last).
std::string pretty(const Term& t, const std::vector<std::string>& free_names);

}  // namespace stacklab::syntax
