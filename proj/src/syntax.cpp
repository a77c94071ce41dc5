#include "stacklab/syntax.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace stacklab::syntax {

RawTermPtr raw(TermKind kind, std::string name, std::vector<RawTermPtr> subs,
               std::uint32_t a, std::uint32_t b) {
  auto t = std::make_shared<RawTerm>();
  t->kind = kind;
  t->name = std::move(name);
  t->subs = std::move(subs);
  t->a = a;
  t->b = b;
  return t;
}

namespace {

enum class Tok {
  Ident,
  Number,
  EnumLit,  // #i:k
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Dot,
  Colon,
  Equals,
  Arrow,
  Star,
  Backslash,
  Bars,  // ||
  Eof,
};

struct Token {
  Tok tok;
  std::string text;
  std::uint32_t num = 0;
  std::uint32_t num2 = 0;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
public:
  Lexer(const std::string& text, int base_line) : text_(text), line_(base_line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      int line = line_, col = col_;
      char c = text_[pos_];
      if (ident_start(c)) {
        std::string name;
        while (pos_ < text_.size() && ident_cont(text_[pos_])) name.push_back(take());
        out.push_back({Tok::Ident, name, 0, 0, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back({Tok::Number, "", read_number(), 0, line, col});
      } else if (c == '#') {
        take();
        std::uint32_t ix = read_number();
        expect_char(':');
        std::uint32_t card = read_number();
        out.push_back({Tok::EnumLit, "", ix, card, line, col});
      } else if (c == '-') {
        take();
        expect_char('>');
        out.push_back({Tok::Arrow, "->", 0, 0, line, col});
      } else if (c == '|') {
        take();
        expect_char('|');
        out.push_back({Tok::Bars, "||", 0, 0, line, col});
      } else {
        take();
        Tok t;
        switch (c) {
          case '(': t = Tok::LParen; break;
          case ')': t = Tok::RParen; break;
          case '[': t = Tok::LBracket; break;
          case ']': t = Tok::RBracket; break;
          case ',': t = Tok::Comma; break;
          case '.': t = Tok::Dot; break;
          case ':': t = Tok::Colon; break;
          case '=': t = Tok::Equals; break;
          case '*': t = Tok::Star; break;
          case '\\': t = Tok::Backslash; break;
          default:
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        out.push_back({t, std::string(1, c), 0, 0, line, col});
      }
    }
    out.push_back({Tok::Eof, "", 0, 0, line_, col_});
    return out;
  }

private:
  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  std::uint32_t read_number() {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError(line_, col_, "expected a number");
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(take() - '0');
      if (v > 1000000) throw ParseError(line_, col_, "number too large");
    }
    return static_cast<std::uint32_t>(v);
  }

  void expect_char(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(line_, col_, std::string("expected '") + c + "'");
    take();
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

const std::set<std::string> kKeywords = {"U",    "Nat",  "zero", "suc",    "refl", "tin", "trec",
                                         "J",    "natrec", "case", "ua",   "Id",   "Enum", "fst",
                                         "snd"};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RawTermPtr parse_whole() {
    auto t = term();
    expect(Tok::Eof, "end of input");
    return t;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().tok == t; }
  bool at_ident(const std::string& s) const { return at(Tok::Ident) && peek().text == s; }

  Token expect(Tok t, const std::string& what) {
    if (!at(t)) throw err("expected " + what);
    return next();
  }

  ParseError err(const std::string& msg) const { return ParseError(peek().line, peek().col, msg); }

  RawTermPtr term() {
    if (at(Tok::Backslash)) return lambda_term();
    return arrow_term();
  }

  RawTermPtr lambda_term() {
    next();  // backslash
    std::vector<std::string> binders;
    while (at(Tok::Ident)) {
      if (kKeywords.count(peek().text)) throw err("keyword used as binder");
      binders.push_back(next().text);
    }
    if (binders.empty()) throw err("lambda needs at least one binder");
    expect(Tok::Dot, "'.' after lambda binders");
    auto body = term();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = raw(TermKind::Lambda, *it, {body});
    return body;
  }

  // A binder telescope `(x y : A)(z : B) ...` followed by -> or *.
  std::optional<RawTermPtr> try_telescope() {
    std::size_t save = pos_;
    std::vector<std::pair<std::vector<std::string>, RawTermPtr>> groups;
    while (at(Tok::LParen)) {
      std::size_t group_start = pos_;
      next();
      std::vector<std::string> names;
      while (at(Tok::Ident) && !kKeywords.count(peek().text)) names.push_back(next().text);
      if (names.empty() || !at(Tok::Colon)) {
        pos_ = group_start;
        break;
      }
      next();  // colon
      auto ty = term();
      expect(Tok::RParen, "')' closing binder group");
      groups.emplace_back(std::move(names), std::move(ty));
    }
    if (groups.empty()) {
      pos_ = save;
      return std::nullopt;
    }
    TermKind former;
    if (at(Tok::Arrow)) {
      former = TermKind::Pi;
    } else if (at(Tok::Star)) {
      former = TermKind::Sigma;
    } else {
      pos_ = save;
      return std::nullopt;
    }
    next();
    auto body = term();
    for (auto g = groups.rbegin(); g != groups.rend(); ++g)
      for (auto n = g->first.rbegin(); n != g->first.rend(); ++n)
        body = raw(former, *n, {g->second, body});
    return body;
  }

  RawTermPtr arrow_term() {
    if (at(Tok::LParen)) {
      if (auto t = try_telescope()) return *t;
    }
    auto lhs = star_term();
    if (at(Tok::Arrow)) {
      next();
      auto rhs = term();
      return raw(TermKind::Pi, "_", {lhs, rhs});
    }
    return lhs;
  }

  RawTermPtr star_term() {
    auto lhs = app_term();
    if (at(Tok::Star)) {
      next();
      RawTermPtr rhs;
      if (at(Tok::LParen)) {
        if (auto t = try_telescope()) rhs = *t;
      }
      if (!rhs) rhs = star_term();
      return raw(TermKind::Sigma, "_", {lhs, rhs});
    }
    return lhs;
  }

  bool atom_ahead() const {
    switch (peek().tok) {
      case Tok::Ident:
      case Tok::LParen:
      case Tok::EnumLit:
        return true;
      case Tok::Bars:
        // inside ||...|| a bar token closes the truncation
        return bars_open_ == 0;
      default:
        return false;
    }
  }

  RawTermPtr app_term() {
    auto head = atom();
    while (atom_ahead()) head = raw(TermKind::App, "", {head, atom()});
    return head;
  }

  std::vector<RawTermPtr> call_args(std::size_t arity) {
    expect(Tok::LParen, "'('");
    std::vector<RawTermPtr> args;
    for (std::size_t i = 0; i < arity; ++i) {
      if (i > 0) expect(Tok::Comma, "','");
      args.push_back(term());
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  RawTermPtr atom() {
    const Token& tok = peek();
    switch (tok.tok) {
      case Tok::EnumLit: {
        auto t = next();
        if (t.num >= t.num2) throw ParseError(t.line, t.col, "enum literal index out of range");
        return raw(TermKind::EnumLit, "", {}, t.num2, t.num);
      }
      case Tok::Bars: {
        next();
        ++bars_open_;
        auto inner = term();
        expect(Tok::Bars, "'||' closing truncation");
        --bars_open_;
        return raw(TermKind::Trunc, "", {inner});
      }
      case Tok::LParen: {
        next();
        auto first = term();
        if (at(Tok::Comma)) {
          next();
          auto rest = pair_tail();
          expect(Tok::RParen, "')' closing pair");
          return raw(TermKind::Pair, "", {first, rest});
        }
        expect(Tok::RParen, "')'");
        return first;
      }
      case Tok::Ident:
        return keyword_or_var();
      default:
        throw err("expected a term");
    }
  }

  RawTermPtr pair_tail() {
    auto first = term();
    if (at(Tok::Comma)) {
      next();
      auto rest = pair_tail();
      return raw(TermKind::Pair, "", {first, rest});
    }
    return first;
  }

  RawTermPtr keyword_or_var() {
    Token tok = next();
    const std::string& s = tok.text;
    if (s == "U") return raw(TermKind::Universe, "", {});
    if (s == "Nat") return raw(TermKind::Nat, "", {});
    if (s == "zero") return raw(TermKind::Zero, "", {});
    if (s == "suc") return raw(TermKind::Succ, "", {atom()});
    if (s == "refl") return raw(TermKind::Refl, "", {atom()});
    if (s == "tin") return raw(TermKind::TruncIn, "", {atom()});
    if (s == "fst") return raw(TermKind::ProjL, "", {atom()});
    if (s == "snd") return raw(TermKind::ProjR, "", {atom()});
    if (s == "Id") {
      auto ty = atom();
      auto lhs = atom();
      auto rhs = atom();
      return raw(TermKind::Id, "", {ty, lhs, rhs});
    }
    if (s == "Enum") {
      auto n = expect(Tok::Number, "cardinality after Enum");
      return raw(TermKind::Enum, "", {}, n.num);
    }
    if (s == "trec") {
      auto args = call_args(4);
      return raw(TermKind::TruncElim, "", std::move(args));
    }
    if (s == "J") {
      auto args = call_args(3);
      return raw(TermKind::IdElim, "", std::move(args));
    }
    if (s == "natrec") {
      auto args = call_args(4);
      return raw(TermKind::NatElim, "", std::move(args));
    }
    if (s == "ua") {
      auto args = call_args(3);
      return raw(TermKind::UnivalenceAx, "", std::move(args));
    }
    if (s == "case") {
      expect(Tok::LParen, "'('");
      auto motive = term();
      expect(Tok::Comma, "','");
      expect(Tok::LBracket, "'[' opening case list");
      std::vector<RawTermPtr> cases;
      if (!at(Tok::RBracket)) {
        cases.push_back(term());
        while (at(Tok::Comma)) {
          next();
          cases.push_back(term());
        }
      }
      expect(Tok::RBracket, "']' closing case list");
      expect(Tok::Comma, "','");
      auto target = term();
      expect(Tok::RParen, "')'");
      std::vector<RawTermPtr> subs;
      subs.push_back(std::move(motive));
      auto card = static_cast<std::uint32_t>(cases.size());
      for (auto& c : cases) subs.push_back(std::move(c));
      subs.push_back(std::move(target));
      return raw(TermKind::EnumElim, "", std::move(subs), card);
    }
    if (s == "_") throw ParseError(tok.line, tok.col, "wildcard cannot be referenced");
    return raw(TermKind::Var, s, {});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int bars_open_ = 0;
};

struct Chunk {
  std::string text;
  int line;
};

// Groups source lines into declaration chunks: a chunk starts at column 0,
// indented lines continue it.
std::vector<Chunk> split_chunks(const std::string& text) {
  std::vector<Chunk> chunks;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find("--");
    bool pragma = cut != std::string::npos && line.compare(cut, 3, "--!") == 0;
    std::string code = pragma ? line : (cut == std::string::npos ? line : line.substr(0, cut));
    if (code.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool continuation = code[0] == ' ' || code[0] == '\t';
    if (continuation && !chunks.empty() && !pragma) {
      chunks.back().text += "\n" + code;
    } else {
      chunks.push_back({code, lineno});
    }
  }
  return chunks;
}

}  // namespace

RawTermPtr parse_term(const std::string& text) {
  Lexer lex(text, 1);
  Parser p(lex.run());
  return p.parse_whole();
}

std::vector<Declaration> parse_file(const std::string& text) {
  std::vector<Declaration> decls;
  std::map<std::string, std::size_t> index;
  std::string pending_expect;
  for (const auto& chunk : split_chunks(text)) {
    if (chunk.text.compare(0, 3, "--!") == 0) {
      auto rest = chunk.text.substr(3);
      auto start = rest.find_first_not_of(" \t");
      pending_expect = start == std::string::npos ? "" : rest.substr(start);
      if (pending_expect.rfind("expect ", 0) == 0) pending_expect = pending_expect.substr(7);
      continue;
    }
    Lexer lex(chunk.text, chunk.line);
    auto toks = lex.run();
    if (toks.size() < 2 || toks[0].tok != Tok::Ident)
      throw ParseError(chunk.line, 1, "expected a declaration");
    std::string name = toks[0].text;
    if (kKeywords.count(name) || name == "_")
      throw ParseError(chunk.line, 1, "reserved name in declaration");
    if (toks[1].tok == Tok::Colon) {
      if (index.count(name)) throw ParseError(chunk.line, 1, "duplicate declaration of " + name);
      Parser p(std::vector<Token>(toks.begin() + 2, toks.end()));
      Declaration d;
      d.name = name;
      d.annotation = p.parse_whole();
      d.line = chunk.line;
      d.expect = pending_expect;
      pending_expect.clear();
      index[name] = decls.size();
      decls.push_back(std::move(d));
    } else if (toks[1].tok == Tok::Equals) {
      auto it = index.find(name);
      if (it == index.end())
        throw ParseError(chunk.line, 1, "definition of " + name + " without a type annotation");
      if (decls[it->second].body)
        throw ParseError(chunk.line, 1, "duplicate definition of " + name);
      Parser p(std::vector<Token>(toks.begin() + 2, toks.end()));
      decls[it->second].body = p.parse_whole();
      if (!pending_expect.empty()) {
        decls[it->second].expect = pending_expect;
        pending_expect.clear();
      }
    } else {
      throw ParseError(toks[1].line, toks[1].col, "expected ':' or '=' after declaration name");
    }
  }
  return decls;
}

namespace {

TermPtr resolve_rec(const RawTerm& t, std::vector<std::string>& scope) {
  switch (t.kind) {
    case TermKind::Var: {
      for (std::size_t i = 0; i < scope.size(); ++i) {
        std::size_t ix = scope.size() - 1 - i;
        if (scope[ix] == t.name) return var(static_cast<std::uint32_t>(i));
      }
      throw UnboundError(t.name);
    }
    case TermKind::Pi:
    case TermKind::Sigma: {
      auto dom = resolve_rec(*t.subs[0], scope);
      scope.push_back(t.name);
      auto cod = resolve_rec(*t.subs[1], scope);
      scope.pop_back();
      return mk(t.kind, {std::move(dom), std::move(cod)});
    }
    case TermKind::Lambda: {
      scope.push_back(t.name);
      auto body = resolve_rec(*t.subs[0], scope);
      scope.pop_back();
      return lambda(std::move(body));
    }
    default: {
      std::vector<TermPtr> subs;
      subs.reserve(t.subs.size());
      for (const auto& s : t.subs) subs.push_back(resolve_rec(*s, scope));
      return mk(t.kind, std::move(subs), t.a, t.b);
    }
  }
}

}  // namespace

TermPtr resolve(const RawTermPtr& term, std::vector<std::string> scope) {
  return resolve_rec(*term, scope);
}

namespace {

// Precedence levels for printing: 0 term, 1 arrow operand, 2 star operand,
// 3 application head/argument.
struct Printer {
  const std::vector<std::string>* free_names = nullptr;

  std::string binder_name(int depth) const { return "x" + std::to_string(depth); }

  void print_atom_arg(std::ostream& os, const Term& t, int depth) const { print(os, t, depth, 4); }

  void print(std::ostream& os, const Term& t, int depth, int prec) const {
  auto open = [&](int mine) {
    if (mine < prec) os << "(";
  };
  auto close = [&](int mine) {
    if (mine < prec) os << ")";
  };
  switch (t.kind) {
    case TermKind::Var: {
      int ix = static_cast<int>(t.a);
      if (ix < depth) {
        os << binder_name(depth - 1 - ix);
      } else {
        std::size_t free_ix = static_cast<std::size_t>(ix - depth);
        if (free_names && free_ix < free_names->size())
          os << (*free_names)[free_names->size() - 1 - free_ix];
        else
          os << "f" + std::to_string(free_ix);
      }
      break;
    }
    case TermKind::Universe: os << "U"; break;
    case TermKind::Nat: os << "Nat"; break;
    case TermKind::Zero: os << "zero"; break;
    case TermKind::Enum: os << "Enum " << t.a; break;
    case TermKind::EnumLit: os << "#" << t.b << ":" << t.a; break;
    case TermKind::Trunc:
      open(2);
      os << "||";
      print(os, *t.subs[0], depth, 0);
      os << "||";
      close(2);
      break;
    case TermKind::Lambda:
      open(0);
      os << "\\" << binder_name(depth) << ". ";
      print(os, *t.subs[0], depth + 1, 0);
      close(0);
      break;
    case TermKind::Pi:
    case TermKind::Sigma: {
      bool dep = uses_var(*t.subs[1], 0);
      const char* op = t.kind == TermKind::Pi ? "->" : "*";
      int mine = t.kind == TermKind::Pi ? 1 : 2;
      open(mine);
      if (dep) {
        os << "(" << binder_name(depth) << " : ";
        print(os, *t.subs[0], depth, 0);
        os << ") " << op << " ";
      } else {
        print(os, *t.subs[0], depth, mine + 1);
        os << " " << op << " ";
      }
      // -> is right associative; * nests to the right as well.
      print(os, *t.subs[1], depth + 1, mine);
      close(mine);
      break;
    }
    case TermKind::App:
      open(3);
      print(os, *t.subs[0], depth, 3);
      os << " ";
      print(os, *t.subs[1], depth, 4);
      close(3);
      break;
    case TermKind::Pair:
      os << "(";
      print(os, *t.subs[0], depth, 0);
      os << " , ";
      print(os, *t.subs[1], depth, 0);
      os << ")";
      break;
    case TermKind::ProjL:
    case TermKind::ProjR:
      open(3);
      os << (t.kind == TermKind::ProjL ? "fst " : "snd ");
      print(os, *t.subs[0], depth, 4);
      close(3);
      break;
    case TermKind::Succ:
    case TermKind::Refl:
    case TermKind::TruncIn:
      open(3);
      os << (t.kind == TermKind::Succ ? "suc " : t.kind == TermKind::Refl ? "refl " : "tin ");
      print(os, *t.subs[0], depth, 4);
      close(3);
      break;
    case TermKind::Id:
      open(3);
      os << "Id ";
      print_atom_arg(os, *t.subs[0], depth);
      os << " ";
      print_atom_arg(os, *t.subs[1], depth);
      os << " ";
      print_atom_arg(os, *t.subs[2], depth);
      close(3);
      break;
    case TermKind::IdElim:
    case TermKind::NatElim:
    case TermKind::TruncElim:
    case TermKind::UnivalenceAx: {
      const char* head = t.kind == TermKind::IdElim       ? "J"
                         : t.kind == TermKind::NatElim    ? "natrec"
                         : t.kind == TermKind::TruncElim  ? "trec"
                                                          : "ua";
      os << head << "(";
      for (std::size_t i = 0; i < t.subs.size(); ++i) {
        if (i > 0) os << ", ";
        print(os, *t.subs[i], depth, 0);
      }
      os << ")";
      break;
    }
    case TermKind::EnumElim: {
      os << "case(";
      print(os, *enum_elim_motive(t), depth, 0);
      os << ", [";
      for (std::uint32_t i = 0; i < t.a; ++i) {
        if (i > 0) os << ", ";
        print(os, *enum_elim_case(t, i), depth, 0);
      }
      os << "], ";
      print(os, *enum_elim_target(t), depth, 0);
      os << ")";
      break;
    }
  }
  }
};

}  // namespace

std::string pretty(const Term& t) {
  std::ostringstream os;
  Printer{}.print(os, t, 0, 0);
  return os.str();
}

std::string pretty(const Term& t, const std::vector<std::string>& free_names) {
  std::ostringstream os;
  Printer{&free_names}.print(os, t, 0, 0);
  return os.str();
}

}  // namespace stacklab::syntax
