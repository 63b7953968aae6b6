#include "ipdb/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace ipdb {

namespace {

void collect(const Formula& f, std::vector<UniverseElem>& constants, Schema& signature) {
  for (const auto& t : f.terms)
    if (!t.is_var) constants.push_back(t.constant);
  if (f.kind == Formula::Kind::Atom) signature.declare(f.relation, f.terms.size());
  for (const auto& c : f.children) collect(*c, constants, signature);
}

std::string term_string(const Term& t) { return t.is_var ? t.name : t.constant.to_string(); }

std::string formula_string(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Atom: {
      std::string out = f.relation + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i)
        out += (i ? "," : "") + term_string(f.terms[i]);
      return out + ")";
    }
    case K::Equal: return term_string(f.terms[0]) + " = " + term_string(f.terms[1]);
    case K::Not: return "!" + formula_string(*f.children[0]);
    case K::And:
      return "(" + formula_string(*f.children[0]) + " & " + formula_string(*f.children[1]) + ")";
    case K::Or:
      return "(" + formula_string(*f.children[0]) + " | " + formula_string(*f.children[1]) + ")";
    case K::Exists: return "(E " + f.var + ". " + formula_string(*f.children[0]) + ")";
    case K::Forall: return "(A " + f.var + ". " + formula_string(*f.children[0]) + ")";
  }
  return {};
}

// Rebuilds the tree with variable slots assigned from the binding depth.
FormulaPtr resolve(const FormulaPtr& f, std::vector<std::string>& scope, std::size_t& max_slots) {
  auto out = std::make_shared<Formula>(*f);
  for (auto& t : out->terms) {
    if (!t.is_var) continue;
    auto it = std::find(scope.rbegin(), scope.rend(), t.name);
    if (it == scope.rend())
      throw Error(ErrorCode::UnboundVariable, "variable '" + t.name + "' is not bound");
    t.slot = static_cast<std::size_t>(scope.rend() - it) - 1;
  }
  bool binds = f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall;
  if (binds) {
    out->slot = scope.size();
    scope.push_back(f->var);
    max_slots = std::max(max_slots, scope.size());
  }
  for (auto& c : out->children) c = resolve(c, scope, max_slots);
  if (binds) scope.pop_back();
  return out;
}

//===----------------------------------------------------------------------===//

struct Token {
  enum class Kind { Name, Integer, String, Symbol, End };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
      while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
      if (i == text_.size()) break;
      char c = text_[i];
      std::size_t start = i;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_'))
          ++i;
        out.push_back({Token::Kind::Name, std::string(text_.substr(start, i - start)), start});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < text_.size() &&
                  std::isdigit(static_cast<unsigned char>(text_[i + 1])))) {
        ++i;
        while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
        out.push_back({Token::Kind::Integer, std::string(text_.substr(start, i - start)), start});
      } else if (c == '"') {
        std::string value;
        ++i;
        while (true) {
          if (i >= text_.size()) throw error(start, "unterminated string");
          if (text_[i] == '"') break;
          if (text_[i] == '\\' && i + 1 < text_.size()) ++i;
          value += text_[i++];
        }
        ++i;
        out.push_back({Token::Kind::String, value, start});
      } else if (std::string_view("()!&|.,=").find(c) != std::string_view::npos) {
        ++i;
        out.push_back({Token::Kind::Symbol, std::string(1, c), start});
      } else {
        throw error(start, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Token::Kind::End, "", text_.size()});
    return out;
  }

  static Error error(std::size_t pos, const std::string& msg) {
    return Error(ErrorCode::SyntaxError, "at position " + std::to_string(pos) + ": " + msg);
  }

 private:
  std::string_view text_;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Schema* schema)
      : tokens_(std::move(tokens)), schema_(schema) {}

  FormulaPtr parse() {
    auto f = disjunction();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  bool is_symbol(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Symbol && t.text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw Lexer::error(peek().pos, msg); }
  void expect(const char* s) {
    if (!is_symbol(s)) fail(std::string("expected '") + s + "'");
    ++pos_;
  }

  FormulaPtr disjunction() {
    auto left = conjunction();
    while (is_symbol("|")) {
      ++pos_;
      left = qb::disj(left, conjunction());
    }
    return left;
  }

  FormulaPtr conjunction() {
    auto left = unary();
    while (is_symbol("&")) {
      ++pos_;
      left = qb::conj(left, unary());
    }
    return left;
  }

  FormulaPtr unary() {
    if (is_symbol("!")) {
      ++pos_;
      return qb::neg(unary());
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Name && (t.text == "E" || t.text == "A") &&
        peek(1).kind == Token::Kind::Name)
      return quantified();
    return primary();
  }

  FormulaPtr quantified() {
    bool exists = take().text == "E";
    std::vector<std::string> vars;
    while (true) {
      if (peek().kind != Token::Kind::Name) fail("expected a variable name");
      vars.push_back(take().text);
      if (!is_symbol(",")) break;
      ++pos_;
    }
    expect(".");
    for (const auto& v : vars) scope_.push_back(v);
    auto body = disjunction();
    for (std::size_t i = 0; i < vars.size(); ++i) scope_.pop_back();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = exists ? qb::exists(*it, body) : qb::forall(*it, body);
    return body;
  }

  FormulaPtr primary() {
    if (is_symbol("(")) {
      ++pos_;
      auto f = disjunction();
      expect(")");
      return f;
    }
    if (peek().kind == Token::Kind::Name && is_symbol("(", 1)) return atom();
    Term left = term();
    expect("=");
    Term right = term();
    return qb::eq(std::move(left), std::move(right));
  }

  FormulaPtr atom() {
    const Token name = take();
    expect("(");
    std::vector<Term> args;
    if (!is_symbol(")")) {
      args.push_back(term());
      while (is_symbol(",")) {
        ++pos_;
        args.push_back(term());
      }
    }
    expect(")");
    if (schema_) {
      auto arity = schema_->arity_of(name.text);
      if (!arity)
        throw Error(ErrorCode::ArityMismatch, "at position " + std::to_string(name.pos) +
                                                  ": unknown relation '" + name.text + "'");
      if (*arity != args.size())
        throw Error(ErrorCode::ArityMismatch,
                    "at position " + std::to_string(name.pos) + ": '" + name.text +
                        "' has arity " + std::to_string(*arity) + ", given " +
                        std::to_string(args.size()));
    }
    return qb::atom(name.text, std::move(args));
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Name: {
        if (std::find(scope_.begin(), scope_.end(), t.text) == scope_.end())
          throw Error(ErrorCode::UnboundVariable, "at position " + std::to_string(t.pos) +
                                                      ": variable '" + t.text +
                                                      "' is not bound");
        return qb::var(take().text);
      }
      case Token::Kind::Integer: {
        const Token& v = take();
        try {
          return qb::val(static_cast<std::int64_t>(std::stoll(v.text)));
        } catch (const std::out_of_range&) {
          throw Lexer::error(v.pos, "integer out of range");
        }
      }
      case Token::Kind::String: return qb::val(take().text);
      default: fail("expected a term");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Schema* schema_;
  std::vector<std::string> scope_;
};

//===----------------------------------------------------------------------===//

class Evaluator {
 public:
  Evaluator(const Query& q, const BagInstance& d) : env_(q.slots()) {
    for (const auto& [f, m] : d.entries()) {
      facts_.push_back(f);
      for (const auto& a : f.args) domain_.push_back(a);
    }
    for (const auto& c : q.constants()) domain_.push_back(c);
    std::sort(domain_.begin(), domain_.end(), canonical_less);
    domain_.erase(std::unique(domain_.begin(), domain_.end()), domain_.end());
  }

  bool eval(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Atom: {
        probe_.relation = f.relation;
        probe_.args.resize(f.terms.size());
        for (std::size_t i = 0; i < f.terms.size(); ++i) probe_.args[i] = value(f.terms[i]);
        return std::binary_search(facts_.begin(), facts_.end(), probe_);
      }
      case K::Equal: return value(f.terms[0]) == value(f.terms[1]);
      case K::Not: return !eval(*f.children[0]);
      case K::And: return eval(*f.children[0]) && eval(*f.children[1]);
      case K::Or: return eval(*f.children[0]) || eval(*f.children[1]);
      case K::Exists:
        for (const auto& v : domain_) {
          env_[f.slot] = &v;
          if (eval(*f.children[0])) return true;
        }
        return false;
      case K::Forall:
        for (const auto& v : domain_) {
          env_[f.slot] = &v;
          if (!eval(*f.children[0])) return false;
        }
        return true;
    }
    return false;
  }

 private:
  const UniverseElem& value(const Term& t) const { return t.is_var ? *env_[t.slot] : t.constant; }

  std::vector<Fact> facts_;  // sorted, since instance entries are
  std::vector<UniverseElem> domain_;
  std::vector<const UniverseElem*> env_;
  Fact probe_;
};

}  // namespace

Query::Query(FormulaPtr root, std::size_t slots) : root_(std::move(root)), slots_(slots) {
  collect(*root_, constants_, signature_);
  std::sort(constants_.begin(), constants_.end(), canonical_less);
  constants_.erase(std::unique(constants_.begin(), constants_.end()), constants_.end());
}

std::string Query::to_string() const { return formula_string(*root_); }

Query parse_query(std::string_view text, const Schema* schema) {
  Parser parser(Lexer(text).run(), schema);
  return qb::close(parser.parse());
}

bool eval_bool(const Query& q, const BagInstance& d) {
  Evaluator ev(q, d);
  return ev.eval(q.root());
}

namespace qb {

Term var(std::string name) {
  Term t;
  t.is_var = true;
  t.name = std::move(name);
  return t;
}

Term val(UniverseElem v) {
  Term t;
  t.constant = std::move(v);
  return t;
}

FormulaPtr atom(std::string relation, std::vector<Term> terms) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::Atom, std::move(relation), std::move(terms), {}, {}, 0});
}

FormulaPtr eq(Term a, Term b) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::Equal, {}, {std::move(a), std::move(b)}, {}, {}, 0});
}

FormulaPtr neg(FormulaPtr f) {
  return std::make_shared<Formula>(Formula{Formula::Kind::Not, {}, {}, {std::move(f)}, {}, 0});
}

FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::And, {}, {}, {std::move(a), std::move(b)}, {}, 0});
}

FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::Or, {}, {}, {std::move(a), std::move(b)}, {}, 0});
}

FormulaPtr exists(std::string v, FormulaPtr body) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::Exists, {}, {}, {std::move(body)}, std::move(v), 0});
}

FormulaPtr forall(std::string v, FormulaPtr body) {
  return std::make_shared<Formula>(
      Formula{Formula::Kind::Forall, {}, {}, {std::move(body)}, std::move(v), 0});
}

Query close(FormulaPtr root) {
  std::vector<std::string> scope;
  std::size_t slots = 0;
  auto resolved = resolve(root, scope, slots);
  return Query(std::move(resolved), slots);
}

}  // namespace qb

}  // namespace ipdb
