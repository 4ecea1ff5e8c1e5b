#include "sheafcheck/prop.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "sheafcheck/error.hpp"

namespace sheafcheck::cnf {

PropFormula PropFormula::make(Kind kind, std::vector<PropFormula> operands) {
  return PropFormula(std::make_shared<const Node>(Node{kind, {}, std::move(operands)}));
}

PropFormula PropFormula::atom(std::string name) {
  if (name.empty()) throw InputError("atom names must be non-empty");
  return PropFormula(std::make_shared<const Node>(Node{Kind::Atom, std::move(name), {}}));
}

PropFormula PropFormula::negation(PropFormula operand) { return make(Kind::Not, {std::move(operand)}); }
PropFormula PropFormula::conjunction(PropFormula lhs, PropFormula rhs) {
  return make(Kind::And, {std::move(lhs), std::move(rhs)});
}
PropFormula PropFormula::disjunction(PropFormula lhs, PropFormula rhs) {
  return make(Kind::Or, {std::move(lhs), std::move(rhs)});
}
PropFormula PropFormula::implies(PropFormula lhs, PropFormula rhs) {
  return make(Kind::Implies, {std::move(lhs), std::move(rhs)});
}
PropFormula PropFormula::iff(PropFormula lhs, PropFormula rhs) {
  return make(Kind::Iff, {std::move(lhs), std::move(rhs)});
}

std::vector<std::string> PropFormula::atoms() const {
  std::vector<std::string> out;
  std::function<void(const PropFormula&)> walk = [&](const PropFormula& f) {
    if (f.kind() == Kind::Atom) {
      if (std::find(out.begin(), out.end(), f.name()) == out.end()) out.push_back(f.name());
      return;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) walk(f.operand(i));
  };
  walk(*this);
  return out;
}

std::size_t PropFormula::depth() const {
  std::size_t d = 0;
  for (std::size_t i = 0; i < arity(); ++i) d = std::max(d, operand(i).depth());
  return kind() == Kind::Atom ? 0 : d + 1;
}

bool PropFormula::evaluate(const Assignment& assignment) const {
  switch (kind()) {
    case Kind::Atom: return assignment[name()];
    case Kind::Not: return !operand(0).evaluate(assignment);
    case Kind::And: return operand(0).evaluate(assignment) && operand(1).evaluate(assignment);
    case Kind::Or: return operand(0).evaluate(assignment) || operand(1).evaluate(assignment);
    case Kind::Implies: return !operand(0).evaluate(assignment) || operand(1).evaluate(assignment);
    case Kind::Iff: return operand(0).evaluate(assignment) == operand(1).evaluate(assignment);
  }
  return false;
}

std::string PropFormula::to_string() const {
  switch (kind()) {
    case Kind::Atom: return name();
    case Kind::Not: return "!" + operand(0).to_string();
    case Kind::And: return "(" + operand(0).to_string() + " & " + operand(1).to_string() + ")";
    case Kind::Or: return "(" + operand(0).to_string() + " | " + operand(1).to_string() + ")";
    case Kind::Implies: return "(" + operand(0).to_string() + " -> " + operand(1).to_string() + ")";
    case Kind::Iff: return "(" + operand(0).to_string() + " <-> " + operand(1).to_string() + ")";
  }
  return {};
}

// Parser ---------------------------------------------------------------------

namespace {

enum class Tok { Atom, Not, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t at = i;
    if (s.substr(i, 3) == "<->") {
      out.push_back({Tok::Iff, "<->", at});
      i += 3;
    } else if (s.substr(i, 2) == "->") {
      out.push_back({Tok::Implies, "->", at});
      i += 2;
    } else if (c == '!' || c == '~') {
      out.push_back({Tok::Not, std::string(1, c), at});
      ++i;
    } else if (c == '&') {
      out.push_back({Tok::And, "&", at});
      i += s.substr(i, 2) == "&&" ? 2 : 1;
    } else if (c == '|') {
      out.push_back({Tok::Or, "|", at});
      i += s.substr(i, 2) == "||" ? 2 : 1;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", at});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", at});
      ++i;
    } else if (is_ident(c)) {
      while (i < s.size() && is_ident(s[i])) ++i;
      std::string word(s.substr(at, i - at));
      Tok kind = Tok::Atom;
      if (word == "not") kind = Tok::Not;
      else if (word == "and") kind = Tok::And;
      else if (word == "or") kind = Tok::Or;
      else if (word == "implies") kind = Tok::Implies;
      else if (word == "iff") kind = Tok::Iff;
      out.push_back({kind, std::move(word), at});
    } else {
      throw InputError("unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(at) +
                       " in formula");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PropFormula parse() {
    auto f = parse_iff();
    expect(Tok::End, "end of formula");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k))
      throw InputError(std::string("expected ") + what + " at offset " + std::to_string(peek().offset) +
                       " in formula");
  }

  PropFormula parse_iff() {
    auto lhs = parse_implies();
    while (accept(Tok::Iff)) lhs = PropFormula::iff(lhs, parse_implies());
    return lhs;
  }
  PropFormula parse_implies() {
    auto lhs = parse_or();
    if (accept(Tok::Implies)) return PropFormula::implies(lhs, parse_implies());
    return lhs;
  }
  PropFormula parse_or() {
    auto lhs = parse_and();
    while (accept(Tok::Or)) lhs = PropFormula::disjunction(lhs, parse_and());
    return lhs;
  }
  PropFormula parse_and() {
    auto lhs = parse_unary();
    while (accept(Tok::And)) lhs = PropFormula::conjunction(lhs, parse_unary());
    return lhs;
  }
  PropFormula parse_unary() {
    if (accept(Tok::Not)) return PropFormula::negation(parse_unary());
    if (accept(Tok::LParen)) {
      auto f = parse_iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (peek().kind == Tok::Atom) return PropFormula::atom(toks_[pos_++].text);
    throw InputError("expected an atom or '(' at offset " + std::to_string(peek().offset) + " in formula");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

PropFormula parse_prop(std::string_view text) { return Parser(lex(text)).parse(); }

// CNF conversion -------------------------------------------------------------

CnfFormula tseitin(const PropFormula& f, const Vocabulary& atom_vocabulary, std::string_view aux_prefix) {
  Vocabulary vocab = atom_vocabulary;
  for (const auto& a : f.atoms()) vocab.add(a);

  std::vector<Clause> clauses;
  std::size_t next_aux = 1;
  auto fresh = [&] {
    std::string name = std::string(aux_prefix) + std::to_string(next_aux++);
    if (vocab.find(name)) throw InputError("auxiliary name '" + name + "' collides with an existing variable");
    return Literal{vocab.add(name), false};
  };
  auto add = [&](std::initializer_list<Literal> lits) { clauses.emplace_back(std::vector<Literal>(lits)); };

  std::function<Literal(const PropFormula&)> encode = [&](const PropFormula& g) -> Literal {
    using K = PropFormula::Kind;
    switch (g.kind()) {
      case K::Atom: return {vocab.index_of(g.name()), false};
      case K::Not: return ~encode(g.operand(0));
      default: break;
    }
    Literal a = encode(g.operand(0));
    Literal b = encode(g.operand(1));
    if (g.kind() == K::Implies) a = ~a;
    const Literal t = fresh();
    switch (g.kind()) {
      case K::And:
        add({~t, a});
        add({~t, b});
        add({t, ~a, ~b});
        break;
      case K::Or:
      case K::Implies:
        add({~t, a, b});
        add({t, ~a});
        add({t, ~b});
        break;
      case K::Iff:
        add({~t, ~a, b});
        add({~t, a, ~b});
        add({t, a, b});
        add({t, ~a, ~b});
        break;
      default: break;
    }
    return t;
  };

  const Literal root = encode(f);
  clauses.emplace_back(std::vector<Literal>{root});
  return CnfFormula(std::move(vocab), std::move(clauses));
}

CnfFormula clausify(const PropFormula& f, const Vocabulary& vocabulary) {
  const auto atoms = f.atoms();
  if (atoms.size() > 16)
    throw LimitError("clausify handles at most 16 atoms; formula has " + std::to_string(atoms.size()));
  std::vector<VarIndex> idx;
  for (const auto& a : atoms) idx.push_back(vocabulary.index_of(a));

  auto local = std::make_shared<const Vocabulary>(atoms);
  std::vector<Clause> clauses;
  const std::uint64_t end = std::uint64_t{1} << atoms.size();
  for (std::uint64_t p = 0; p < end; ++p) {
    const auto a = Assignment::from_pattern(local, p);
    if (f.evaluate(a)) continue;
    std::vector<Literal> block;
    for (std::size_t i = 0; i < atoms.size(); ++i) block.push_back({idx[i], a.value(static_cast<VarIndex>(i))});
    clauses.emplace_back(std::move(block));
  }
  return CnfFormula(vocabulary, std::move(clauses));
}

}  // namespace sheafcheck::cnf
