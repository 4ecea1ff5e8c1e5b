#pragma once

// Propositional formula trees and their conversion to CNF.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sheafcheck/cnf.hpp"

namespace sheafcheck::cnf {

/// Names starting with this prefix are reserved for Tseitin auxiliaries.
inline constexpr std::string_view kAuxPrefix = "__ts";

class PropFormula {
 public:
  enum class Kind { Atom, Not, And, Or, Implies, Iff };

  static PropFormula atom(std::string name);
  static PropFormula negation(PropFormula operand);
  static PropFormula conjunction(PropFormula lhs, PropFormula rhs);
  static PropFormula disjunction(PropFormula lhs, PropFormula rhs);
  static PropFormula implies(PropFormula lhs, PropFormula rhs);
  static PropFormula iff(PropFormula lhs, PropFormula rhs);

  Kind kind() const noexcept { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const PropFormula& operand(std::size_t i) const { return node_->operands.at(i); }
  std::size_t arity() const noexcept { return node_->operands.size(); }

  /// Distinct atom names in order of first occurrence.
  std::vector<std::string> atoms() const;
  std::size_t depth() const;

  /// Truth value under `assignment`; every atom must be in its vocabulary.
  bool evaluate(const Assignment& assignment) const;

  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<PropFormula> operands;
  };
  explicit PropFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static PropFormula make(Kind kind, std::vector<PropFormula> operands);

  std::shared_ptr<const Node> node_;
};

/// Infix syntax, loosest to tightest: `<->`, `->` (right-assoc), `|`, `&`, `!`.
/// Word forms `iff`, `implies`, `or`, `and`, `not` and `~` are accepted too.
PropFormula parse_prop(std::string_view text);

/// Equisatisfiable CNF with one auxiliary per compound subformula. The
/// vocabulary starts with `atom_vocabulary` (atoms of `f` are appended if
/// missing), followed by auxiliaries named `<aux_prefix><n>`.
CnfFormula tseitin(const PropFormula& f, const Vocabulary& atom_vocabulary = {},
                   std::string_view aux_prefix = kAuxPrefix);

/// Logically equivalent CNF over `vocabulary` (no auxiliaries): one clause
/// blocking each falsifying assignment of the atoms `f` mentions. Limited to
/// formulas over at most 16 distinct atoms.
CnfFormula clausify(const PropFormula& f, const Vocabulary& vocabulary);

}  // namespace sheafcheck::cnf
