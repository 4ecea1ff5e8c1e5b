#pragma once

// Propositional substrate: CNF formulas over a named vocabulary, DIMACS and
// WDIMACS I/O, exhaustive model enumeration, and exact weighted MAX-SAT.
//
// Everything that sweeps assignments is exhaustive over 2^V and refuses
// vocabularies larger than kMaxEnumerationVars.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/rational.hpp>

namespace sheafcheck {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);
double to_double(const Rational& r);
/// Exact value of "3", "-2/5" or "0.125"; throws InputError otherwise.
Rational parse_rational(std::string_view text);

}  // namespace sheafcheck

namespace sheafcheck::cnf {

inline constexpr std::size_t kMaxEnumerationVars = 24;

using VarIndex = std::uint32_t;

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  /// Appends `name` if absent; returns its index either way.
  VarIndex add(const std::string& name);

  std::optional<VarIndex> find(std::string_view name) const;
  VarIndex index_of(std::string_view name) const;  // throws InputError if absent

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::string& name(VarIndex i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const Vocabulary& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarIndex> index_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

struct Variable {
  std::string name;
  VarIndex index = 0;
};

struct Literal {
  VarIndex var = 0;
  bool negated = false;

  Literal operator~() const { return {var, !negated}; }
  auto operator<=>(const Literal&) const = default;
};

class Clause {
 public:
  /// Literals are sorted and deduplicated; an empty literal set is rejected.
  explicit Clause(std::vector<Literal> literals);

  const std::vector<Literal>& literals() const noexcept { return literals_; }
  std::size_t size() const noexcept { return literals_.size(); }

  /// Contains both x and not-x. Such clauses are kept and vacuously true.
  bool tautological() const noexcept { return tautological_; }

  /// Sorted, duplicate-free variable indices.
  std::vector<VarIndex> variables() const;

  bool operator==(const Clause& other) const { return literals_ == other.literals_; }

 private:
  std::vector<Literal> literals_;
  bool tautological_ = false;
};

class CnfFormula {
 public:
  CnfFormula();
  CnfFormula(Vocabulary vocabulary, std::vector<Clause> clauses);
  CnfFormula(VocabularyPtr vocabulary, std::vector<Clause> clauses);

  const Vocabulary& vocabulary() const noexcept { return *vocabulary_; }
  const VocabularyPtr& vocabulary_ptr() const noexcept { return vocabulary_; }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  std::size_t num_vars() const noexcept { return vocabulary_->size(); }
  std::size_t num_clauses() const noexcept { return clauses_.size(); }
  Variable variable(VarIndex i) const { return {vocabulary_->name(i), i}; }

  /// Builds a clause from signed variable names ("x", "-x", "!x", "~x").
  Clause clause_from_names(const std::vector<std::string>& signed_names) const;

  std::string to_string() const;

 private:
  VocabularyPtr vocabulary_;
  std::vector<Clause> clauses_;
};

/// Total assignment over a vocabulary.
class Assignment {
 public:
  Assignment(VocabularyPtr vocabulary, std::vector<bool> values);

  /// Decodes a bit pattern in which variable 0 is the most significant bit.
  static Assignment from_pattern(VocabularyPtr vocabulary, std::uint64_t pattern);

  const Vocabulary& vocabulary() const noexcept { return *vocabulary_; }
  const VocabularyPtr& vocabulary_ptr() const noexcept { return vocabulary_; }
  const std::vector<bool>& values() const noexcept { return values_; }
  bool value(VarIndex i) const { return values_.at(i); }
  bool operator[](std::string_view name) const { return values_.at(vocabulary_->index_of(name)); }

  std::uint64_t pattern() const;

  /// "(T,F,F,F)" in vocabulary order.
  std::string to_string() const;

  bool operator==(const Assignment& other) const;

 private:
  VocabularyPtr vocabulary_;
  std::vector<bool> values_;
};

// Clause bitmask over an assignment pattern (variable 0 in the top bit).
struct ClauseMask {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;

  bool satisfied_by(std::uint64_t pattern) const noexcept {
    return (pattern & positive) != 0 || (~pattern & negative) != 0;
  }
};

std::vector<ClauseMask> clause_masks(const CnfFormula& formula);

bool evaluate(const CnfFormula& formula, const Assignment& assignment);

/// All models in increasing bit-pattern order.
std::vector<Assignment> enumerate_models(const CnfFormula& formula);
std::uint64_t count_models(const CnfFormula& formula);
bool satisfiable(const CnfFormula& formula);

/// Merges vocabularies by variable name (p's names first) and concatenates clauses.
CnfFormula conjoin(const CnfFormula& p, const CnfFormula& q);

/// Models of p AND q divided by 2^V, V the merged vocabulary size.
Rational relative_consistency(const CnfFormula& p, const CnfFormula& q);

// DIMACS ---------------------------------------------------------------------

/// Variables are named "1".."n"; a comment line `c var <k> <name>` renames
/// variable k. emit_dimacs writes those lines back for non-numeric names.
CnfFormula parse_dimacs(std::string_view text);
std::string emit_dimacs(const CnfFormula& formula);

// Weighted MAX-SAT -------------------------------------------------------------

struct WeightedCnf {
  CnfFormula base;
  std::vector<Rational> weights;
  std::vector<bool> hard;

  WeightedCnf() = default;
  WeightedCnf(CnfFormula base, std::vector<Rational> weights, std::vector<bool> hard);

  Rational total_soft_weight() const;
};

/// WDIMACS: `p wcnf <nvars> <nclauses> <top>`; weight >= top marks a hard clause.
WeightedCnf parse_wdimacs(std::string_view text);
/// Requires integral weights.
std::string emit_wdimacs(const WeightedCnf& wcnf);

struct MaxSatResult {
  Assignment assignment;
  Rational achieved_weight;
  std::vector<std::size_t> satisfied_clauses;
};

/// Exhaustive exact MAX-SAT. Ties go to the smallest bit pattern.
MaxSatResult max_sat(const WeightedCnf& wcnf);

}  // namespace sheafcheck::cnf
