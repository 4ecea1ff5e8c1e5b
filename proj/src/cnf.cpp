#include "sheafcheck/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sheafcheck/error.hpp"

namespace sheafcheck {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational parse_rational(std::string_view text) {
  auto bad = [&] { return InputError("'" + std::string(text) + "' is not a number"); };
  auto integer = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw bad();
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = integer(text.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(integer(text.substr(0, slash)), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(integer(text));
  const auto frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos) throw bad();
  auto whole = text.substr(0, dot);
  const bool negative = !whole.empty() && whole[0] == '-';
  if (negative) whole.remove_prefix(1);
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  Rational r(whole.empty() ? 0 : integer(whole));
  r += Rational(integer(frac), scale);
  return negative ? -r : r;
}

}  // namespace sheafcheck

namespace sheafcheck::cnf {

Vocabulary::Vocabulary(std::vector<std::string> names) {
  for (auto& n : names) {
    if (n.empty()) throw InputError("variable names must be non-empty");
    if (find(n)) throw InputError("duplicate variable name '" + n + "'");
    add(n);
  }
}

VarIndex Vocabulary::add(const std::string& name) {
  if (name.empty()) throw InputError("variable names must be non-empty");
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  auto idx = static_cast<VarIndex>(names_.size());
  names_.push_back(name);
  index_.emplace(name, idx);
  return idx;
}

std::optional<VarIndex> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarIndex Vocabulary::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw InputError("unknown variable '" + std::string(name) + "'");
}

Clause::Clause(std::vector<Literal> literals) : literals_(std::move(literals)) {
  if (literals_.empty()) throw InputError("a clause needs at least one literal");
  std::sort(literals_.begin(), literals_.end());
  literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
  for (std::size_t i = 1; i < literals_.size(); ++i)
    if (literals_[i].var == literals_[i - 1].var) tautological_ = true;
}

std::vector<VarIndex> Clause::variables() const {
  std::vector<VarIndex> vars;
  for (const auto& lit : literals_)
    if (vars.empty() || vars.back() != lit.var) vars.push_back(lit.var);
  return vars;
}

CnfFormula::CnfFormula() : vocabulary_(std::make_shared<Vocabulary>()) {}

CnfFormula::CnfFormula(Vocabulary vocabulary, std::vector<Clause> clauses)
    : CnfFormula(std::make_shared<const Vocabulary>(std::move(vocabulary)), std::move(clauses)) {}

CnfFormula::CnfFormula(VocabularyPtr vocabulary, std::vector<Clause> clauses)
    : vocabulary_(std::move(vocabulary)), clauses_(std::move(clauses)) {
  for (const auto& c : clauses_)
    for (const auto& lit : c.literals())
      if (lit.var >= vocabulary_->size())
        throw InputError("literal refers to variable index " + std::to_string(lit.var) +
                         " outside a vocabulary of size " + std::to_string(vocabulary_->size()));
}

Clause CnfFormula::clause_from_names(const std::vector<std::string>& signed_names) const {
  std::vector<Literal> lits;
  for (const auto& s : signed_names) {
    bool neg = !s.empty() && (s[0] == '-' || s[0] == '!' || s[0] == '~');
    lits.push_back({vocabulary_->index_of(neg ? s.substr(1) : s), neg});
  }
  return Clause(std::move(lits));
}

std::string CnfFormula::to_string() const {
  if (clauses_.empty()) return "TRUE";
  std::ostringstream out;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (i) out << " & ";
    out << '(';
    const auto& lits = clauses_[i].literals();
    for (std::size_t k = 0; k < lits.size(); ++k) {
      if (k) out << " | ";
      if (lits[k].negated) out << '!';
      out << vocabulary_->name(lits[k].var);
    }
    out << ')';
  }
  return out.str();
}

Assignment::Assignment(VocabularyPtr vocabulary, std::vector<bool> values)
    : vocabulary_(std::move(vocabulary)), values_(std::move(values)) {
  if (values_.size() != vocabulary_->size())
    throw InputError("assignment covers " + std::to_string(values_.size()) +
                     " variables but the vocabulary has " + std::to_string(vocabulary_->size()));
}

Assignment Assignment::from_pattern(VocabularyPtr vocabulary, std::uint64_t pattern) {
  const std::size_t n = vocabulary->size();
  std::vector<bool> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = (pattern >> (n - 1 - i)) & 1U;
  return Assignment(std::move(vocabulary), std::move(values));
}

std::uint64_t Assignment::pattern() const {
  std::uint64_t p = 0;
  for (bool v : values_) p = (p << 1) | (v ? 1U : 0U);
  return p;
}

std::string Assignment::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) s += ',';
    s += values_[i] ? 'T' : 'F';
  }
  return s + ")";
}

bool Assignment::operator==(const Assignment& other) const {
  return values_ == other.values_ && *vocabulary_ == *other.vocabulary_;
}

namespace {

void require_enumerable(std::size_t vars) {
  if (vars > kMaxEnumerationVars)
    throw LimitError("vocabulary of " + std::to_string(vars) + " variables exceeds the exhaustive bound of " +
                     std::to_string(kMaxEnumerationVars));
}

template <typename Visit>
void for_each_model(const CnfFormula& formula, Visit&& visit) {
  require_enumerable(formula.num_vars());
  const auto masks = clause_masks(formula);
  const std::uint64_t end = std::uint64_t{1} << formula.num_vars();
  for (std::uint64_t p = 0; p < end; ++p) {
    bool ok = true;
    for (const auto& m : masks)
      if (!m.satisfied_by(p)) {
        ok = false;
        break;
      }
    if (ok) visit(p);
  }
}

}  // namespace

std::vector<ClauseMask> clause_masks(const CnfFormula& formula) {
  const std::size_t n = formula.num_vars();
  require_enumerable(n);
  std::vector<ClauseMask> masks;
  masks.reserve(formula.num_clauses());
  for (const auto& c : formula.clauses()) {
    ClauseMask m;
    for (const auto& lit : c.literals()) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - lit.var);
      (lit.negated ? m.negative : m.positive) |= bit;
    }
    masks.push_back(m);
  }
  return masks;
}

bool evaluate(const CnfFormula& formula, const Assignment& assignment) {
  if (!(assignment.vocabulary() == formula.vocabulary()))
    throw InputError("assignment vocabulary does not match the formula's");
  const auto& values = assignment.values();
  return std::all_of(formula.clauses().begin(), formula.clauses().end(), [&](const Clause& c) {
    return std::any_of(c.literals().begin(), c.literals().end(),
                       [&](const Literal& lit) { return values[lit.var] != lit.negated; });
  });
}

std::vector<Assignment> enumerate_models(const CnfFormula& formula) {
  std::vector<Assignment> models;
  for_each_model(formula, [&](std::uint64_t p) {
    models.push_back(Assignment::from_pattern(formula.vocabulary_ptr(), p));
  });
  return models;
}

std::uint64_t count_models(const CnfFormula& formula) {
  std::uint64_t count = 0;
  for_each_model(formula, [&](std::uint64_t) { ++count; });
  return count;
}

bool satisfiable(const CnfFormula& formula) { return count_models(formula) > 0; }

CnfFormula conjoin(const CnfFormula& p, const CnfFormula& q) {
  Vocabulary merged = p.vocabulary();
  std::vector<VarIndex> remap;
  for (const auto& name : q.vocabulary().names()) remap.push_back(merged.add(name));

  std::vector<Clause> clauses = p.clauses();
  for (const auto& c : q.clauses()) {
    std::vector<Literal> lits;
    for (const auto& lit : c.literals()) lits.push_back({remap[lit.var], lit.negated});
    clauses.emplace_back(std::move(lits));
  }
  return CnfFormula(std::move(merged), std::move(clauses));
}

Rational relative_consistency(const CnfFormula& p, const CnfFormula& q) {
  const auto both = conjoin(p, q);
  const auto models = count_models(both);
  return Rational(static_cast<std::int64_t>(models), std::int64_t{1} << both.num_vars());
}

}  // namespace sheafcheck::cnf
