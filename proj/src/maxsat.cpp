#include <numeric>

#include "sheafcheck/cnf.hpp"
#include "sheafcheck/error.hpp"

namespace sheafcheck::cnf {

WeightedCnf::WeightedCnf(CnfFormula base_, std::vector<Rational> weights_, std::vector<bool> hard_)
    : base(std::move(base_)), weights(std::move(weights_)), hard(std::move(hard_)) {
  if (base.num_clauses() == 0) throw InputError("a weighted formula needs at least one clause");
  if (weights.size() != base.num_clauses() || hard.size() != base.num_clauses())
    throw InputError("weights and hard flags must have one entry per clause");
  for (const auto& w : weights)
    if (w < 0) throw InputError("clause weights must be non-negative");
}

Rational WeightedCnf::total_soft_weight() const {
  Rational total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!hard[i]) total += weights[i];
  return total;
}

MaxSatResult max_sat(const WeightedCnf& wcnf) {
  const auto& f = wcnf.base;
  if (f.num_vars() > kMaxEnumerationVars)
    throw LimitError("MAX-SAT over " + std::to_string(f.num_vars()) + " variables exceeds the exhaustive bound of " +
                     std::to_string(kMaxEnumerationVars));
  const auto masks = clause_masks(f);

  std::vector<ClauseMask> hard_masks;
  std::vector<std::size_t> soft;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (wcnf.hard[i])
      hard_masks.push_back(masks[i]);
    else
      soft.push_back(i);
  }

  // Scale soft weights to a common denominator so the sweep stays in integers.
  std::int64_t denom = 1;
  for (auto i : soft) denom = std::lcm(denom, wcnf.weights[i].denominator());
  std::vector<std::int64_t> scaled;
  for (auto i : soft) scaled.push_back(wcnf.weights[i].numerator() * (denom / wcnf.weights[i].denominator()));

  std::optional<std::uint64_t> best;
  std::int64_t best_weight = -1;
  const std::uint64_t end = std::uint64_t{1} << f.num_vars();
  for (std::uint64_t p = 0; p < end; ++p) {
    bool ok = true;
    for (const auto& m : hard_masks)
      if (!m.satisfied_by(p)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::int64_t w = 0;
    for (std::size_t k = 0; k < soft.size(); ++k)
      if (masks[soft[k]].satisfied_by(p)) w += scaled[k];
    if (w > best_weight) {
      best_weight = w;
      best = p;
    }
  }
  if (!best) throw UnsatisfiableError("hard clauses are jointly unsatisfiable");

  std::vector<std::size_t> satisfied;
  for (std::size_t i = 0; i < masks.size(); ++i)
    if (masks[i].satisfied_by(*best)) satisfied.push_back(i);
  return {Assignment::from_pattern(f.vocabulary_ptr(), *best), Rational(best_weight, denom), std::move(satisfied)};
}

}  // namespace sheafcheck::cnf
