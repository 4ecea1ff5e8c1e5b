#pragma once

// Quantitative consistency over rated claim networks: Lukasiewicz
// connectives, consistency radius, the single-linkage consistency
// filtration, cycle scoring, and claim-level maximal satisfiability.

#include <cstddef>
#include <string>
#include <vector>

#include "sheafcheck/cnf.hpp"

namespace sheafcheck::consistency {

/// A value in [0, 1].
class TruthValue {
 public:
  TruthValue() = default;
  TruthValue(Rational value);  // NOLINT: implicit by design of the algebra below
  TruthValue(std::int64_t num, std::int64_t den) : TruthValue(Rational(num, den)) {}

  /// Maps a 0..10 rating (or mean rating) to rating / 10.
  static TruthValue from_rating(const Rational& rating);

  const Rational& value() const noexcept { return value_; }
  bool operator==(const TruthValue&) const = default;

 private:
  Rational value_{1};
};

TruthValue luk_and(TruthValue a, TruthValue b);
TruthValue luk_or(TruthValue a, TruthValue b);
TruthValue luk_implies(TruthValue a, TruthValue b);
/// Conjunction of a list; the empty conjunction is 1.
TruthValue luk_and(const std::vector<TruthValue>& values);

/// 1 - mean / 10 for a mean rating on the 0..10 scale.
Rational discrepancy_from_mean(const Rational& mean_rating);

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  Rational discrepancy;
};

class DiscrepancyGraph {
 public:
  std::size_t add_node(const std::string& id);
  /// Undirected; self-edges and duplicate pairs are rejected.
  std::size_t add_edge(const std::string& a, const std::string& b, const Rational& discrepancy);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_index(const std::string& id) const;

  /// Edge indices sorted by (discrepancy, lexicographic endpoint names).
  std::vector<std::size_t> sorted_edges() const;
  /// Lexicographically ordered endpoint names of an edge.
  std::pair<std::string, std::string> endpoints(std::size_t edge) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
};

/// Largest discrepancy over the scoped edges; throws on an empty scope.
Rational consistency_radius(const DiscrepancyGraph& g, const std::vector<std::size_t>& scope);
Rational consistency_radius(const DiscrepancyGraph& g);

struct MergeEvent {
  Rational threshold;
  std::size_t edge = 0;
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<std::string> merged;
};

struct ConsistencyFiltration {
  std::vector<MergeEvent> events;
  /// Components once every edge is admitted, each sorted, ordered by first member.
  std::vector<std::vector<std::string>> components;
  std::size_t node_count = 0;

  std::size_t components_at(const Rational& epsilon) const;
};

ConsistencyFiltration consistency_filtration(const DiscrepancyGraph& g);

struct CycleReport {
  std::vector<std::string> nodes;  // in cycle order, starting at the closing edge's first endpoint
  std::vector<std::size_t> edges;
  TruthValue score;
  /// Every edge is rated fully consistent, so pairwise data cannot reveal a
  /// joint inconsistency around this cycle.
  bool jointly_untested = false;
};

/// Fundamental cycles of the graph restricted to edges with discrepancy <= epsilon.
std::vector<CycleReport> cycle_report(const DiscrepancyGraph& g, const Rational& epsilon);

struct EncodedClaim {
  std::string id;
  cnf::CnfFormula encoding;
  Rational weight{1};
};

struct MaximalSubsetResult {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  Rational achieved_weight;
};

/// Name prefix of the per-claim selector variables.
inline constexpr std::string_view kSelectorPrefix = "__sel.";

/// Group MAX-SAT: one selector per claim guards every clause of its
/// encoding; selectors are soft unit clauses carrying the claim's weight and
/// the background is hard.
MaximalSubsetResult maximal_consistent_subset(const std::vector<EncodedClaim>& claims,
                                              const cnf::CnfFormula& hard_background);

}  // namespace sheafcheck::consistency
