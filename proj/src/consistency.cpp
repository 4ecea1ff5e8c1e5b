#include "sheafcheck/consistency.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "sheafcheck/error.hpp"

namespace sheafcheck::consistency {

TruthValue::TruthValue(Rational value) : value_(value) {
  if (value_ < 0 || value_ > 1) throw InputError("truth value " + to_string(value_) + " outside [0,1]");
}

TruthValue TruthValue::from_rating(const Rational& rating) {
  if (rating < 0 || rating > 10) throw InputError("rating " + to_string(rating) + " outside 0..10");
  return TruthValue(rating / 10);
}

TruthValue luk_and(TruthValue a, TruthValue b) { return std::max(Rational(0), a.value() + b.value() - 1); }
TruthValue luk_or(TruthValue a, TruthValue b) { return std::min(Rational(1), a.value() + b.value()); }
TruthValue luk_implies(TruthValue a, TruthValue b) { return std::min(Rational(1), 1 - a.value() + b.value()); }

TruthValue luk_and(const std::vector<TruthValue>& values) {
  TruthValue acc(1);
  for (const auto& v : values) acc = luk_and(acc, v);
  return acc;
}

Rational discrepancy_from_mean(const Rational& mean_rating) {
  return 1 - TruthValue::from_rating(mean_rating).value();
}

// Graph --------------------------------------------------------------------------

std::size_t DiscrepancyGraph::add_node(const std::string& id) {
  auto it = std::find(nodes_.begin(), nodes_.end(), id);
  if (it != nodes_.end()) return static_cast<std::size_t>(it - nodes_.begin());
  nodes_.push_back(id);
  return nodes_.size() - 1;
}

std::size_t DiscrepancyGraph::node_index(const std::string& id) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end()) throw InputError("unknown node '" + id + "'");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t DiscrepancyGraph::add_edge(const std::string& a, const std::string& b, const Rational& discrepancy) {
  if (a == b) throw InputError("self-edge on '" + a + "'");
  if (discrepancy < 0 || discrepancy > 1)
    throw InputError("discrepancy " + to_string(discrepancy) + " outside [0,1]");
  const auto u = add_node(a);
  const auto v = add_node(b);
  for (const auto& e : edges_)
    if ((e.u == u && e.v == v) || (e.u == v && e.v == u))
      throw InputError("duplicate edge between '" + a + "' and '" + b + "'");
  edges_.push_back({u, v, discrepancy});
  return edges_.size() - 1;
}

std::pair<std::string, std::string> DiscrepancyGraph::endpoints(std::size_t edge) const {
  const auto& e = edges_.at(edge);
  auto a = nodes_[e.u], b = nodes_[e.v];
  if (b < a) std::swap(a, b);
  return {a, b};
}

std::vector<std::size_t> DiscrepancyGraph::sorted_edges() const {
  std::vector<std::size_t> order(edges_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (edges_[x].discrepancy != edges_[y].discrepancy) return edges_[x].discrepancy < edges_[y].discrepancy;
    return endpoints(x) < endpoints(y);
  });
  return order;
}

Rational consistency_radius(const DiscrepancyGraph& g, const std::vector<std::size_t>& scope) {
  if (scope.empty()) throw InputError("consistency radius over an empty scope");
  Rational r = 0;
  for (auto i : scope) r = std::max(r, g.edges().at(i).discrepancy);
  return r;
}

Rational consistency_radius(const DiscrepancyGraph& g) {
  std::vector<std::size_t> all(g.edges().size());
  std::iota(all.begin(), all.end(), 0);
  return consistency_radius(g, all);
}

// Filtration -------------------------------------------------------------------------

namespace {

struct Forest {
  std::vector<std::size_t> parent;
  std::vector<std::vector<std::size_t>> members;

  explicit Forest(std::size_t n) : parent(n), members(n) {
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a > b) std::swap(a, b);
    parent[b] = a;
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
  }
};

std::vector<std::string> names_of(const DiscrepancyGraph& g, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(g.nodes()[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::size_t ConsistencyFiltration::components_at(const Rational& epsilon) const {
  std::size_t merges = 0;
  for (const auto& e : events)
    if (e.threshold <= epsilon) ++merges;
  return node_count - merges;
}

ConsistencyFiltration consistency_filtration(const DiscrepancyGraph& g) {
  ConsistencyFiltration out;
  out.node_count = g.nodes().size();
  Forest forest(g.nodes().size());
  for (auto idx : g.sorted_edges()) {
    const auto& e = g.edges()[idx];
    const auto a = forest.find(e.u), b = forest.find(e.v);
    if (a == b) continue;
    MergeEvent ev;
    ev.threshold = e.discrepancy;
    ev.edge = idx;
    ev.left = names_of(g, forest.members[a]);
    ev.right = names_of(g, forest.members[b]);
    if (ev.right < ev.left) std::swap(ev.left, ev.right);
    forest.unite(a, b);
    ev.merged = names_of(g, forest.members[forest.find(a)]);
    out.events.push_back(std::move(ev));
  }
  for (std::size_t i = 0; i < g.nodes().size(); ++i)
    if (forest.find(i) == i) out.components.push_back(names_of(g, forest.members[i]));
  std::sort(out.components.begin(), out.components.end());
  return out;
}

// Cycles -----------------------------------------------------------------------------

std::vector<CycleReport> cycle_report(const DiscrepancyGraph& g, const Rational& epsilon) {
  const std::size_t n = g.nodes().size();
  Forest forest(n);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> tree(n);  // (neighbor, edge)
  std::vector<std::size_t> closing;
  for (auto idx : g.sorted_edges()) {
    const auto& e = g.edges()[idx];
    if (e.discrepancy > epsilon) continue;
    if (forest.find(e.u) == forest.find(e.v)) {
      closing.push_back(idx);
      continue;
    }
    forest.unite(e.u, e.v);
    tree[e.u].push_back({e.v, idx});
    tree[e.v].push_back({e.u, idx});
  }

  std::vector<CycleReport> out;
  for (auto idx : closing) {
    const auto& e = g.edges()[idx];
    // Tree path from e.u to e.v by DFS with parent links.
    std::vector<std::ptrdiff_t> via_edge(n, -1);
    std::vector<std::size_t> prev(n, n);
    std::vector<std::size_t> stack{e.u};
    prev[e.u] = e.u;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      if (x == e.v) break;
      for (auto [y, ei] : tree[x])
        if (prev[y] == n) {
          prev[y] = x;
          via_edge[y] = static_cast<std::ptrdiff_t>(ei);
          stack.push_back(y);
        }
    }
    std::vector<std::size_t> path_nodes{e.v};
    std::vector<std::size_t> path_edges;
    for (auto x = e.v; x != e.u; x = prev[x]) {
      path_edges.push_back(static_cast<std::size_t>(via_edge[x]));
      path_nodes.push_back(prev[x]);
    }
    std::reverse(path_nodes.begin(), path_nodes.end());
    std::reverse(path_edges.begin(), path_edges.end());
    path_edges.push_back(idx);

    CycleReport c;
    for (auto x : path_nodes) c.nodes.push_back(g.nodes()[x]);
    c.edges = path_edges;
    std::vector<TruthValue> truths;
    for (auto ei : path_edges) truths.emplace_back(1 - g.edges()[ei].discrepancy);
    c.score = luk_and(truths);
    c.jointly_untested = c.score.value() == Rational(1);
    out.push_back(std::move(c));
  }
  return out;
}

// Maximal consistent subsets --------------------------------------------------------

MaximalSubsetResult maximal_consistent_subset(const std::vector<EncodedClaim>& claims,
                                              const cnf::CnfFormula& hard_background) {
  if (!cnf::satisfiable(hard_background)) throw UnsatisfiableError("hard background is unsatisfiable on its own");

  cnf::Vocabulary vocab = hard_background.vocabulary();
  for (const auto& c : claims) {
    if (c.weight <= 0) throw InputError("claim '" + c.id + "' needs a positive weight");
    for (const auto& name : c.encoding.vocabulary().names()) vocab.add(name);
  }
  std::vector<cnf::VarIndex> selector;
  for (const auto& c : claims) {
    const std::string name = std::string(kSelectorPrefix) + c.id;
    if (vocab.find(name)) throw InputError("selector name '" + name + "' collides with an atom");
    selector.push_back(vocab.add(name));
  }
  if (vocab.size() > cnf::kMaxEnumerationVars)
    throw LimitError("claims plus selectors need " + std::to_string(vocab.size()) + " variables; the bound is " +
                     std::to_string(cnf::kMaxEnumerationVars));

  std::vector<cnf::Clause> clauses;
  std::vector<Rational> weights;
  std::vector<bool> hard;
  auto remap = [&](const cnf::CnfFormula& f, const cnf::Clause& c) {
    std::vector<cnf::Literal> lits;
    for (const auto& l : c.literals()) lits.push_back({vocab.index_of(f.vocabulary().name(l.var)), l.negated});
    return lits;
  };
  for (const auto& c : hard_background.clauses()) {
    clauses.emplace_back(remap(hard_background, c));
    weights.emplace_back(0);
    hard.push_back(true);
  }
  for (std::size_t k = 0; k < claims.size(); ++k) {
    for (const auto& c : claims[k].encoding.clauses()) {
      auto lits = remap(claims[k].encoding, c);
      lits.push_back({selector[k], true});
      clauses.emplace_back(std::move(lits));
      weights.emplace_back(0);
      hard.push_back(true);
    }
    clauses.emplace_back(std::vector<cnf::Literal>{{selector[k], false}});
    weights.push_back(claims[k].weight);
    hard.push_back(false);
  }

  const auto result = cnf::max_sat(
      cnf::WeightedCnf(cnf::CnfFormula(std::move(vocab), std::move(clauses)), std::move(weights), std::move(hard)));
  MaximalSubsetResult out;
  out.achieved_weight = result.achieved_weight;
  for (std::size_t k = 0; k < claims.size(); ++k)
    (result.assignment.value(selector[k]) ? out.kept : out.dropped).push_back(claims[k].id);
  return out;
}

}  // namespace sheafcheck::consistency
