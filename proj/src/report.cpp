#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "sheafcheck/claims.hpp"

namespace sheafcheck::claims {

using ojson = nlohmann::ordered_json;

namespace {

ojson exact(const Rational& r) { return {{"exact", to_string(r)}, {"value", to_double(r)}}; }

template <class T>
ojson maybe(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, Rational>)
    return exact(*v);
  else
    return *v;
}

ojson distribution(const oracle::RatingDistribution& d) {
  return {{"counts", d.counts},
          {"n_success", d.n_success},
          {"n_fail", d.n_fail},
          {"mean", maybe(d.exact_mean())},
          {"stddev", maybe(d.stddev())},
          {"bimodal", maybe(d.bimodal())}};
}

ojson names(const std::vector<std::string>& v) { return ojson(v); }

std::string fixed(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string joined(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

std::string report_json(const AnalysisReport& r) {
  ojson doc;
  ojson prov = {{"source", r.provenance.source}};
  if (const auto& c = r.provenance.config) {
    prov["endpoint"] = c->endpoint;
    prov["model"] = c->model;
    prov["temperature"] = c->temperature ? ojson(*c->temperature) : ojson("provider default");
    prov["n_repeats"] = c->n_repeats;
    prov["seed"] = c->seed;
  }
  doc["ratings"] = prov;
  doc["claims"] = names(r.claim_ids);

  doc["pairs"] = ojson::array();
  for (const auto& p : r.pairs) {
    ojson jp = {{"pair", {p.pair.first, p.pair.second}}, {"distribution", distribution(p.distribution)}};
    jp["discrepancy"] = maybe(p.discrepancy);
    jp["triage"] = std::string(oracle::to_string(p.advice));
    doc["pairs"].push_back(jp);
  }

  doc["radius"] = maybe(r.radius);
  doc["worst_pair"] = r.worst_pair ? ojson{r.worst_pair->first, r.worst_pair->second} : ojson(nullptr);

  ojson f = ojson::array();
  for (const auto& e : r.filtration.events) {
    const auto [a, b] = r.graph.endpoints(e.edge);
    f.push_back({{"threshold", exact(e.threshold)},
                 {"edge", {a, b}},
                 {"left", names(e.left)},
                 {"right", names(e.right)},
                 {"merged", names(e.merged)}});
  }
  doc["filtration"] = {{"events", f}, {"components", r.filtration.components}};

  ojson cycles = ojson::array();
  for (const auto& c : r.cycles) {
    ojson edges = ojson::array();
    for (auto e : c.edges) {
      const auto [a, b] = r.graph.endpoints(e);
      edges.push_back({a, b});
    }
    cycles.push_back({{"nodes", names(c.nodes)},
                      {"edges", edges},
                      {"score", exact(c.score.value())},
                      {"jointly_untested", c.jointly_untested}});
  }
  doc["cycles"] = {{"epsilon", exact(r.cycle_epsilon)}, {"cycles", cycles}};

  doc["betti"] = ojson::array();
  for (const auto& b : r.betti)
    doc["betti"].push_back({{"epsilon", exact(b.epsilon)}, {"betti", b.betti.b}, {"components", b.components}});

  if (r.logical) {
    const auto& L = *r.logical;
    ojson pw = ojson::array();
    for (const auto& p : L.pairwise)
      pw.push_back({{"pair", {p.pair.first, p.pair.second}}, {"relative_consistency", exact(p.relative_consistency)}});
    doc["logical"] = {{"atoms", L.num_atoms},
                      {"satisfiable", L.satisfiable},
                      {"model_count", L.model_count},
                      {"maximal_subset",
                       {{"kept", names(L.subset.kept)},
                        {"dropped", names(L.subset.dropped)},
                        {"achieved_weight", exact(L.subset.achieved_weight)}}},
                      {"pairwise", pw}};
    doc["dropped_on_worst_pair"] = maybe(r.dropped_on_worst_pair);
  } else {
    doc["logical"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string report_markdown(const AnalysisReport& r) {
  std::ostringstream out;
  out << "# Consistency report\n\n";
  out << "Claims: " << joined(r.claim_ids) << "\n\n";
  out << "Ratings: " << r.provenance.source;
  if (const auto& c = r.provenance.config)
    out << " (" << c->model << ", n=" << c->n_repeats << ", seed " << c->seed << ", temperature "
        << (c->temperature ? fixed(*c->temperature, 2) : std::string("provider default")) << ")";
  out << "\n\n";

  out << "## Pair ratings\n\n";
  out << "| pair | n | fail | mean | stddev | bimodal | d | triage |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& p : r.pairs) {
    const auto& d = p.distribution;
    out << "| " << p.pair.first << " / " << p.pair.second << " | " << d.n_success << " | " << d.n_fail << " | "
        << (d.mean() ? fixed(*d.mean()) : "-") << " | " << (d.stddev() ? fixed(*d.stddev()) : "-") << " | "
        << (p.bimodal ? (*p.bimodal ? "yes" : "no") : "-") << " | "
        << (p.discrepancy ? to_string(*p.discrepancy) : "-") << " | " << oracle::to_string(p.advice) << " |\n";
  }
  out << "\n";

  out << "## Consistency radius\n\n";
  if (r.radius)
    out << "Radius " << to_string(*r.radius) << ", attained on (" << r.worst_pair->first << ", "
        << r.worst_pair->second << ").\n\n";
  else
    out << "No rated pairs.\n\n";

  out << "## Filtration\n\n";
  if (r.filtration.events.empty()) out << "No merges.\n";
  for (const auto& e : r.filtration.events)
    out << "- at " << to_string(e.threshold) << ": {" << joined(e.left) << "} + {" << joined(e.right) << "}\n";
  out << "\n";

  out << "## Cycles (epsilon " << to_string(r.cycle_epsilon) << ")\n\n";
  if (r.cycles.empty()) out << "None.\n";
  for (const auto& c : r.cycles) {
    out << "- " << joined(c.nodes, " - ") << ": score " << to_string(c.score.value());
    if (c.jointly_untested) out << " (jointly untested)";
    out << "\n";
  }
  out << "\n";

  out << "## Betti numbers of the thresholded clique complex\n\n";
  out << "| epsilon | betti | components |\n|---|---|---|\n";
  for (const auto& b : r.betti)
    out << "| " << to_string(b.epsilon) << " | " << b.betti.to_string() << " | " << b.components << " |\n";
  out << "\n";

  out << "## Logical analysis\n\n";
  if (!r.logical) {
    out << "Not every claim carries an encoding; skipped.\n";
    return out.str();
  }
  const auto& L = *r.logical;
  out << "Conjunction with background: " << (L.satisfiable ? "satisfiable" : "UNSATISFIABLE") << " ("
      << L.model_count << " models over " << L.num_atoms << " atoms).\n\n";
  out << "Maximal consistent subset (weight " << to_string(L.subset.achieved_weight) << "): kept {"
      << joined(L.subset.kept) << "}, dropped {" << joined(L.subset.dropped) << "}.\n";
  if (r.dropped_on_worst_pair)
    out << "The dropped set " << (*r.dropped_on_worst_pair ? "touches" : "does not touch")
        << " the worst-rated pair.\n";
  out << "\n| pair | relative consistency |\n|---|---|\n";
  for (const auto& p : L.pairwise)
    out << "| " << p.pair.first << " / " << p.pair.second << " | " << to_string(p.relative_consistency) << " |\n";
  return out.str();
}

std::string distribution_json(const oracle::ClaimText& a, const oracle::ClaimText& b, const std::string& model,
                              const oracle::RatingDistribution& d) {
  ojson doc = {{"claim_a", a.text},
               {"claim_b", b.text},
               {"hash", oracle::pair_hash(a, b)},
               {"model", model},
               {"distribution", distribution(d)}};
  return doc.dump(2) + "\n";
}

}  // namespace sheafcheck::claims
