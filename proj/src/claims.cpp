#include "sheafcheck/claims.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sheafcheck/error.hpp"

namespace sheafcheck::claims {

using nlohmann::json;

namespace {

bool reserved_name(std::string_view name) {
  return name.starts_with(cnf::kAuxPrefix) || name.starts_with(consistency::kSelectorPrefix);
}

ClaimPair normalized(const ClaimPair& p) { return p.first < p.second ? p : ClaimPair{p.second, p.first}; }

}  // namespace

ClaimNetwork::ClaimNetwork(std::vector<std::string> atoms, std::vector<Claim> claims)
    : atoms_(std::move(atoms)), claims_(std::move(claims)) {
  if (claims_.empty()) throw InputError("a claim network needs at least one claim");
  std::set<std::string> seen_atoms;
  for (const auto& a : atoms_) {
    if (a.empty()) throw InputError("atom names must be non-empty");
    if (reserved_name(a)) throw InputError("atom '" + a + "' uses a reserved prefix");
    if (!seen_atoms.insert(a).second) throw InputError("duplicate atom '" + a + "'");
  }
  std::set<std::string> seen;
  for (const auto& c : claims_) {
    if (c.id.empty()) throw InputError("claim ids must be non-empty");
    if (!seen.insert(c.id).second) throw InputError("duplicate claim id '" + c.id + "'");
    c.claim_text().validate();
    if (c.weight <= 0) throw InputError("claim '" + c.id + "' needs a positive weight");
    if (c.encoding)
      for (const auto& atom : c.encoding->atoms())
        if (!seen_atoms.count(atom)) throw InputError("claim '" + c.id + "' uses unknown atom '" + atom + "'");
  }
  std::vector<ClaimPair> all;
  for (std::size_t i = 0; i < claims_.size(); ++i)
    for (std::size_t j = i + 1; j < claims_.size(); ++j) all.emplace_back(claims_[i].id, claims_[j].id);
  set_pairs(std::move(all));
}

const Claim& ClaimNetwork::claim(std::string_view id) const {
  for (const auto& c : claims_)
    if (c.id == id) return c;
  throw InputError("unknown claim '" + std::string(id) + "'");
}

bool ClaimNetwork::fully_encoded() const {
  return std::all_of(claims_.begin(), claims_.end(), [](const Claim& c) { return c.encoding.has_value(); });
}

void ClaimNetwork::set_pairs(std::vector<ClaimPair> pairs) {
  std::set<ClaimPair> seen;
  for (const auto& p : pairs) {
    claim(p.first);
    claim(p.second);
    if (p.first == p.second) throw InputError("pair pairs claim '" + p.first + "' with itself");
    if (!seen.insert(normalized(p)).second)
      throw InputError("pair (" + p.first + ", " + p.second + ") is listed twice");
  }
  pairs_ = std::move(pairs);
  ratings_.assign(pairs_.size(), std::nullopt);
}

std::size_t ClaimNetwork::designated_index(const ClaimPair& pair) const {
  const auto key = normalized(pair);
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    if (normalized(pairs_[i]) == key) return i;
  throw InputError("pair (" + pair.first + ", " + pair.second + ") is not designated");
}

std::optional<oracle::RatingDistribution> ClaimNetwork::rating(const ClaimPair& pair) const {
  return ratings_[designated_index(pair)];
}

void ClaimNetwork::set_rating(const ClaimPair& pair, const oracle::RatingDistribution& d) {
  ratings_[designated_index(pair)] = d;
}

cnf::Vocabulary ClaimNetwork::vocabulary() const { return cnf::Vocabulary(atoms_); }

cnf::CnfFormula ClaimNetwork::encoding_cnf(std::string_view id) const {
  const auto& c = claim(id);
  if (!c.encoding) throw InputError("claim '" + c.id + "' has no encoding");
  return cnf::clausify(*c.encoding, vocabulary());
}

cnf::CnfFormula ClaimNetwork::background_cnf() const {
  if (background_) return *background_;
  return cnf::CnfFormula(vocabulary(), {});
}

void ClaimNetwork::set_hard_background(std::vector<std::vector<std::string>> clauses) {
  cnf::CnfFormula shell(vocabulary(), {});
  std::vector<cnf::Clause> out;
  for (const auto& c : clauses) out.push_back(shell.clause_from_names(c));
  background_ = cnf::CnfFormula(vocabulary(), std::move(out));
}

// Corpus JSON ------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw InputError(path + ": " + what); }

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

// Re-raise an InputError from a constructor with the field path in front.
template <class F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

Rational parse_weight(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) return at_path(path, [&] { return parse_rational(v.get<std::string>()); });
  fail(path, "expected an integer or a \"p/q\" string");
}

oracle::RatingDistribution parse_distribution(const json& r, const std::string& path) {
  if (r.contains("counts")) {
    const auto& counts = as_array(r["counts"], path + ".counts");
    if (counts.size() != 11) fail(path + ".counts", "expected 11 bins for ratings 0..10");
    std::array<std::size_t, 11> c{};
    for (std::size_t k = 0; k < 11; ++k) {
      if (!counts[k].is_number_unsigned()) fail(path + ".counts[" + std::to_string(k) + "]", "expected a count");
      c[k] = counts[k].get<std::size_t>();
    }
    std::size_t n_fail = 0;
    if (r.contains("n_fail")) {
      if (!r["n_fail"].is_number_unsigned()) fail(path + ".n_fail", "expected a count");
      n_fail = r["n_fail"].get<std::size_t>();
    }
    return oracle::RatingDistribution::from_counts(c, n_fail);
  }
  if (r.contains("samples")) {
    std::vector<std::optional<int>> ratings;
    const auto& samples = as_array(r["samples"], path + ".samples");
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (samples[k].is_null()) {
        ratings.push_back(std::nullopt);
      } else if (samples[k].is_number_integer() && samples[k].get<int>() >= 0 && samples[k].get<int>() <= 10) {
        ratings.push_back(samples[k].get<int>());
      } else {
        fail(path + ".samples[" + std::to_string(k) + "]", "expected a rating in 0..10 or null");
      }
    }
    return oracle::RatingDistribution::from_ratings(ratings);
  }
  fail(path, "expected 'counts' or 'samples'");
}

ClaimPair parse_pair(const json& v, const std::string& path) {
  as_array(v, path);
  if (v.size() != 2) fail(path, "expected two claim ids");
  return {as_string(v[0], path + "[0]"), as_string(v[1], path + "[1]")};
}

}  // namespace

ClaimNetwork parse_corpus(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corpus is not valid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) fail("$", "expected an object");

  std::vector<std::string> atoms;
  if (doc.contains("atoms")) {
    const auto& a = as_array(doc["atoms"], "atoms");
    for (std::size_t i = 0; i < a.size(); ++i) atoms.push_back(as_string(a[i], "atoms[" + std::to_string(i) + "]"));
  }
  const std::set<std::string> atom_set(atoms.begin(), atoms.end());

  std::vector<Claim> claims;
  const auto& cs = as_array(field(doc, "claims", "$"), "claims");
  if (cs.empty()) fail("claims", "the claims list is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string path = "claims[" + std::to_string(i) + "]";
    Claim c;
    c.id = as_string(field(cs[i], "id", path), path + ".id");
    if (!ids.insert(c.id).second) fail(path + ".id", "duplicate claim id '" + c.id + "'");
    c.text = as_string(field(cs[i], "text", path), path + ".text");
    if (cs[i].contains("encoding") && !cs[i]["encoding"].is_null()) {
      const auto text = as_string(cs[i]["encoding"], path + ".encoding");
      c.encoding = at_path(path + ".encoding", [&] { return cnf::parse_prop(text); });
      for (const auto& atom : c.encoding->atoms())
        if (!atom_set.count(atom)) fail(path + ".encoding", "unknown atom '" + atom + "'");
    }
    if (cs[i].contains("weight")) c.weight = parse_weight(cs[i]["weight"], path + ".weight");
    claims.push_back(std::move(c));
  }

  auto network = at_path("$", [&] { return ClaimNetwork(atoms, claims); });

  if (doc.contains("pairs")) {
    const auto& ps = as_array(doc["pairs"], "pairs");
    std::vector<ClaimPair> pairs;
    for (std::size_t i = 0; i < ps.size(); ++i) pairs.push_back(parse_pair(ps[i], "pairs[" + std::to_string(i) + "]"));
    at_path("pairs", [&] { network.set_pairs(pairs); return 0; });
  }

  if (doc.contains("hard_background")) {
    const auto& hb = as_array(doc["hard_background"], "hard_background");
    std::vector<std::vector<std::string>> clauses;
    for (std::size_t i = 0; i < hb.size(); ++i) {
      const std::string path = "hard_background[" + std::to_string(i) + "]";
      std::vector<std::string> lits;
      for (std::size_t k = 0; k < as_array(hb[i], path).size(); ++k)
        lits.push_back(as_string(hb[i][k], path + "[" + std::to_string(k) + "]"));
      at_path(path, [&] {
        std::vector<std::vector<std::string>> one{lits};
        ClaimNetwork probe = network;
        probe.set_hard_background(one);
        return 0;
      });
      clauses.push_back(std::move(lits));
    }
    network.set_hard_background(std::move(clauses));
  }

  if (doc.contains("ratings")) {
    const auto& rs = as_array(doc["ratings"], "ratings");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string path = "ratings[" + std::to_string(i) + "]";
      const auto pair = parse_pair(field(rs[i], "pair", path), path + ".pair");
      const auto d = parse_distribution(rs[i], path);
      at_path(path + ".pair", [&] {
        if (network.rating(pair)) throw InputError("pair is rated twice");
        network.set_rating(pair, d);
        return 0;
      });
    }
  }
  return network;
}

ClaimNetwork load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_corpus(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string dump_corpus(const ClaimNetwork& network) {
  json doc = json::object();
  doc["atoms"] = network.atoms();
  doc["claims"] = json::array();
  for (const auto& c : network.claims()) {
    json jc = {{"id", c.id}, {"text", c.text}};
    if (c.encoding) jc["encoding"] = c.encoding->to_string();
    if (c.weight != Rational(1)) jc["weight"] = to_string(c.weight);
    doc["claims"].push_back(jc);
  }
  doc["pairs"] = json::array();
  for (const auto& [a, b] : network.pairs()) doc["pairs"].push_back({a, b});
  if (const auto& bg = network.hard_background()) {
    doc["hard_background"] = json::array();
    for (const auto& cl : bg->clauses()) {
      json lits = json::array();
      for (const auto& l : cl.literals()) lits.push_back((l.negated ? "-" : "") + bg->vocabulary().name(l.var));
      doc["hard_background"].push_back(lits);
    }
  }
  doc["ratings"] = json::array();
  for (const auto& p : network.pairs())
    if (const auto d = network.rating(p))
      doc["ratings"].push_back({{"pair", {p.first, p.second}}, {"counts", d->counts}, {"n_fail", d->n_fail}});
  return doc.dump(2) + "\n";
}

// Analysis -----------------------------------------------------------------------------

consistency::DiscrepancyGraph discrepancy_graph(const ClaimNetwork& network) {
  consistency::DiscrepancyGraph g;
  for (const auto& c : network.claims()) g.add_node(c.id);
  for (const auto& p : network.pairs()) {
    const auto d = network.rating(p);
    if (!d) throw InputError("pair (" + p.first + ", " + p.second + ") is unrated");
    const auto mean = d->exact_mean();
    if (!mean) throw InputError("pair (" + p.first + ", " + p.second + ") has no successful ratings");
    g.add_edge(p.first, p.second, consistency::discrepancy_from_mean(*mean));
  }
  return g;
}

namespace {

topology::SimplicialComplex thresholded(const consistency::DiscrepancyGraph& g, const Rational& epsilon) {
  std::vector<std::pair<topology::Vertex, topology::Vertex>> edges;
  for (const auto& e : g.edges())
    if (e.discrepancy <= epsilon)
      edges.emplace_back(static_cast<topology::Vertex>(e.u), static_cast<topology::Vertex>(e.v));
  return topology::clique_complex(g.nodes(), edges);
}

}  // namespace

topology::SimplicialComplex thresholded_complex(const ClaimNetwork& network, const Rational& epsilon) {
  if (epsilon < 0 || epsilon > 1) throw InputError("epsilon " + to_string(epsilon) + " outside [0,1]");
  return thresholded(discrepancy_graph(network), epsilon);
}

void acquire_ratings(ClaimNetwork& network, const oracle::OracleConfig& config, oracle::ChatTransport& transport,
                     bool overwrite) {
  for (const auto& p : network.pairs()) {
    if (!overwrite && network.rating(p)) continue;
    const auto d = oracle::rate_pair(config, transport, network.claim(p.first).claim_text(),
                                     network.claim(p.second).claim_text());
    network.set_rating(p, d);
  }
}

std::vector<Rational> default_epsilon_grid() {
  std::vector<Rational> grid;
  for (int k = 0; k <= 10; ++k) grid.emplace_back(k, 10);
  return grid;
}

AnalysisReport analyze(const ClaimNetwork& network, const AnalysisOptions& options) {
  AnalysisReport r;
  r.provenance = options.provenance;
  for (const auto& c : network.claims()) r.claim_ids.push_back(c.id);

  auto grid = options.epsilon_grid.empty() ? default_epsilon_grid() : options.epsilon_grid;
  for (const auto& e : grid)
    if (e < 0 || e > 1) throw InputError("epsilon " + to_string(e) + " outside [0,1]");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  r.graph = discrepancy_graph(network);
  for (std::size_t i = 0; i < network.pairs().size(); ++i) {
    const auto& p = network.pairs()[i];
    PairSummary s;
    s.pair = p;
    s.distribution = *network.rating(p);
    s.mean = s.distribution.exact_mean();
    s.stddev = s.distribution.stddev();
    s.bimodal = s.distribution.bimodal();
    s.discrepancy = r.graph.edges()[i].discrepancy;
    s.advice = oracle::triage(s.distribution, {}, 0);
    r.pairs.push_back(std::move(s));
  }

  if (!r.graph.edges().empty()) {
    r.radius = consistency::consistency_radius(r.graph);
    // Worst pair: highest discrepancy, ties to the first designated pair.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < r.graph.edges().size(); ++i)
      if (r.graph.edges()[i].discrepancy > r.graph.edges()[worst].discrepancy) worst = i;
    r.worst_pair = network.pairs()[worst];
  }
  r.filtration = consistency::consistency_filtration(r.graph);
  r.cycle_epsilon = options.cycle_epsilon.value_or(grid.back());
  r.cycles = consistency::cycle_report(r.graph, r.cycle_epsilon);
  for (const auto& e : grid) {
    const auto complex = thresholded(r.graph, e);
    r.betti.push_back({e, topology::betti(complex), r.filtration.components_at(e)});
  }

  if (network.fully_encoded()) {
    LogicalReport L;
    L.num_atoms = network.atoms().size();
    auto all = network.background_cnf();
    std::vector<consistency::EncodedClaim> encoded;
    for (const auto& c : network.claims()) {
      auto f = network.encoding_cnf(c.id);
      all = cnf::conjoin(all, f);
      encoded.push_back({c.id, std::move(f), c.weight});
    }
    L.model_count = cnf::count_models(all);
    L.satisfiable = L.model_count > 0;
    L.subset = consistency::maximal_consistent_subset(encoded, network.background_cnf());
    for (const auto& p : network.pairs()) {
      const auto a = cnf::conjoin(network.background_cnf(), network.encoding_cnf(p.first));
      L.pairwise.push_back({p, cnf::relative_consistency(a, network.encoding_cnf(p.second))});
    }
    if (r.worst_pair) {
      const auto& d = L.subset.dropped;
      r.dropped_on_worst_pair = std::find(d.begin(), d.end(), r.worst_pair->first) != d.end() ||
                                std::find(d.begin(), d.end(), r.worst_pair->second) != d.end();
    }
    r.logical = std::move(L);
  }
  return r;
}

}  // namespace sheafcheck::claims
