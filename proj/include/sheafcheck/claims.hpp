#pragma once

// Claim corpora and end-to-end analysis of rated claim networks.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheafcheck/cnf.hpp"
#include "sheafcheck/consistency.hpp"
#include "sheafcheck/oracle.hpp"
#include "sheafcheck/prop.hpp"
#include "sheafcheck/topology.hpp"

namespace sheafcheck::claims {

struct Claim {
  std::string id;
  std::string text;
  std::optional<cnf::PropFormula> encoding;
  Rational weight{1};

  oracle::ClaimText claim_text() const { return {id, text}; }
};

using ClaimPair = std::pair<std::string, std::string>;

class ClaimNetwork {
 public:
  ClaimNetwork() = default;
  ClaimNetwork(std::vector<std::string> atoms, std::vector<Claim> claims);

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  const std::vector<Claim>& claims() const noexcept { return claims_; }
  const Claim& claim(std::string_view id) const;
  bool fully_encoded() const;

  /// Designated pairs in corpus order; all unordered pairs unless set.
  const std::vector<ClaimPair>& pairs() const noexcept { return pairs_; }
  void set_pairs(std::vector<ClaimPair> pairs);

  std::optional<oracle::RatingDistribution> rating(const ClaimPair& pair) const;
  /// The pair must be designated.
  void set_rating(const ClaimPair& pair, const oracle::RatingDistribution& d);

  const std::optional<cnf::CnfFormula>& hard_background() const noexcept { return background_; }
  void set_hard_background(std::vector<std::vector<std::string>> clauses);

  /// Atom vocabulary in corpus order.
  cnf::Vocabulary vocabulary() const;
  /// Equivalent CNF of a claim's encoding over the full atom vocabulary.
  cnf::CnfFormula encoding_cnf(std::string_view id) const;
  /// Hard background over the atom vocabulary; empty formula when absent.
  cnf::CnfFormula background_cnf() const;

 private:
  std::size_t designated_index(const ClaimPair& pair) const;

  std::vector<std::string> atoms_;
  std::vector<Claim> claims_;
  std::vector<ClaimPair> pairs_;
  std::vector<std::optional<oracle::RatingDistribution>> ratings_;  // parallel to pairs_
  std::optional<cnf::CnfFormula> background_;
};

/// Parses the JSON corpus schema. Errors name the offending field, e.g.
/// `claims[2].encoding: unknown atom 'x'`.
ClaimNetwork parse_corpus(std::string_view json_text);
ClaimNetwork load_corpus(const std::filesystem::path& path);
/// Corpus JSON including recorded ratings; parse_corpus round-trips it.
std::string dump_corpus(const ClaimNetwork& network);

/// Edge per designated pair with d = 1 - mean/10. Throws InputError when a
/// pair is unrated or has no successful ratings.
consistency::DiscrepancyGraph discrepancy_graph(const ClaimNetwork& network);

/// Flag complex over claim ids using the edges with discrepancy <= epsilon.
topology::SimplicialComplex thresholded_complex(const ClaimNetwork& network, const Rational& epsilon);

/// Fills in ratings for designated pairs that have none (or all pairs when
/// `overwrite`), one pair at a time.
void acquire_ratings(ClaimNetwork& network, const oracle::OracleConfig& config, oracle::ChatTransport& transport,
                     bool overwrite = false);

struct PairSummary {
  ClaimPair pair;
  oracle::RatingDistribution distribution;
  std::optional<Rational> mean;
  std::optional<double> stddev;
  std::optional<bool> bimodal;
  std::optional<Rational> discrepancy;
  oracle::TriageDecision advice = oracle::TriageDecision::Accept;
};

struct BettiAtThreshold {
  Rational epsilon;
  topology::BettiNumbers betti;
  std::size_t components = 0;
};

struct PairConsistency {
  ClaimPair pair;
  Rational relative_consistency;
};

struct LogicalReport {
  std::size_t num_atoms = 0;
  bool satisfiable = false;
  std::uint64_t model_count = 0;
  consistency::MaximalSubsetResult subset;
  std::vector<PairConsistency> pairwise;
};

/// Where the ratings behind a report came from.
struct RatingProvenance {
  std::string source = "recorded";  // "recorded", "mock" or "live"
  std::optional<oracle::OracleConfig> config;  // absent for recorded ratings
};

struct AnalysisOptions {
  std::vector<Rational> epsilon_grid;  // default 0, 1/10, ..., 1
  std::optional<Rational> cycle_epsilon;  // default: largest grid value
  RatingProvenance provenance;  // copied into the report
};

struct AnalysisReport {
  RatingProvenance provenance;
  std::vector<std::string> claim_ids;
  std::vector<PairSummary> pairs;
  consistency::DiscrepancyGraph graph;
  std::optional<Rational> radius;  // absent with no edges
  std::optional<ClaimPair> worst_pair;
  consistency::ConsistencyFiltration filtration;
  Rational cycle_epsilon;
  std::vector<consistency::CycleReport> cycles;
  std::vector<BettiAtThreshold> betti;
  std::optional<LogicalReport> logical;  // only when every claim is encoded
  /// Some dropped claim lies on the worst-rated pair.
  std::optional<bool> dropped_on_worst_pair;
};

std::vector<Rational> default_epsilon_grid();

AnalysisReport analyze(const ClaimNetwork& network, const AnalysisOptions& options = {});

std::string report_json(const AnalysisReport& report);
std::string report_markdown(const AnalysisReport& report);

/// JSON summary of one rated pair, as printed by `sheafcheck rate`.
std::string distribution_json(const oracle::ClaimText& a, const oracle::ClaimText& b, const std::string& model,
                              const oracle::RatingDistribution& d);

}  // namespace sheafcheck::claims
