// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <openssl/sha.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "convert.hpp"
#include "sheafcheck/claims.hpp"
#include "sheafcheck/cnf.hpp"
#include "sheafcheck/consistency.hpp"
#include "sheafcheck/oracle.hpp"
#include "sheafcheck/sheaf.hpp"
#include "sheafcheck/topology.hpp"

using namespace sheafcheck;

namespace {

const std::string kRoot = SHEAFCHECK_SOURCE_DIR;

// Time limits, in seconds.
constexpr double kLimitGroundTruth = 1.0;
constexpr double kLimitTopology = 1.0;
constexpr double kLimitFuzz = 60.0;
constexpr double kLimitConsistency = 5.0;

// Golden digest of the shipped initialization prompt (1821 bytes).
constexpr std::size_t kPromptBytes = 1821;
constexpr const char* kPromptSha256 = "0341b3ad18abd89613247dbb19f24a04570683fa8040d9392651f561844ebf88";

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md);
  std::string out;
  char buf[3];
  for (unsigned char c : md) {
    std::snprintf(buf, sizeof buf, "%02x", c);
    out += buf;
  }
  return out;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

int failures = 0;

void criterion(int n, const std::string& title, const std::function<std::string()>& body) {
  std::string status = "PASS";
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& e) {
    status = "FAIL";
    detail = e.what();
    ++failures;
  }
  std::cout << status << " " << n << " " << title << ": " << detail << std::endl;
}

std::set<std::string> rendered(const std::vector<cnf::Assignment>& as) {
  std::set<std::string> out;
  for (const auto& a : as) out.insert(a.to_string());
  return out;
}

// Random formula in which every variable occurs.
brute::RawFormula dense_formula(std::mt19937_64& rng, int max_vars, int max_clauses) {
  auto f = brute::random_formula(rng, max_vars, max_clauses);
  std::map<int, int> rename;
  for (const auto& c : f.clauses)
    for (int lit : c) rename.emplace(std::abs(lit), 0);
  int next = 0;
  for (auto& [from, to] : rename) to = ++next;
  for (auto& c : f.clauses)
    for (int& lit : c) lit = lit > 0 ? rename[lit] : -rename[-lit];
  f.nvars = next;
  return f;
}

// ---------------------------------------------------------------------------------

std::string ground_truth() {
  Timer t;
  const auto f = cnf::parse_dimacs(read_file(kRoot + "/tests/fixtures/wxyz.cnf"));
  const auto models = rendered(cnf::enumerate_models(f));
  const auto globals = rendered(sheaf::global_sections(sheaf::build_sheaf(f)));
  const double secs = t.seconds();
  // (T,F,F,F) together with every completion of (T,T,*,*)
  const std::set<std::string> expected = {"(T,F,F,F)", "(T,T,F,F)", "(T,T,F,T)", "(T,T,T,F)", "(T,T,T,T)"};
  expect(models == expected, "model set differs");
  expect(globals == expected, "global sections differ");
  expect(secs < kLimitGroundTruth, "took " + fmt_seconds(secs));
  return "5 models, global sections identical, " + fmt_seconds(secs);
}

std::string topology_betti() {
  Timer t;
  const auto f = cnf::parse_dimacs(read_file(kRoot + "/tests/fixtures/wxyz.cnf"));
  const auto primal = topology::betti(topology::clause_complex(f));
  const auto dual = topology::betti(topology::dowker_dual(f));
  const double secs = t.seconds();
  expect(primal.b == std::vector<std::size_t>{1, 1, 0}, "clause complex: " + primal.to_string());
  expect(dual.b == std::vector<std::size_t>{1, 1, 0}, "dual complex: " + dual.to_string());
  expect(secs < kLimitTopology, "took " + fmt_seconds(secs));
  return "clause complex " + primal.to_string() + ", dual " + dual.to_string() + ", " + fmt_seconds(secs);
}

std::string upset_sections() {
  const auto f = cnf::parse_dimacs(read_file(kRoot + "/tests/fixtures/wxyz.cnf"));
  const auto sh = sheaf::build_sheaf(f);
  const auto& k = sh.complex();
  const auto uy = topology::up_set(k, k.parse_simplex("y"));
  const auto ss = sheaf::sections(sh, uy);

  // Fixture rows: values of w,x,y,z and the number of global extensions.
  std::set<std::pair<std::string, std::size_t>> expected;
  std::istringstream rows(read_file(kRoot + "/tests/fixtures/upset_y_sections.txt"));
  for (std::string line; std::getline(rows, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string bits;
    std::size_t ext = 0;
    fields >> bits >> ext;
    expected.insert({bits, ext});
  }

  std::set<std::pair<std::string, std::size_t>> got;
  const auto whole = topology::whole_space(k);
  for (const auto& s : ss) {
    std::string bits(4, '?');
    for (std::size_t i = 0; i < s.open().size(); ++i) {
      const auto& d = s.data()[i];
      for (std::size_t j = 0; j < d.vars.size(); ++j) bits[d.vars[j]] = d.values[j] ? 'T' : 'F';
    }
    got.insert({bits, sheaf::extend(sh, s, whole).size()});
  }
  expect(ss.size() == 7, std::to_string(ss.size()) + " sections");
  expect(expected.size() == 7, "fixture lists " + std::to_string(expected.size()) + " sections");
  expect(got == expected, "sections differ from the brute-force fixture");
  std::size_t none = 0, one = 0;
  for (const auto& [bits, ext] : got) {
    none += ext == 0;
    one += ext == 1;
  }
  expect(none >= 1 && one >= 1, "extension counts");
  return "7 sections; " + std::to_string(none) + " without a global extension, " + std::to_string(one) +
         " with exactly one";
}

std::string oracle_fuzz() {
  Timer t;
  std::mt19937_64 rng(20240501);
  for (int trial = 0; trial < 500; ++trial) {
    const auto raw = dense_formula(rng, 8, 12);
    const auto f = brute::to_cnf(raw);
    const auto models = cnf::enumerate_models(f);
    const auto globals = sheaf::global_sections(sheaf::build_sheaf(f));
    expect(rendered(globals) == rendered(models), "trial " + std::to_string(trial) + ": sections != models");
    expect(cnf::count_models(f) == models.size(), "trial " + std::to_string(trial) + ": count");
    expect(brute::values_of(models) == brute::models(raw), "trial " + std::to_string(trial) + ": brute force");
    const auto bp = topology::betti(topology::clause_complex(f));
    const auto bd = topology::betti(topology::dowker_dual(f));
    for (std::size_t d = 0; d < std::max(bp.b.size(), bd.b.size()); ++d)
      expect(bp[d] == bd[d], "trial " + std::to_string(trial) + ": Betti numbers differ in dimension " +
                                 std::to_string(d));
  }
  const double secs = t.seconds();
  expect(secs < kLimitFuzz, "took " + fmt_seconds(secs));
  return "500 formulas, 0 failures, " + fmt_seconds(secs);
}

std::string logical_fixture() {
  const auto n = claims::load_corpus(kRoot + "/data/corpora/triangle.json");
  auto all = n.background_cnf();
  for (const auto& c : n.claims()) all = cnf::conjoin(all, n.encoding_cnf(c.id));
  expect(!cnf::satisfiable(all), "conjunction is satisfiable");

  std::vector<consistency::EncodedClaim> encoded;
  for (const auto& c : n.claims()) encoded.push_back({c.id, n.encoding_cnf(c.id), c.weight});
  const auto res = consistency::maximal_consistent_subset(encoded, n.background_cnf());

  // Exhaustive over the 8 atom assignments and 8 selector choices, written out
  // independently: flat=1, sky_blue=2, sky_red=3.
  const std::vector<brute::RawClause> claim_clauses = {{1}, {2}, {-1, 3}};
  const brute::RawClause background = {-2, -3};
  int best = -1;
  for (const auto& a : brute::all_assignments(3)) {
    if (!brute::clause_true(background, a)) continue;
    for (int sel = 0; sel < 8; ++sel) {
      bool ok = true;
      for (int c = 0; c < 3; ++c)
        if (sel & (1 << c)) ok = ok && brute::clause_true(claim_clauses[c], a);
      if (ok) best = std::max(best, __builtin_popcount(sel));
    }
  }
  expect(best == 2, "exhaustive search found " + std::to_string(best));
  expect(res.kept.size() == 2 && res.achieved_weight == Rational(2),
         "kept " + std::to_string(res.kept.size()) + " claims");
  return "UNSAT; kept {" + res.kept[0] + ", " + res.kept[1] + "}, dropped {" + res.dropped[0] +
         "}; exhaustive optimum 2";
}

std::string relative_inconsistency() {
  std::mt19937_64 rng(7);
  std::size_t zeros = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // p over x1..xa, q over x(s+1)..x(s+b), merged vocabulary x1..x(max)
    const int a = std::uniform_int_distribution<int>(1, 7)(rng);
    const int s = std::uniform_int_distribution<int>(0, a)(rng);
    const int b = std::uniform_int_distribution<int>(1, 10 - s)(rng);
    auto rp = brute::random_formula(rng, a, 6);
    rp.nvars = a;
    auto rq = brute::random_formula(rng, b, 6);
    rq.nvars = b;

    auto names = [](int from, int count) {
      std::vector<std::string> v;
      for (int i = 1; i <= count; ++i) v.push_back("x" + std::to_string(from + i));
      return v;
    };
    const cnf::CnfFormula p(cnf::Vocabulary(names(0, a)), brute::to_cnf(rp).clauses());
    const cnf::CnfFormula q(cnf::Vocabulary(names(s, b)), brute::to_cnf(rq).clauses());

    brute::RawFormula merged{std::max(a, s + b), rp.clauses};
    for (auto c : rq.clauses) {
      for (int& lit : c) lit += lit > 0 ? s : -s;
      merged.clauses.push_back(c);
    }
    const auto count = static_cast<std::int64_t>(brute::models(merged).size());
    const Rational expected(count, std::int64_t{1} << merged.nvars);
    const auto got = cnf::relative_consistency(p, q);
    expect(got == expected, "trial " + std::to_string(trial) + ": " + to_string(got) + " vs " + to_string(expected));
    expect((got == Rational(0)) == !cnf::satisfiable(cnf::conjoin(p, q)), "zero iff unsatisfiable");
    zeros += got == Rational(0);
  }
  return "200 pairs exact, " + std::to_string(zeros) + " unsatisfiable conjunctions at 0";
}

std::string rating_protocol() {
  const std::string prompt = read_file(kRoot + "/data/prompts/initialization_prompt.txt");
  expect(prompt.size() == kPromptBytes && sha256_hex(prompt) == kPromptSha256, "prompt file digest changed");
  expect(std::string(oracle::initialization_prompt()) == prompt, "embedded prompt differs from the resource");
  const oracle::ClaimText flat{"a", "The earth is flat"}, red{"b", "The sky is red"};
  expect(oracle::build_prompt(flat, red).front().content == prompt, "system message differs");

  const std::string dir = kRoot + "/tests/fixtures/quoted_replies/";
  const auto zero = read_file(dir + "rating_0.txt");
  auto zero_newlines = zero;
  for (std::size_t i; (i = zero_newlines.find("\\n")) != std::string::npos;) zero_newlines.replace(i, 2, "\n");
  expect(oracle::extract_rating(zero) == 0, "reply rated 0 (escaped newlines)");
  expect(oracle::extract_rating(zero_newlines) == 0, "reply rated 0 (real newlines)");
  expect(oracle::extract_rating(read_file(dir + "rating_5.txt")) == 5, "reply rated 5");
  expect(oracle::extract_rating(read_file(dir + "rating_10.txt")) == 10, "reply rated 10");

  oracle::FixtureTransport mock(kRoot + "/data/mock_replies");
  oracle::OracleConfig cfg;
  cfg.n_repeats = 100;
  const auto d = oracle::rate_pair(cfg, mock, flat, red);
  expect(d.n_success + d.n_fail == 100, "n_success + n_fail = " + std::to_string(d.n_total()));
  const auto again = oracle::rate_pair(cfg, mock, flat, red);
  expect(again == d, "mock run not deterministic");
  return "prompt golden (sha256 " + std::string(kPromptSha256).substr(0, 12) + "), quoted replies -> 0/5/10, N=100 -> " +
         std::to_string(d.n_success) + " + " + std::to_string(d.n_fail);
}

std::string distribution_properties() {
  auto hist = [](std::initializer_list<std::pair<int, std::size_t>> bins) {
    std::array<std::size_t, 11> c{};
    for (auto [b, n] : bins) c[b] = n;
    return oracle::RatingDistribution::from_counts(c, 0);
  };
  expect(!oracle::detect_bimodality(hist({{10, 100}})), "all-10 flagged bimodal");
  expect(oracle::detect_bimodality(hist({{0, 50}, {10, 50}})), "50/50 at 0 and 10 not flagged");
  expect(!oracle::detect_bimodality(hist({{10, 80}, {9, 20}})), "80/20 at 10/9 flagged bimodal");

  std::mt19937_64 rng(8);
  std::vector<std::optional<int>> samples;
  for (int i = 0; i < 100; ++i) {
    const int x = std::uniform_int_distribution<int>(-1, 10)(rng);
    samples.push_back(x < 0 ? std::nullopt : std::optional<int>(x));
  }
  const auto base = oracle::RatingDistribution::from_ratings(samples);
  for (int k = 0; k < 100; ++k) {
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto d = oracle::RatingDistribution::from_ratings(samples);
    expect(d == base && d.exact_mean() == base.exact_mean() && d.stddev() == base.stddev() &&
               d.bimodal() == base.bimodal(),
           "shuffle " + std::to_string(k) + " changed the statistics");
  }
  return "detector extremes exact, 100 shuffles invariant (live histograms: manual procedure in README)";
}

std::string consistency_machinery() {
  Timer t;
  using consistency::DiscrepancyGraph;
  auto tri = [](Rational ab, Rational bc, Rational ca) {
    DiscrepancyGraph g;
    g.add_edge("A", "B", ab);
    g.add_edge("B", "C", bc);
    g.add_edge("C", "A", ca);
    return g;
  };
  // ratings {10, 9, 2}
  expect(consistency::consistency_radius(tri(Rational(0), Rational(1, 10), Rational(4, 5))) == Rational(4, 5),
         "radius of {10,9,2}");
  expect(consistency::consistency_radius(tri(Rational(0), Rational(0), Rational(0))) == Rational(0),
         "radius of all-10");

  const auto f = consistency::consistency_filtration(tri(Rational(1, 10), Rational(1, 5), Rational(4, 5)));
  expect(f.events.size() == 2 && f.events[0].threshold == Rational(1, 10) &&
             f.events[0].merged == std::vector<std::string>{"A", "B"} && f.events[1].threshold == Rational(1, 5) &&
             f.events[1].merged == std::vector<std::string>{"A", "B", "C"},
         "filtration merges");

  const auto n = claims::load_corpus(kRoot + "/data/corpora/triangle.json");
  const auto r = claims::analyze(n);
  expect(r.radius == Rational(1, 2), "triangle radius");
  expect(n.claim(r.worst_pair->first).text == "Flat planets have red skies" &&
             n.claim(r.worst_pair->second).text == "The earth is flat",
         "worst pair");
  expect(r.cycles.size() == 1 && r.cycles[0].score.value() == Rational(1, 2), "triangle cycle score");
  const auto untested = consistency::cycle_report(tri(Rational(0), Rational(0), Rational(0)), Rational(1));
  expect(untested.size() == 1 && untested[0].score.value() == Rational(1) && untested[0].jointly_untested,
         "all-10 cycle");

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    DiscrepancyGraph g;
    const int nodes = std::uniform_int_distribution<int>(1, 10)(rng);
    for (int i = 0; i < nodes; ++i) g.add_node("n" + std::to_string(i));
    for (int i = 0; i < nodes; ++i)
      for (int j = i + 1; j < nodes; ++j)
        if (std::bernoulli_distribution(0.35)(rng))
          g.add_edge("n" + std::to_string(i), "n" + std::to_string(j),
                     Rational(std::uniform_int_distribution<int>(0, 10)(rng), 10));
    const auto ff = consistency::consistency_filtration(g);
    for (std::size_t k = 1; k < ff.events.size(); ++k)
      expect(ff.events[k - 1].threshold <= ff.events[k].threshold, "graph " + std::to_string(trial));
  }
  const double secs = t.seconds();
  expect(secs < kLimitConsistency, "took " + fmt_seconds(secs));
  return "radius 4/5, 0, 1/2; merges at 1/10 and 1/5; cycle scores 1/2 and 1; 200 graphs monotone, " +
         fmt_seconds(secs);
}

}  // namespace

int main() {
  criterion(1, "worked formula models and global sections", ground_truth);
  criterion(2, "Betti numbers of the clause complex and its dual", topology_betti);
  criterion(3, "sections over the up-set of y", upset_sections);
  criterion(4, "sections/models/duality fuzz", oracle_fuzz);
  criterion(5, "triangle encoding and group MAX-SAT", logical_fixture);
  criterion(6, "relative consistency against model counting", relative_inconsistency);
  criterion(7, "rating protocol against the mock endpoint", rating_protocol);
  criterion(8, "rating distribution properties", distribution_properties);
  criterion(9, "consistency radius, filtration and cycles", consistency_machinery);
  return failures == 0 ? 0 : 1;
}
