// sheafcheck: command-line front end.
//
// Exit codes: 0 success, 2 input error, 3 environment error (e.g. missing
// API key), 4 transport failure while rating.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sheafcheck/claims.hpp"
#include "sheafcheck/cnf.hpp"
#include "sheafcheck/error.hpp"
#include "sheafcheck/oracle.hpp"
#include "sheafcheck/sheaf.hpp"
#include "sheafcheck/topology.hpp"

#ifndef SHEAFCHECK_DATA_DIR
#define SHEAFCHECK_DATA_DIR "data"
#endif

namespace sc = sheafcheck;
using nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitEnvironment = 3;
constexpr int kExitTransport = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sc::InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw sc::InputError("cannot write '" + out_path + "'");
  out << text;
}

std::vector<sc::Rational> parse_grid(const std::string& text) {
  std::vector<sc::Rational> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) grid.push_back(sc::parse_rational(item));
  if (grid.empty()) throw sc::InputError("empty epsilon grid");
  return grid;
}

struct OracleFlags {
  bool live = false;
  std::string endpoint = sc::oracle::OracleConfig{}.endpoint;
  std::string model = sc::oracle::OracleConfig{}.model;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::optional<double> temperature;
  std::string fixtures = std::string(SHEAFCHECK_DATA_DIR) + "/mock_replies";
  std::size_t parallel = 4;

  void attach(CLI::App* app) {
    app->add_flag("--live", live, "Query a real chat-completions endpoint (needs SHEAFCHECK_API_KEY)");
    app->add_option("--endpoint", endpoint, "Base URL of the chat-completions API")->capture_default_str();
    app->add_option("--model", model, "Model name")->capture_default_str();
    app->add_option("--n", n, "Repeated queries per pair")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Seed for mock sampling and reprompts")->capture_default_str();
    app->add_option("--temperature", temperature, "Sampling temperature (provider default if unset)");
    app->add_option("--fixtures", fixtures, "Mock reply directory used without --live")->capture_default_str();
    app->add_option("--parallel", parallel, "Requests in flight")->capture_default_str()->check(CLI::PositiveNumber);
  }

  sc::oracle::OracleConfig config() const {
    sc::oracle::OracleConfig c;
    c.endpoint = endpoint;
    c.model = model;
    c.n_repeats = n;
    c.seed = seed;
    c.temperature = temperature;
    c.max_in_flight = parallel;
    return c;
  }

  std::unique_ptr<sc::oracle::ChatTransport> transport() const {
    if (live) return sc::oracle::HttpChatTransport::from_environment(config());
    return std::make_unique<sc::oracle::FixtureTransport>(fixtures);
  }
};

int cmd_sat(const std::string& path, bool count_only, const std::string& format) {
  const auto f = sc::cnf::parse_dimacs(read_file(path));
  if (count_only) {
    const auto n = sc::cnf::count_models(f);
    if (format == "json")
      std::cout << ordered_json{{"variables", f.vocabulary().names()}, {"count", n}}.dump() << "\n";
    else
      std::cout << n << "\n";
    return 0;
  }
  const auto models = sc::cnf::enumerate_models(f);
  if (format == "json") {
    ordered_json doc = {{"variables", f.vocabulary().names()}, {"count", models.size()}, {"models", ordered_json::array()}};
    for (const auto& m : models) doc["models"].push_back(m.to_string());
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& m : models) std::cout << m.to_string() << "\n";
  }
  return 0;
}

int cmd_sheaf(const std::string& path, bool betti, bool dual, const std::string& sections_of, bool global,
              bool faces) {
  const auto f = sc::cnf::parse_dimacs(read_file(path));
  if (betti) {
    const auto complex = dual ? sc::topology::dowker_dual(f) : sc::topology::clause_complex(f);
    std::cout << sc::topology::betti(complex).to_string() << "\n";
  }
  if (faces) {
    const auto complex = dual ? sc::topology::dowker_dual(f) : sc::topology::clause_complex(f);
    std::cout << complex.listing();
  }
  if (!sections_of.empty() || global) {
    const auto sheaf = sc::sheaf::build_sheaf(f);
    if (!sections_of.empty()) {
      const auto sigma = sheaf.complex().parse_simplex(sections_of);
      const auto open = sc::topology::up_set(sheaf.complex(), sigma);
      for (const auto& s : sc::sheaf::sections(sheaf, open)) std::cout << s.dump(sheaf.complex()) << "\n";
    }
    if (global)
      for (const auto& a : sc::sheaf::global_sections(sheaf)) std::cout << a.to_string() << "\n";
  }
  return 0;
}

int cmd_maxsat(const std::string& path, const std::string& format) {
  const auto w = sc::cnf::parse_wdimacs(read_file(path));
  const auto r = sc::cnf::max_sat(w);
  if (format == "json") {
    ordered_json doc = {{"variables", w.base.vocabulary().names()},
                        {"assignment", r.assignment.to_string()},
                        {"achieved_weight", sc::to_string(r.achieved_weight)},
                        {"total_soft_weight", sc::to_string(w.total_soft_weight())},
                        {"satisfied_clauses", r.satisfied_clauses}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "weight " << sc::to_string(r.achieved_weight) << " of " << sc::to_string(w.total_soft_weight())
              << "\n"
              << r.assignment.to_string() << "\n";
  }
  return 0;
}

int cmd_rate(const std::string& a, const std::string& b, const OracleFlags& flags, bool triage,
             const std::string& format) {
  const sc::oracle::ClaimText ca{"a", a}, cb{"b", b};
  auto transport = flags.transport();
  const auto cfg = flags.config();
  sc::oracle::RatingDistribution d;
  std::string model = cfg.model;
  std::vector<sc::oracle::TriageRecord> log;
  if (triage) {
    auto t = sc::oracle::rate_with_triage(cfg, *transport, {}, ca, cb);
    d = t.distribution;
    log = t.log;
    model = log.back().model;
  } else {
    d = sc::oracle::rate_pair(cfg, *transport, ca, cb);
  }
  if (format == "markdown") {
    std::cout << "| rating | count |\n|---|---|\n";
    for (std::size_t r = 0; r < d.counts.size(); ++r) std::cout << "| " << r << " | " << d.counts[r] << " |\n";
    std::cout << "\nsuccess " << d.n_success << ", failed " << d.n_fail << "\n";
    for (const auto& rec : log)
      std::cout << "round " << rec.round << " (" << rec.model << "): " << sc::oracle::to_string(rec.decision) << ", "
                << rec.reason << "\n";
  } else {
    std::cout << sc::claims::distribution_json(ca, cb, model, d);
  }
  return 0;
}

int cmd_analyze(const std::string& path, const OracleFlags& flags, bool rerate, bool acquire,
                const std::string& eps, const std::string& cycle_eps, const std::string& format,
                const std::string& out, const std::string& save) {
  auto network = sc::claims::load_corpus(path);
  sc::claims::AnalysisOptions opts;
  if (flags.live || acquire || rerate) {
    auto transport = flags.transport();
    sc::claims::acquire_ratings(network, flags.config(), *transport, rerate);
    opts.provenance = {flags.live ? "live" : "mock", flags.config()};
    if (!rerate) opts.provenance.source += "+recorded";
  }
  if (!save.empty()) write_output(sc::claims::dump_corpus(network), save);
  if (!eps.empty()) opts.epsilon_grid = parse_grid(eps);
  if (!cycle_eps.empty()) opts.cycle_epsilon = sc::parse_rational(cycle_eps);
  const auto report = sc::claims::analyze(network, opts);
  write_output(format == "markdown" ? sc::claims::report_markdown(report) : sc::claims::report_json(report), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical and statistical consistency checks for CNF formulas and claim networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sheafcheck 0.1.0");

  std::string path, format = "text", report_format = "json";
  auto* sat = app.add_subcommand("sat", "Enumerate or count the models of a DIMACS formula");
  bool count_only = false;
  bool enumerate = false;
  sat->add_option("file", path, "DIMACS CNF file")->required();
  auto* count_flag = sat->add_flag("--count", count_only, "Print the model count only");
  sat->add_flag("--enumerate", enumerate, "List every model (default)")->excludes(count_flag);
  sat->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* sheaf = app.add_subcommand("sheaf", "Clause complex, its sheaf and sections");
  bool betti = false, dual = false, global = false, faces = false;
  std::string sections_of;
  sheaf->add_option("file", path, "DIMACS CNF file")->required();
  sheaf->add_flag("--betti", betti, "Betti numbers of the clause complex");
  sheaf->add_flag("--dual", dual, "Use the Dowker dual (vertices are clauses) for --betti and --faces");
  sheaf->add_flag("--faces", faces, "List the maximal simplices");
  sheaf->add_option("--sections", sections_of, "Sections over the up-set of a simplex, e.g. y or w,y");
  sheaf->add_flag("--global", global, "Global sections as total assignments");

  auto* maxsat = app.add_subcommand("maxsat", "Exact weighted MAX-SAT of a WDIMACS file");
  maxsat->add_option("file", path, "WDIMACS file")->required();
  maxsat->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* rate = app.add_subcommand("rate", "Rating distribution for one claim pair");
  std::string claim_a, claim_b;
  bool triage = false;
  OracleFlags rate_flags;
  rate->add_option("claim_a", claim_a, "First claim")->required();
  rate->add_option("claim_b", claim_b, "Second claim")->required();
  rate->add_flag("--triage", triage, "Reprompt and escalate unstable distributions");
  rate->add_option("--format", report_format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
  rate_flags.attach(rate);

  auto* analyze = app.add_subcommand("analyze", "Consistency report for a claim corpus");
  OracleFlags analyze_flags;
  bool rerate = false, acquire = false;
  std::string eps, cycle_eps, out, save;
  analyze->add_option("corpus", path, "Corpus JSON")->required();
  analyze->add_flag("--rate-missing", acquire, "Rate unrated pairs (mock fixtures unless --live)");
  analyze->add_flag("--rerate", rerate, "Rate every designated pair again, replacing recorded ratings");
  analyze->add_option("--eps", eps, "Comma-separated epsilon grid (default 0,0.1,...,1)");
  analyze->add_option("--cycle-eps", cycle_eps, "Threshold for the cycle report (default: largest grid value)");
  analyze->add_option("--format", report_format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
  analyze->add_option("--out", out, "Write the report here instead of stdout");
  analyze->add_option("--save-corpus", save, "Write the corpus with all ratings used");
  analyze_flags.attach(analyze);

  app.add_subcommand("prompt", "Print the system prompt sent with every rating query");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*sat) return cmd_sat(path, count_only, format);
    if (*sheaf) {
      if (!betti && !faces && sections_of.empty() && !global)
        throw sc::InputError("sheaf: choose --betti, --faces, --sections or --global");
      return cmd_sheaf(path, betti, dual, sections_of, global, faces);
    }
    if (*maxsat) return cmd_maxsat(path, format);
    if (*rate) return cmd_rate(claim_a, claim_b, rate_flags, triage, report_format);
    if (*analyze) return cmd_analyze(path, analyze_flags, rerate, acquire, eps, cycle_eps, report_format, out, save);
    std::cout << sc::oracle::initialization_prompt();
    return 0;
  } catch (const sc::EnvironmentError& e) {
    std::cerr << "sheafcheck: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const sc::oracle::TransportError& e) {
    std::cerr << "sheafcheck: " << e.what() << " (" << e.partial().n_total() << " calls completed)\n";
    return kExitTransport;
  } catch (const sc::InputError& e) {
    std::cerr << "sheafcheck: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "sheafcheck: internal error: " << e.what() << "\n";
    return 1;
  }
}
