#include <cctype>
#include <charconv>
#include <sstream>

#include "sheafcheck/cnf.hpp"
#include "sheafcheck/error.hpp"

namespace sheafcheck::cnf {

namespace {

struct Header {
  std::size_t vars = 0;
  std::size_t clauses = 0;
  std::optional<std::int64_t> top;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_int(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  return v;
}

// Variables are named "1".."n" unless a comment line `c var <k> <name>`
// gives variable k a name.
Vocabulary named_vocabulary(std::string_view text, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back(std::to_string(i));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto toks = split_ws(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (toks.size() < 2 || toks[0] != "c" || toks[1] != "var") continue;
    if (toks.size() != 4) throw ParseError("expected 'c var <index> <name>'", line_no);
    const auto k = parse_int(toks[2], line_no);
    if (k < 1 || static_cast<std::size_t>(k) > n)
      throw ParseError("variable name for index " + std::string(toks[2]) + " outside 1.." + std::to_string(n), line_no);
    names[static_cast<std::size_t>(k - 1)] = std::string(toks[3]);
  }
  Vocabulary v;
  for (const auto& name : names) {
    if (v.find(name)) throw ParseError("variable name '" + name + "' is used twice", 0);
    v.add(name);
  }
  return v;
}

bool default_names(const Vocabulary& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v.name(static_cast<VarIndex>(i)) != std::to_string(i + 1)) return false;
  return true;
}

void emit_names(std::ostream& out, const Vocabulary& v) {
  if (default_names(v)) return;
  for (std::size_t i = 0; i < v.size(); ++i) out << "c var " << i + 1 << ' ' << v.name(static_cast<VarIndex>(i)) << '\n';
}

// Shared tokenizer for cnf and wcnf bodies. `on_clause` receives the literal
// list, the optional leading weight and the line the clause started on.
template <typename OnClause>
Header parse_body(std::string_view text, std::string_view kind, OnClause&& on_clause) {
  std::optional<Header> header;
  std::vector<Literal> pending;
  std::optional<std::int64_t> weight;
  std::size_t clause_line = 0;
  std::size_t seen = 0;
  const bool weighted = kind == "wcnf";

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "c" || toks[0][0] == 'c') continue;
    if (toks[0] == "%") break;
    if (toks[0] == "p") {
      if (header) throw ParseError("duplicate problem line", line_no);
      const std::size_t want = weighted ? 5 : 4;
      if (toks.size() < want - (weighted ? 1 : 0) || toks.size() > want || toks[1] != kind)
        throw ParseError("malformed problem line; expected 'p " + std::string(kind) + " <nvars> <nclauses>" +
                             (weighted ? " <top>'" : "'"),
                         line_no);
      Header h;
      auto nv = parse_int(toks[2], line_no);
      auto nc = parse_int(toks[3], line_no);
      if (nv < 0 || nc < 0) throw ParseError("negative count in problem line", line_no);
      h.vars = static_cast<std::size_t>(nv);
      h.clauses = static_cast<std::size_t>(nc);
      if (weighted && toks.size() == 5) h.top = parse_int(toks[4], line_no);
      header = h;
      continue;
    }
    if (!header) throw ParseError("clause data before the 'p " + std::string(kind) + "' header", line_no);

    for (auto tok : toks) {
      auto v = parse_int(tok, line_no);
      if (weighted && !weight) {
        if (v < 0) throw ParseError("negative clause weight", line_no);
        weight = v;
        clause_line = line_no;
        continue;
      }
      if (pending.empty() && !weighted) clause_line = line_no;
      if (v == 0) {
        if (pending.empty()) throw ParseError("empty clause", line_no);
        ++seen;
        if (seen > header->clauses)
          throw ParseError("more clauses than the " + std::to_string(header->clauses) + " declared", line_no);
        on_clause(std::move(pending), weight, clause_line);
        pending.clear();
        weight.reset();
        continue;
      }
      const auto mag = static_cast<std::uint64_t>(v < 0 ? -v : v);
      if (mag > header->vars)
        throw ParseError("literal " + std::string(tok) + " out of range for " + std::to_string(header->vars) +
                             " variables",
                         line_no);
      pending.push_back({static_cast<VarIndex>(mag - 1), v < 0});
    }
  }
  if (!header) throw ParseError("missing 'p " + std::string(kind) + "' header", 0);
  if (!pending.empty() || weight) throw ParseError("last clause is not terminated by 0", line_no);
  if (seen != header->clauses)
    throw ParseError("header declares " + std::to_string(header->clauses) + " clauses but " + std::to_string(seen) +
                         " were found",
                     line_no);
  return *header;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  std::vector<Clause> clauses;
  auto header = parse_body(text, "cnf", [&](std::vector<Literal> lits, auto, std::size_t) {
    clauses.emplace_back(std::move(lits));
  });
  return CnfFormula(named_vocabulary(text, header.vars), std::move(clauses));
}

std::string emit_dimacs(const CnfFormula& formula) {
  std::ostringstream out;
  emit_names(out, formula.vocabulary());
  out << "p cnf " << formula.num_vars() << ' ' << formula.num_clauses() << '\n';
  for (const auto& c : formula.clauses()) {
    for (const auto& lit : c.literals()) out << (lit.negated ? "-" : "") << lit.var + 1 << ' ';
    out << "0\n";
  }
  return out.str();
}

WeightedCnf parse_wdimacs(std::string_view text) {
  std::vector<Clause> clauses;
  std::vector<std::int64_t> raw_weights;
  auto header = parse_body(text, "wcnf", [&](std::vector<Literal> lits, std::optional<std::int64_t> w, std::size_t) {
    clauses.emplace_back(std::move(lits));
    raw_weights.push_back(*w);
  });
  std::vector<Rational> weights;
  std::vector<bool> hard;
  for (auto w : raw_weights) {
    const bool is_hard = header.top && w >= *header.top;
    hard.push_back(is_hard);
    weights.emplace_back(is_hard ? 0 : w);
  }
  return WeightedCnf(CnfFormula(named_vocabulary(text, header.vars), std::move(clauses)), std::move(weights),
                     std::move(hard));
}

std::string emit_wdimacs(const WeightedCnf& wcnf) {
  std::int64_t top = 1;
  for (std::size_t i = 0; i < wcnf.weights.size(); ++i) {
    if (wcnf.weights[i].denominator() != 1)
      throw InputError("WDIMACS needs integral weights; clause " + std::to_string(i + 1) + " has weight " +
                       to_string(wcnf.weights[i]));
    if (!wcnf.hard[i]) top += wcnf.weights[i].numerator();
  }
  std::ostringstream out;
  const auto& f = wcnf.base;
  emit_names(out, f.vocabulary());
  out << "p wcnf " << f.num_vars() << ' ' << f.num_clauses() << ' ' << top << '\n';
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    out << (wcnf.hard[i] ? top : wcnf.weights[i].numerator());
    for (const auto& lit : f.clauses()[i].literals()) out << ' ' << (lit.negated ? "-" : "") << lit.var + 1;
    out << " 0\n";
  }
  return out.str();
}

}  // namespace sheafcheck::cnf
