#include <doctest.h>

#include <functional>
#include <memory>
#include <random>
#include <set>

#include "brute_force.hpp"
#include "sheafcheck/error.hpp"
#include "sheafcheck/prop.hpp"

using namespace sheafcheck;
using namespace sheafcheck::cnf;

namespace {

// Independent expression tree for the truth-table oracle. Rendered fully
// parenthesised so that the library parser sees no precedence questions.
struct Expr {
  char op;  // 'a' atom, '!', '&', '|', '>', '='
  int atom = 0;
  std::shared_ptr<Expr> l, r;
};

std::shared_ptr<Expr> random_expr(std::mt19937_64& rng, int atoms, int depth) {
  auto e = std::make_shared<Expr>();
  if (depth == 0 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    e->op = 'a';
    e->atom = std::uniform_int_distribution<int>(0, atoms - 1)(rng);
    return e;
  }
  static const char ops[] = {'!', '&', '|', '>', '='};
  e->op = ops[std::uniform_int_distribution<int>(0, 4)(rng)];
  e->l = random_expr(rng, atoms, depth - 1);
  if (e->op != '!') e->r = random_expr(rng, atoms, depth - 1);
  return e;
}

std::string render(const Expr& e) {
  switch (e.op) {
    case 'a': return "p" + std::to_string(e.atom);
    case '!': return "!(" + render(*e.l) + ")";
    case '&': return "(" + render(*e.l) + " & " + render(*e.r) + ")";
    case '|': return "(" + render(*e.l) + " | " + render(*e.r) + ")";
    case '>': return "(" + render(*e.l) + " -> " + render(*e.r) + ")";
    default: return "(" + render(*e.l) + " <-> " + render(*e.r) + ")";
  }
}

bool eval(const Expr& e, const std::vector<bool>& a) {
  switch (e.op) {
    case 'a': return a[e.atom];
    case '!': return !eval(*e.l, a);
    case '&': return eval(*e.l, a) && eval(*e.r, a);
    case '|': return eval(*e.l, a) || eval(*e.r, a);
    case '>': return !eval(*e.l, a) || eval(*e.r, a);
    default: return eval(*e.l, a) == eval(*e.r, a);
  }
}

Vocabulary atoms(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  return Vocabulary(names);
}

// Number of models of `f` extending the given values of its first variables,
// by DPLL with unit propagation; Tseitin vocabularies outgrow plain enumeration.
std::uint64_t count_extensions(const CnfFormula& f, const std::vector<bool>& prefix) {
  std::vector<int> value(f.num_vars(), -1);
  for (std::size_t i = 0; i < prefix.size(); ++i) value[i] = prefix[i];
  std::function<std::uint64_t(std::vector<int>)> rec = [&](std::vector<int> v) -> std::uint64_t {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : f.clauses()) {
        int unassigned = 0;
        const Literal* last = nullptr;
        bool sat = false;
        for (const auto& lit : c.literals()) {
          if (v[lit.var] < 0) {
            ++unassigned;
            last = &lit;
          } else if ((v[lit.var] == 1) != lit.negated) {
            sat = true;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return 0;
        if (unassigned == 1) {
          v[last->var] = last->negated ? 0 : 1;
          changed = true;
        }
      }
    }
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] < 0) {
        auto t = v, e = v;
        t[i] = 1;
        e[i] = 0;
        return rec(t) + rec(e);
      }
    return 1;
  };
  return rec(value);
}

std::set<std::vector<bool>> projected_models(const CnfFormula& f, int n) {
  std::set<std::vector<bool>> out;
  for (const auto& a : brute::all_assignments(n))
    if (count_extensions(f, a) > 0) out.insert(a);
  return out;
}

std::set<std::vector<bool>> truth_table(const Expr& e, int n) {
  std::set<std::vector<bool>> out;
  for (const auto& a : brute::all_assignments(n))
    if (eval(e, a)) out.insert(a);
  return out;
}

}  // namespace

TEST_CASE("parser precedence and word forms") {
  CHECK(parse_prop("a | b & c").to_string() == parse_prop("a | (b & c)").to_string());
  CHECK(parse_prop("a -> b -> c").to_string() == parse_prop("a -> (b -> c)").to_string());
  CHECK(parse_prop("not a and b").to_string() == parse_prop("!a & b").to_string());
  CHECK(parse_prop("a iff b implies c").to_string() == parse_prop("a <-> (b -> c)").to_string());
  CHECK(parse_prop("~a").kind() == PropFormula::Kind::Not);
  CHECK(parse_prop("flat -> sky_red").atoms() == std::vector<std::string>{"flat", "sky_red"});
  CHECK(parse_prop("((a))").kind() == PropFormula::Kind::Atom);
  CHECK(parse_prop("a & (b | !c)").depth() == 3);
}

TEST_CASE("parser errors") {
  CHECK_THROWS_AS(parse_prop(""), InputError);
  CHECK_THROWS_AS(parse_prop("a &"), InputError);
  CHECK_THROWS_AS(parse_prop("(a | b"), InputError);
  CHECK_THROWS_AS(parse_prop("a b"), InputError);
  CHECK_THROWS_AS(parse_prop("a $ b"), InputError);
}

TEST_CASE("rendering re-parses to the same formula") {
  const auto f = parse_prop("!(a -> b) <-> (c | a & !b)");
  CHECK(parse_prop(f.to_string()).to_string() == f.to_string());
}

TEST_CASE("tseitin examples") {
  SUBCASE("a lone atom needs no auxiliaries") {
    const auto f = tseitin(parse_prop("x"));
    CHECK(f.num_vars() == 1);
    REQUIRE(f.num_clauses() == 1);
    CHECK(f.clauses()[0].literals() == std::vector<Literal>{{0, false}});
  }
  SUBCASE("implication") {
    const auto f = tseitin(parse_prop("x -> y"), Vocabulary({"x", "y"}));
    CHECK(projected_models(f, 2) ==
          std::set<std::vector<bool>>{{false, false}, {false, true}, {true, true}});
    for (std::size_t i = 2; i < f.num_vars(); ++i) CHECK(f.vocabulary().name(i).starts_with(kAuxPrefix));
  }
  SUBCASE("contradiction") { CHECK_FALSE(satisfiable(tseitin(parse_prop("x & !x")))); }
  SUBCASE("atoms may not use the auxiliary prefix") {
    CHECK_THROWS_AS(tseitin(parse_prop("__ts1 | a")), InputError);
  }
}

TEST_CASE("clausify is equivalent over the given vocabulary") {
  const auto f = clausify(parse_prop("a -> b"), Vocabulary({"a", "b", "c"}));
  CHECK(f.num_vars() == 3);
  CHECK(count_models(f) == 6);
  CHECK_THROWS_AS(clausify(parse_prop("a & z"), Vocabulary({"a"})), InputError);
  // Tautologies clausify to no clauses at all.
  CHECK(clausify(parse_prop("a | !a"), Vocabulary({"a"})).num_clauses() == 0);
}

TEST_CASE("tseitin and clausify agree with truth tables on random formulas") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const auto e = random_expr(rng, n, 5);
    const auto f = parse_prop(render(*e));
    REQUIRE(f.depth() <= 5);
    const auto expected = truth_table(*e, n);

    const auto t = tseitin(f, atoms(n));
    REQUIRE(projected_models(t, n) == expected);
    // Each model of f extends to exactly one model of its Tseitin form.
    for (const auto& a : expected) REQUIRE(count_extensions(t, a) == 1);

    const auto c = clausify(f, atoms(n));
    REQUIRE(projected_models(c, n) == expected);

    for (const auto& a : brute::all_assignments(n)) {
      const Assignment as(std::make_shared<const Vocabulary>(atoms(n)), a);
      REQUIRE(f.evaluate(as) == eval(*e, a));
    }
  }
}
