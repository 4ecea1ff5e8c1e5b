#include <doctest.h>

#include <random>
#include <set>

#include "convert.hpp"
#include "sheafcheck/error.hpp"
#include "sheafcheck/sheaf.hpp"

using namespace sheafcheck;
using namespace sheafcheck::sheaf;
using topology::up_set;
using topology::whole_space;

namespace {

using Canon = std::set<std::map<brute::Face, std::map<int, bool>>>;

// Sections as {face (1-based vars) -> {var -> value}} for comparison with the
// brute-force reference.
Canon canonical(const ClauseSheaf& sh, const std::vector<LocalSection>& ss) {
  Canon out;
  for (const auto& s : ss) {
    std::map<brute::Face, std::map<int, bool>> m;
    for (std::size_t k = 0; k < s.open().size(); ++k) {
      const auto& face = sh.complex().face(s.open().cells()[k]);
      brute::Face f;
      for (auto v : face) f.push_back(static_cast<int>(v) + 1);
      std::map<int, bool> vals;
      const auto& d = s.data()[k];
      for (std::size_t i = 0; i < d.vars.size(); ++i) vals[static_cast<int>(d.vars[i]) + 1] = d.values[i];
      m[f] = vals;
    }
    out.insert(m);
  }
  return out;
}

Canon canonical(const std::vector<brute::Face>& cells, const std::vector<std::vector<std::map<int, bool>>>& ss) {
  Canon out;
  for (const auto& s : ss) {
    std::map<brute::Face, std::map<int, bool>> m;
    for (std::size_t k = 0; k < cells.size(); ++k) m[cells[k]] = s[k];
    out.insert(m);
  }
  return out;
}

std::vector<brute::Face> raw_cells(const ClauseSheaf& sh, const topology::OpenSet& u) {
  std::vector<brute::Face> out;
  for (auto i : u.cells()) {
    brute::Face f;
    for (auto v : sh.complex().face(i)) f.push_back(static_cast<int>(v) + 1);
    out.push_back(f);
  }
  return out;
}

PartialAssignment pa(std::vector<cnf::VarIndex> vars, std::vector<bool> values) { return {vars, values}; }

topology::OpenSet random_open(const ClauseSheaf& sh, std::mt19937_64& rng, int pieces) {
  const auto& k = sh.complex();
  std::uniform_int_distribution<std::size_t> pick(0, k.face_count() - 1);
  topology::OpenSet u;
  for (int i = 0; i < pieces; ++i) u = u.unite(up_set(k, k.face(pick(rng))));
  return u;
}

}  // namespace

TEST_CASE("stalks of the worked example") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  CHECK(stalk(sh, k.parse_simplex("y")).members.size() == 2);
  const auto xy = stalk(sh, k.parse_simplex("x,y"));
  REQUIRE(xy.members.size() == 3);
  for (const auto& m : xy.members) CHECK(m.to_string() != "FT");
  const auto wx = stalk(sh, k.parse_simplex("w,x"));
  REQUIRE(wx.members.size() == 3);
  for (const auto& m : wx.members) CHECK(m.to_string() != "FT");
  CHECK(stalk(sh, k.parse_simplex("x,y,z")).members.size() == 5);
}

TEST_CASE("constraint map") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  CHECK(sh.constraints(k.parse_simplex("x,y")) == std::vector<std::size_t>{2});
  CHECK(sh.constraints(k.parse_simplex("x,y,z")) == std::vector<std::size_t>{2, 3});
  CHECK(sh.constraints(k.parse_simplex("y")).empty());
  CHECK_THROWS_AS(build_sheaf(cnf::CnfFormula(cnf::Vocabulary({"x"}), {})), InputError);
}

TEST_CASE("restriction") {
  // variables x=1, y=2, z=3
  CHECK(restrict(pa({1, 2, 3}, {true, false, false}), {1, 2}) == pa({1, 2}, {true, false}));
  CHECK(restrict(pa({1, 2}, {true, false}), {1, 2}) == pa({1, 2}, {true, false}));
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto top = pa({1, 2, 3}, {true, true, true});
  CHECK(sh.admits(*sh.complex().face_index({1, 2, 3}), top));
  const auto y = restrict(top, {2});
  CHECK(y == pa({2}, {true}));
  CHECK(sh.admits(*sh.complex().face_index({2}), y));
  CHECK_THROWS_AS(restrict(pa({1, 2}, {true, false}), {0}), InputError);
}

TEST_CASE("sections over the up-set of y") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  const auto uy = up_set(k, k.parse_simplex("y"));
  const auto ss = sections(sh, uy);
  CHECK(ss.size() == 7);
  CHECK(canonical(sh, ss) == canonical(raw_cells(sh, uy), brute::sections(brute::wxyz(), raw_cells(sh, uy))));
  for (const auto& s : ss) CHECK(is_section(sh, s));

  // The section through (w,x,y,z) = (F,T,T,T) has no global extension; the one
  // through (T,F,F,F) has exactly one.
  auto find = [&](const std::string& wy, const std::string& xyz) {
    for (const auto& s : ss)
      if (s.at(*k.face_index(k.parse_simplex("w,y"))).to_string() == wy &&
          s.at(*k.face_index(k.parse_simplex("x,y,z"))).to_string() == xyz)
        return s;
    FAIL("section not found");
    return ss.front();
  };
  const auto whole = whole_space(k);
  CHECK(extend(sh, find("FT", "TTT"), whole).empty());
  const auto ext = extend(sh, find("TF", "FFF"), whole);
  REQUIRE(ext.size() == 1);
  CHECK(ext[0].restrict_to(uy) == find("TF", "FFF"));
}

TEST_CASE("degenerate open sets") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  const auto empty = sections(sh, topology::OpenSet{});
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].data().empty());

  const auto top = k.parse_simplex("x,y,z");
  CHECK(sections(sh, up_set(k, top)).size() == stalk(sh, top).members.size());

  const auto globals = sections(sh, whole_space(k));
  REQUIRE(globals.size() == 5);
  for (const auto& g : globals) {
    const auto again = extend(sh, g, whole_space(k));
    REQUIRE(again.size() == 1);
    CHECK(again[0] == g);
  }
}

TEST_CASE("global sections") {
  std::vector<std::string> got;
  for (const auto& a : global_sections(build_sheaf(brute::wxyz_cnf()))) got.push_back(a.to_string());
  CHECK(got == std::vector<std::string>{"(T,F,F,F)", "(T,T,F,F)", "(T,T,F,T)", "(T,T,T,F)", "(T,T,T,T)"});

  CHECK(global_sections(build_sheaf(brute::to_cnf({1, {{1}, {-1}}}))).empty());
  const auto unit = global_sections(build_sheaf(brute::to_cnf({1, {{1}}})));
  REQUIRE(unit.size() == 1);
  CHECK(unit[0].to_string() == "(T)");
  // A variable that occurs in no clause is free.
  CHECK(global_sections(build_sheaf(brute::to_cnf({2, {{1}}}))).size() == 2);
}

TEST_CASE("dump is stable") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  const auto ss = sections(sh, up_set(k, k.parse_simplex("w,y")));
  REQUIRE(ss.size() == 3);
  CHECK(ss[0].dump(k).starts_with("{w,y}="));
}

TEST_CASE("invalid sections are rejected") {
  const auto sh = build_sheaf(brute::wxyz_cnf());
  const auto& k = sh.complex();
  const auto u = up_set(k, k.parse_simplex("w,x"));
  CHECK(is_section(sh, LocalSection(u, {pa({0, 1}, {true, true})})));
  CHECK_FALSE(is_section(sh, LocalSection(u, {pa({0, 1}, {false, true})})));
  CHECK_THROWS_AS(LocalSection(u, {}), InputError);
}

// Properties over random formulas.

TEST_CASE("sections agree with the brute-force reference") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 150; ++trial) {
    const auto raw = brute::random_formula(rng, 6, 6, 3);
    const auto sh = build_sheaf(brute::to_cnf(raw));
    const auto u = random_open(sh, rng, 2);
    const auto cells = raw_cells(sh, u);
    REQUIRE(canonical(sh, sections(sh, u)) == canonical(cells, brute::sections(raw, cells)));
  }
}

TEST_CASE("stalks are closed under projection and restriction is functorial") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 150; ++trial) {
    const auto sh = build_sheaf(brute::to_cnf(brute::random_formula(rng, 8, 10, 4)));
    const auto& k = sh.complex();
    for (std::size_t t = 0; t < k.face_count(); ++t) {
      const auto& tau = k.face(t);
      for (const auto& m : stalk(sh, tau).members)
        for (auto s : k.facets(t)) {
          const auto& sigma = k.face(s);
          const auto down = restrict(m, sigma);
          REQUIRE(sh.admits(s, down));
          for (auto r : k.facets(s)) REQUIRE(restrict(down, k.face(r)) == restrict(m, k.face(r)));
        }
    }
  }
}

TEST_CASE("gluing over a union of two open sets") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sh = build_sheaf(brute::to_cnf(brute::random_formula(rng, 6, 7, 3)));
    const auto u1 = random_open(sh, rng, 2);
    const auto u2 = random_open(sh, rng, 2);
    const auto u = u1.unite(u2);
    const auto both = u1.intersect(u2);

    // Restricting a section over U gives compatible sections over U1 and U2.
    std::set<std::pair<std::string, std::string>> from_union;
    for (const auto& s : sections(sh, u)) {
      const auto a = s.restrict_to(u1);
      const auto b = s.restrict_to(u2);
      REQUIRE(is_section(sh, a));
      REQUIRE(is_section(sh, b));
      from_union.insert({a.dump(sh.complex()), b.dump(sh.complex())});
    }
    REQUIRE(from_union.size() == sections(sh, u).size());

    // Every agreeing pair glues to exactly one section over U.
    std::set<std::pair<std::string, std::string>> agreeing;
    for (const auto& a : sections(sh, u1))
      for (const auto& b : sections(sh, u2))
        if (a.restrict_to(both) == b.restrict_to(both)) agreeing.insert({a.dump(sh.complex()), b.dump(sh.complex())});
    REQUIRE(agreeing == from_union);
  }
}

TEST_CASE("global sections equal the models") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const auto raw = brute::random_formula(rng, 8, 12);
    const auto f = brute::to_cnf(raw);
    REQUIRE(brute::values_of(global_sections(build_sheaf(f))) == brute::models(raw));
  }
}
