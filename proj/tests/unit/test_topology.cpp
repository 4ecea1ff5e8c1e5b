#include <doctest.h>

#include <random>

#include "convert.hpp"
#include "sheafcheck/error.hpp"
#include "sheafcheck/topology.hpp"

using namespace sheafcheck;
using namespace sheafcheck::topology;

namespace {

std::vector<std::string> render(const SimplicialComplex& k, const std::vector<Simplex>& ss) {
  std::vector<std::string> out;
  for (const auto& s : ss) out.push_back(k.format(s));
  return out;
}

std::vector<std::string> render(const SimplicialComplex& k, const OpenSet& u) {
  std::vector<std::string> out;
  for (auto i : u.cells()) out.push_back(k.format(k.face(i)));
  std::sort(out.begin(), out.end());
  return out;
}

cnf::CnfFormula from_raw(brute::RawFormula f, std::vector<std::string> names) {
  return cnf::CnfFormula(cnf::Vocabulary(names), brute::to_cnf(f).clauses());
}

std::vector<int> as_ints(const BettiNumbers& b) { return {b.b.begin(), b.b.end()}; }

}  // namespace

TEST_CASE("clause complex of the worked example") {
  const auto k = clause_complex(brute::wxyz_cnf());
  CHECK(render(k, k.maximal_simplices()) == std::vector<std::string>{"{w,x}", "{w,y}", "{x,y,z}"});
  CHECK(k.dimension() == 2);
  CHECK(k.count_of_dimension(0) == 4);
  CHECK(k.count_of_dimension(1) == 5);
  CHECK(k.count_of_dimension(2) == 1);
  CHECK(betti(k).to_string() == "b0=1 b1=1 b2=0");
}

TEST_CASE("clause complex small cases") {
  const auto single = clause_complex(from_raw({1, {{1}}}, {"x"}));
  CHECK(single.face_count() == 1);
  CHECK(single.dimension() == 0);

  const auto hollow = clause_complex(from_raw({3, {{1, 2}, {2, 3}, {3, 1}}}, {"x", "y", "z"}));
  CHECK(hollow.maximal_simplices().size() == 3);
  CHECK(hollow.dimension() == 1);
  CHECK(betti(hollow).to_string() == "b0=1 b1=1");

  CHECK_THROWS_AS(clause_complex(cnf::CnfFormula(cnf::Vocabulary({"x"}), {})), InputError);
}

TEST_CASE("dowker dual of the worked example") {
  const auto d = dowker_dual(brute::wxyz_cnf());
  CHECK(render(d, d.maximal_simplices()) == std::vector<std::string>{"{c1,c2}", "{c1,c3,c4}", "{c2,c3,c4}"});
  CHECK(d.count_of_dimension(0) == 4);
  CHECK(d.count_of_dimension(1) == 6);
  CHECK(d.count_of_dimension(2) == 2);
  CHECK(betti(d).to_string() == "b0=1 b1=1 b2=0");
}

TEST_CASE("dowker dual small cases") {
  const auto one = dowker_dual(from_raw({2, {{1, 2}}}, {"x", "y"}));
  CHECK(render(one, one.faces()) == std::vector<std::string>{"{c1}"});
  const auto two = dowker_dual(from_raw({1, {{1}, {1}}}, {"x"}));
  CHECK(render(two, two.maximal_simplices()) == std::vector<std::string>{"{c1,c2}"});
}

TEST_CASE("up sets in the worked example") {
  const auto k = clause_complex(brute::wxyz_cnf());
  const auto y = k.parse_simplex("y");
  // {y,z} is a coface of {y} too, being a face of {x,y,z}.
  CHECK(render(k, up_set(k, y)) == std::vector<std::string>{"{w,y}", "{x,y,z}", "{x,y}", "{y,z}", "{y}"});
  CHECK(render(k, up_set(k, k.parse_simplex("w"))) == std::vector<std::string>{"{w,x}", "{w,y}", "{w}"});
  const auto top = k.parse_simplex("{x,y,z}");
  CHECK(render(k, up_set(k, top)) == std::vector<std::string>{"{x,y,z}"});
  CHECK_THROWS_AS(up_set(k, k.parse_simplex("w,z")), InputError);
  CHECK_THROWS_AS(k.parse_simplex("q"), InputError);
}

TEST_CASE("openness") {
  const auto k = clause_complex(brute::wxyz_cnf());
  CHECK(is_open(k, up_set(k, k.parse_simplex("y")).cells()));
  CHECK_FALSE(is_open(k, std::vector<Simplex>{k.parse_simplex("y")}));
  const auto u = up_set(k, k.parse_simplex("y")).unite(up_set(k, k.parse_simplex("w")));
  CHECK(is_open(k, u.cells()));
  CHECK(is_open(k, std::vector<std::size_t>{}));
  CHECK_THROWS_AS(OpenSet::from_cells(k, {*k.face_index(k.parse_simplex("y"))}), InputError);
  CHECK(whole_space(k).size() == k.face_count());
}

TEST_CASE("face poset") {
  const auto k = clause_complex(brute::wxyz_cnf());
  const FacePoset p(k);
  const auto y = *k.face_index(k.parse_simplex("y"));
  const auto xy = *k.face_index(k.parse_simplex("x,y"));
  const auto xyz = *k.face_index(k.parse_simplex("x,y,z"));
  CHECK(p.leq(y, xyz));
  CHECK(p.leq(y, y));
  CHECK_FALSE(p.leq(xyz, y));
  CHECK(p.covers(xy, y));
  CHECK_FALSE(p.covers(xyz, y));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p.leq(i, j) && p.leq(j, i)) CHECK(i == j);
      if (p.covers(j, i)) CHECK(k.face(j).size() == k.face(i).size() + 1);
      for (std::size_t l = 0; l < p.size(); ++l)
        if (p.leq(i, j) && p.leq(j, l)) CHECK(p.leq(i, l));
    }
}

TEST_CASE("single simplices are contractible") {
  for (Vertex n = 1; n <= 6; ++n) {
    Simplex s;
    std::vector<std::string> labels;
    for (Vertex v = 0; v < n; ++v) {
      s.push_back(v);
      labels.push_back("v" + std::to_string(v));
    }
    const auto b = betti(SimplicialComplex(labels, {s}));
    CHECK(b[0] == 1);
    for (std::size_t k = 1; k < b.b.size(); ++k) CHECK(b[k] == 0);
  }
}

TEST_CASE("clique complex") {
  const auto square = clique_complex({"a", "b", "c", "d"}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(betti(square).to_string() == "b0=1 b1=1");
  const auto filled = clique_complex({"a", "b", "c", "d"}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  CHECK(betti(filled).to_string() == "b0=1 b1=0 b2=0");
  const auto isolated = clique_complex({"a", "b"}, {});
  CHECK(betti(isolated)[0] == 2);
}

TEST_CASE("simplex construction") {
  CHECK(make_simplex({3, 1, 2}) == Simplex{1, 2, 3});
  CHECK_THROWS_AS(make_simplex({}), InputError);
  CHECK(make_simplex({1, 1}) == Simplex{1});
}

// Properties over random formulas.

TEST_CASE("homology matches the dense reference and satisfies Euler-Poincare") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto raw = brute::random_formula(rng, 8, 10, 4);
    const auto f = brute::to_cnf(raw);
    const auto k = clause_complex(f);
    const auto d = dowker_dual(f);
    const auto bk = betti(k);
    const auto bd = betti(d);
    REQUIRE(as_ints(bk) == brute::betti(brute::primal_generators(raw)));
    REQUIRE(as_ints(bd) == brute::betti(brute::dual_generators(raw)));
    for (std::size_t i = 0; i < std::max(bk.b.size(), bd.b.size()); ++i) REQUIRE(bk[i] == bd[i]);
    REQUIRE(bk.euler_characteristic() == euler_characteristic(k));
    REQUIRE(bd.euler_characteristic() == euler_characteristic(d));
  }
}

TEST_CASE("complexes are downward closed with no nested maximal simplices") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = clause_complex(brute::to_cnf(brute::random_formula(rng, 8, 10, 4)));
    for (const auto& face : k.faces())
      for (std::size_t drop = 0; face.size() > 1 && drop < face.size(); ++drop) {
        Simplex sub = face;
        sub.erase(sub.begin() + static_cast<long>(drop));
        REQUIRE(k.face_index(sub));
      }
    const auto& m = k.maximal_simplices();
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j)
        if (i != j) REQUIRE_FALSE(std::includes(m[j].begin(), m[j].end(), m[i].begin(), m[i].end()));
  }
}

TEST_CASE("Alexandrov laws on random unions and intersections of up-sets") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = clause_complex(brute::to_cnf(brute::random_formula(rng, 7, 8, 4)));
    std::uniform_int_distribution<std::size_t> pick(0, k.face_count() - 1);
    OpenSet u = up_set(k, k.face(pick(rng)));
    OpenSet v = up_set(k, k.face(pick(rng)));
    for (int step = 0; step < 3; ++step) {
      u = u.unite(up_set(k, k.face(pick(rng))));
      v = v.unite(up_set(k, k.face(pick(rng))));
    }
    REQUIRE(is_open(k, u.unite(v).cells()));
    REQUIRE(is_open(k, u.intersect(v).cells()));
    REQUIRE(u.intersect(v).subset_of(u));
    REQUIRE(u.subset_of(u.unite(v)));

    // up_set is antitone in the face.
    const auto& s = k.face(pick(rng));
    for (std::size_t i = 0; i < k.face_count(); ++i) {
      const auto& r = k.face(i);
      if (std::includes(s.begin(), s.end(), r.begin(), r.end())) REQUIRE(up_set(k, s).subset_of(up_set(k, r)));
    }
  }
}
