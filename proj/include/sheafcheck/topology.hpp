#pragma once

// Abstract simplicial complexes built from CNF formulas, their face posets,
// the Alexandrov (up-set) topology on faces, and GF(2) simplicial homology.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheafcheck/cnf.hpp"

namespace sheafcheck::topology {

using Vertex = std::uint32_t;

/// Non-empty, sorted, duplicate-free vertex list.
using Simplex = std::vector<Vertex>;

/// Sorts and deduplicates; throws InputError when empty.
Simplex make_simplex(std::vector<Vertex> vertices);

/// Largest number of faces a complex may hold.
inline constexpr std::size_t kMaxFaces = 1'000'000;
/// Largest face count `betti` accepts.
inline constexpr std::size_t kMaxHomologyFaces = 10'000;

class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Downward closure of `generators`. `labels[v]` names vertex v; vertices
  /// that appear in no generator are not part of the complex.
  SimplicialComplex(std::vector<std::string> labels, std::vector<Simplex> generators);

  /// The inclusion-maximal generators, sorted lexicographically.
  const std::vector<Simplex>& maximal_simplices() const noexcept { return maximal_; }

  /// All faces ordered by (dimension, lexicographic vertex order). Face
  /// indices used throughout this module refer to this ordering.
  const std::vector<Simplex>& faces() const noexcept { return faces_; }
  const Simplex& face(std::size_t i) const { return faces_.at(i); }
  std::size_t face_count() const noexcept { return faces_.size(); }
  std::optional<std::size_t> face_index(const Simplex& s) const;
  std::size_t require_face(const Simplex& s) const;  // throws InputError if absent

  /// -1 for the empty complex.
  int dimension() const noexcept;
  std::size_t count_of_dimension(int k) const;

  /// Faces obtained by adding exactly one vertex.
  const std::vector<std::size_t>& cofacets(std::size_t i) const { return cofacets_.at(i); }
  /// Faces obtained by removing exactly one vertex (none for vertices).
  const std::vector<std::size_t>& facets(std::size_t i) const { return facets_.at(i); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(Vertex v) const { return labels_.at(v); }

  /// "{w,x}" style rendering.
  std::string format(const Simplex& s) const;
  /// Parses "x,y" or "{x,y}" into a simplex over this complex's labels.
  Simplex parse_simplex(std::string_view text) const;

  /// One maximal simplex per line, each rendered as space-separated labels.
  std::string listing() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Simplex> maximal_;
  std::vector<Simplex> faces_;
  std::map<Simplex, std::size_t> index_;
  std::vector<std::vector<std::size_t>> facets_;
  std::vector<std::vector<std::size_t>> cofacets_;
};

/// Containment order on the faces of a complex.
class FacePoset {
 public:
  explicit FacePoset(const SimplicialComplex& complex) : complex_(&complex) {}

  std::size_t size() const noexcept { return complex_->face_count(); }
  /// face(i) is a subset of face(j).
  bool leq(std::size_t i, std::size_t j) const;
  /// Cover relation: j covers i iff face(j) adds exactly one vertex to face(i).
  bool covers(std::size_t j, std::size_t i) const;

 private:
  const SimplicialComplex* complex_;
};

/// Up-closed set of faces, stored as sorted face indices.
class OpenSet {
 public:
  OpenSet() = default;

  /// Validates up-closure; throws InputError on an unknown index or a
  /// missing coface.
  static OpenSet from_cells(const SimplicialComplex& complex, std::vector<std::size_t> cells);

  const std::vector<std::size_t>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  bool contains(std::size_t face) const;
  bool subset_of(const OpenSet& other) const;

  OpenSet unite(const OpenSet& other) const;
  OpenSet intersect(const OpenSet& other) const;

  bool operator==(const OpenSet&) const = default;

 private:
  explicit OpenSet(std::vector<std::size_t> sorted) : cells_(std::move(sorted)) {}
  std::vector<std::size_t> cells_;

  friend OpenSet up_set(const SimplicialComplex&, const Simplex&);
  friend OpenSet whole_space(const SimplicialComplex&);
};

OpenSet up_set(const SimplicialComplex& complex, const Simplex& sigma);
OpenSet whole_space(const SimplicialComplex& complex);

bool is_open(const SimplicialComplex& complex, const std::vector<std::size_t>& cells);
bool is_open(const SimplicialComplex& complex, const std::vector<Simplex>& cells);

struct BettiNumbers {
  std::vector<std::size_t> b;

  std::size_t operator[](std::size_t k) const { return k < b.size() ? b[k] : 0; }
  std::int64_t euler_characteristic() const;
  /// "b0=1 b1=1 b2=0"
  std::string to_string() const;
};

/// Betti numbers over GF(2) in dimensions 0..max_dim (defaults to the
/// complex's dimension).
BettiNumbers betti(const SimplicialComplex& complex, std::optional<int> max_dim = std::nullopt);

/// Alternating count of faces by dimension.
std::int64_t euler_characteristic(const SimplicialComplex& complex);

/// Vertices are the formula's variables; each clause's variable set spans a simplex.
SimplicialComplex clause_complex(const cnf::CnfFormula& formula);

/// Vertices are clauses c1..cm; each variable spans the simplex of clauses containing it.
SimplicialComplex dowker_dual(const cnf::CnfFormula& formula);

/// Flag complex of an undirected graph: every clique is a simplex.
SimplicialComplex clique_complex(std::vector<std::string> labels,
                                 const std::vector<std::pair<Vertex, Vertex>>& edges);

}  // namespace sheafcheck::topology
