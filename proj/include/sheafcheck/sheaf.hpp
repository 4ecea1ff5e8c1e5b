#pragma once

// The Boolean assignment sheaf of a CNF formula over its clause complex.
//
// The stalk over a face holds the assignments to the face's variables that
// satisfy every clause whose variables all lie in the face. Restriction is
// projection onto a subface. Sections over an open set are families of stalk
// members that agree under restriction on every comparable pair of cells;
// the global sections are exactly the formula's models.

#include <cstddef>
#include <string>
#include <vector>

#include "sheafcheck/cnf.hpp"
#include "sheafcheck/topology.hpp"

namespace sheafcheck::sheaf {

using topology::OpenSet;
using topology::Simplex;

/// Values for the variables of one face (vars sorted ascending).
struct PartialAssignment {
  std::vector<cnf::VarIndex> vars;
  std::vector<bool> values;

  bool value_of(cnf::VarIndex v) const;
  /// "TF" in variable order.
  std::string to_string() const;

  auto operator<=>(const PartialAssignment&) const = default;
};

class ClauseSheaf {
 public:
  explicit ClauseSheaf(cnf::CnfFormula formula);

  const cnf::CnfFormula& formula() const noexcept { return formula_; }
  const topology::SimplicialComplex& complex() const noexcept { return complex_; }

  /// Indices of the clauses whose variable set lies inside the face.
  const std::vector<std::size_t>& constraints(std::size_t face) const { return constraints_.at(face); }
  const std::vector<std::size_t>& constraints(const Simplex& face) const;

  bool admits(std::size_t face, const PartialAssignment& a) const;

 private:
  cnf::CnfFormula formula_;
  topology::SimplicialComplex complex_;
  std::vector<std::vector<std::size_t>> constraints_;
};

ClauseSheaf build_sheaf(const cnf::CnfFormula& formula);

struct Stalk {
  Simplex face;
  std::vector<PartialAssignment> members;  // increasing bit-pattern order
};

Stalk stalk(const ClauseSheaf& sheaf, const Simplex& face);

/// Projection of `a` onto the variables of `sigma`; throws if sigma is not
/// contained in a's variables.
PartialAssignment restrict(const PartialAssignment& a, const Simplex& sigma);

class LocalSection {
 public:
  LocalSection(OpenSet open, std::vector<PartialAssignment> data);

  const OpenSet& open() const noexcept { return open_; }
  const std::vector<PartialAssignment>& data() const noexcept { return data_; }
  /// Datum on a cell of the open set.
  const PartialAssignment& at(std::size_t face) const;

  /// Restriction to an open subset.
  LocalSection restrict_to(const OpenSet& smaller) const;

  /// `{w,y}=TT;{x,y}=FT;...` sorted by face vertex list.
  std::string dump(const topology::SimplicialComplex& complex) const;

  bool operator==(const LocalSection&) const = default;

 private:
  OpenSet open_;
  std::vector<PartialAssignment> data_;
};

/// Checks stalk membership of every datum and pairwise compatibility.
bool is_section(const ClauseSheaf& sheaf, const LocalSection& s);

/// Largest number of independent Boolean unknowns `sections` will sweep.
inline constexpr std::size_t kMaxSectionVars = 20;

/// Every section over U, enumerated per connected component of U and
/// combined by product, in a deterministic order.
std::vector<LocalSection> sections(const ClauseSheaf& sheaf, const OpenSet& open);

/// Sections over `larger` that restrict to `s`.
std::vector<LocalSection> extend(const ClauseSheaf& sheaf, const LocalSection& s, const OpenSet& larger);

/// Global sections as total assignments, in increasing bit-pattern order.
/// Variables that occur in no clause are expanded as free.
std::vector<cnf::Assignment> global_sections(const ClauseSheaf& sheaf);

}  // namespace sheafcheck::sheaf
