#include "sheafcheck/sheaf.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "sheafcheck/error.hpp"

namespace sheafcheck::sheaf {

using cnf::VarIndex;
using topology::SimplicialComplex;

bool PartialAssignment::value_of(VarIndex v) const {
  auto it = std::lower_bound(vars.begin(), vars.end(), v);
  if (it == vars.end() || *it != v) throw InputError("variable not covered by this partial assignment");
  return values[static_cast<std::size_t>(it - vars.begin())];
}

std::string PartialAssignment::to_string() const {
  std::string s;
  for (bool b : values) s += b ? 'T' : 'F';
  return s;
}

ClauseSheaf::ClauseSheaf(cnf::CnfFormula formula)
    : formula_(std::move(formula)), complex_(topology::clause_complex(formula_)) {
  if (formula_.num_vars() > cnf::kMaxEnumerationVars)
    throw LimitError("sheaf over " + std::to_string(formula_.num_vars()) + " variables exceeds the bound of " +
                     std::to_string(cnf::kMaxEnumerationVars));
  constraints_.resize(complex_.face_count());
  std::vector<std::vector<VarIndex>> clause_vars;
  for (const auto& c : formula_.clauses()) clause_vars.push_back(c.variables());
  for (std::size_t f = 0; f < complex_.face_count(); ++f) {
    const auto& face = complex_.face(f);
    for (std::size_t c = 0; c < clause_vars.size(); ++c)
      if (std::includes(face.begin(), face.end(), clause_vars[c].begin(), clause_vars[c].end()))
        constraints_[f].push_back(c);
  }
}

const std::vector<std::size_t>& ClauseSheaf::constraints(const Simplex& face) const {
  return constraints_.at(complex_.require_face(face));
}

bool ClauseSheaf::admits(std::size_t face, const PartialAssignment& a) const {
  if (a.vars != complex_.face(face)) return false;
  for (auto c : constraints_.at(face)) {
    const auto& lits = formula_.clauses()[c].literals();
    const bool sat =
        std::any_of(lits.begin(), lits.end(), [&](const cnf::Literal& l) { return a.value_of(l.var) != l.negated; });
    if (!sat) return false;
  }
  return true;
}

ClauseSheaf build_sheaf(const cnf::CnfFormula& formula) { return ClauseSheaf(formula); }

Stalk stalk(const ClauseSheaf& sheaf, const Simplex& face) {
  const auto f = sheaf.complex().require_face(face);
  Stalk out{face, {}};
  const std::uint32_t end = 1U << face.size();
  for (std::uint32_t p = 0; p < end; ++p) {
    PartialAssignment a{face, std::vector<bool>(face.size())};
    for (std::size_t i = 0; i < face.size(); ++i) a.values[i] = (p >> (face.size() - 1 - i)) & 1U;
    if (sheaf.admits(f, a)) out.members.push_back(std::move(a));
  }
  return out;
}

PartialAssignment restrict(const PartialAssignment& a, const Simplex& sigma) {
  PartialAssignment out{sigma, {}};
  for (auto v : sigma) out.values.push_back(a.value_of(v));
  return out;
}

// Sections -------------------------------------------------------------------------

LocalSection::LocalSection(OpenSet open, std::vector<PartialAssignment> data)
    : open_(std::move(open)), data_(std::move(data)) {
  if (data_.size() != open_.size()) throw InputError("a section needs one datum per cell");
}

const PartialAssignment& LocalSection::at(std::size_t face) const {
  const auto& cells = open_.cells();
  auto it = std::lower_bound(cells.begin(), cells.end(), face);
  if (it == cells.end() || *it != face) throw InputError("face is not a cell of the section's open set");
  return data_[static_cast<std::size_t>(it - cells.begin())];
}

LocalSection LocalSection::restrict_to(const OpenSet& smaller) const {
  if (!smaller.subset_of(open_)) throw InputError("restriction target is not contained in the section's open set");
  std::vector<PartialAssignment> data;
  for (auto c : smaller.cells()) data.push_back(at(c));
  return LocalSection(smaller, std::move(data));
}

std::string LocalSection::dump(const SimplicialComplex& complex) const {
  std::vector<std::size_t> order(open_.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& cells = open_.cells();
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return complex.face(cells[a]) < complex.face(cells[b]); });
  std::string out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k) out += ';';
    out += complex.format(complex.face(cells[order[k]])) + "=" + data_[order[k]].to_string();
  }
  return out;
}

bool is_section(const ClauseSheaf& sheaf, const LocalSection& s) {
  const auto& cx = sheaf.complex();
  const auto& cells = s.open().cells();
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!sheaf.admits(cells[i], s.data()[i])) return false;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (auto j : cx.cofacets(cells[i]))
      if (restrict(s.at(j), cx.face(cells[i])) != s.data()[i]) return false;
  return true;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// One connected piece of an open set. A section is fixed by one Boolean per
// "occurrence class": the (cell, variable) slots that restriction forces to
// agree. Bit i of a pattern (counted from the most significant end) is the
// value of class i.
struct Component {
  std::vector<std::size_t> cells;
  std::vector<VarIndex> class_var;
  std::map<std::size_t, std::vector<std::size_t>> cell_bits;  // cell -> class per face vertex
  std::vector<cnf::ClauseMask> masks;
  std::vector<std::uint64_t> solutions;

  std::size_t width() const { return class_var.size(); }
  bool bit(std::uint64_t pattern, std::size_t cls) const { return (pattern >> (width() - 1 - cls)) & 1U; }
};

std::vector<Component> decompose(const ClauseSheaf& sheaf, const OpenSet& open, std::size_t max_width) {
  const auto& cx = sheaf.complex();
  const auto& cells = open.cells();

  // Slot numbering: offset[i] + position of the variable within face(cells[i]).
  std::vector<std::size_t> offset(cells.size() + 1, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) offset[i + 1] = offset[i] + cx.face(cells[i]).size();
  auto pos_of = [&](std::size_t cell) {
    return static_cast<std::size_t>(std::lower_bound(cells.begin(), cells.end(), cell) - cells.begin());
  };

  UnionFind slots(offset.back());
  UnionFind pieces(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& small = cx.face(cells[i]);
    for (auto j : cx.cofacets(cells[i])) {
      const auto pj = pos_of(j);
      pieces.unite(i, pj);
      const auto& big = cx.face(j);
      for (std::size_t a = 0; a < small.size(); ++a) {
        const auto b = static_cast<std::size_t>(std::lower_bound(big.begin(), big.end(), small[a]) - big.begin());
        slots.unite(offset[i] + a, offset[pj] + b);
      }
    }
  }

  std::map<std::size_t, std::size_t> piece_index;
  std::vector<Component> comps;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto [it, fresh] = piece_index.emplace(pieces.find(i), comps.size());
    if (fresh) comps.emplace_back();
    comps[it->second].cells.push_back(cells[i]);
  }

  for (auto& comp : comps) {
    // Classes ordered by (variable, first cell holding them).
    std::map<std::pair<VarIndex, std::size_t>, std::size_t> root_key;
    std::map<std::size_t, std::pair<VarIndex, std::size_t>> key_of_root;
    for (auto cell : comp.cells) {
      const auto i = pos_of(cell);
      const auto& face = cx.face(cell);
      for (std::size_t a = 0; a < face.size(); ++a) {
        const auto root = slots.find(offset[i] + a);
        auto [it, fresh] = key_of_root.emplace(root, std::make_pair(face[a], cell));
        if (!fresh && cell < it->second.second) it->second.second = cell;
      }
    }
    if (key_of_root.size() > max_width)
      throw LimitError("open set needs " + std::to_string(key_of_root.size()) + " Boolean unknowns; the bound is " +
                       std::to_string(max_width));
    std::vector<std::pair<std::pair<VarIndex, std::size_t>, std::size_t>> keyed;
    for (auto& [root, key] : key_of_root) keyed.push_back({key, root});
    std::sort(keyed.begin(), keyed.end());
    std::map<std::size_t, std::size_t> class_of_root;
    for (std::size_t k = 0; k < keyed.size(); ++k) {
      class_of_root[keyed[k].second] = k;
      comp.class_var.push_back(keyed[k].first.first);
    }

    const std::size_t w = comp.width();
    for (auto cell : comp.cells) {
      const auto i = pos_of(cell);
      const auto& face = cx.face(cell);
      auto& bits = comp.cell_bits[cell];
      for (std::size_t a = 0; a < face.size(); ++a) bits.push_back(class_of_root.at(slots.find(offset[i] + a)));
      for (auto c : sheaf.constraints(cell)) {
        cnf::ClauseMask m;
        for (const auto& lit : sheaf.formula().clauses()[c].literals()) {
          const auto a = static_cast<std::size_t>(std::lower_bound(face.begin(), face.end(), lit.var) - face.begin());
          const std::uint64_t bit = std::uint64_t{1} << (w - 1 - bits[a]);
          (lit.negated ? m.negative : m.positive) |= bit;
        }
        comp.masks.push_back(m);
      }
    }
    std::sort(comp.masks.begin(), comp.masks.end(), [](const cnf::ClauseMask& x, const cnf::ClauseMask& y) {
      return std::tie(x.positive, x.negative) < std::tie(y.positive, y.negative);
    });
    comp.masks.erase(std::unique(comp.masks.begin(), comp.masks.end(),
                                 [](const cnf::ClauseMask& x, const cnf::ClauseMask& y) {
                                   return x.positive == y.positive && x.negative == y.negative;
                                 }),
                     comp.masks.end());

    const std::uint64_t end = std::uint64_t{1} << w;
    for (std::uint64_t p = 0; p < end; ++p)
      if (std::all_of(comp.masks.begin(), comp.masks.end(), [p](const cnf::ClauseMask& m) { return m.satisfied_by(p); }))
        comp.solutions.push_back(p);
  }
  return comps;
}

constexpr std::size_t kMaxSections = std::size_t{1} << 22;

}  // namespace

std::vector<LocalSection> sections(const ClauseSheaf& sheaf, const OpenSet& open) {
  if (!topology::is_open(sheaf.complex(), open.cells())) throw InputError("sections requested over a non-open set");
  const auto comps = decompose(sheaf, open, kMaxSectionVars);
  const auto& cx = sheaf.complex();

  std::size_t total = 1;
  for (const auto& c : comps) {
    total *= c.solutions.size();
    if (total > kMaxSections) throw LimitError("too many sections to enumerate");
  }

  std::vector<LocalSection> out;
  out.reserve(total);
  std::vector<std::size_t> choice(comps.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::map<std::size_t, PartialAssignment> data;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto& comp = comps[k];
      const auto pattern = comp.solutions[choice[k]];
      for (const auto& [cell, bits] : comp.cell_bits) {
        PartialAssignment a{cx.face(cell), {}};
        for (auto cls : bits) a.values.push_back(comp.bit(pattern, cls));
        data.emplace(cell, std::move(a));
      }
    }
    std::vector<PartialAssignment> ordered;
    for (auto c : open.cells()) ordered.push_back(std::move(data.at(c)));
    out.emplace_back(open, std::move(ordered));

    // Odometer: the last component varies fastest.
    for (std::size_t k = comps.size(); k-- > 0;) {
      if (++choice[k] < comps[k].solutions.size()) break;
      choice[k] = 0;
    }
  }
  return out;
}

std::vector<LocalSection> extend(const ClauseSheaf& sheaf, const LocalSection& s, const OpenSet& larger) {
  if (!s.open().subset_of(larger)) throw InputError("extension target does not contain the section's open set");
  std::vector<LocalSection> out;
  for (auto& candidate : sections(sheaf, larger))
    if (candidate.restrict_to(s.open()) == s) out.push_back(std::move(candidate));
  return out;
}

std::vector<cnf::Assignment> global_sections(const ClauseSheaf& sheaf) {
  const auto& f = sheaf.formula();
  const std::size_t n = f.num_vars();
  const auto comps = decompose(sheaf, topology::whole_space(sheaf.complex()), cnf::kMaxEnumerationVars);

  // Over the whole complex every variable's slots meet at its vertex, so each
  // class is a single variable.
  std::vector<bool> covered(n, false);
  std::vector<std::uint64_t> patterns{0};
  for (const auto& comp : comps) {
    std::vector<std::uint64_t> next;
    for (auto base : patterns)
      for (auto sol : comp.solutions) {
        std::uint64_t p = base;
        for (std::size_t cls = 0; cls < comp.width(); ++cls)
          if (comp.bit(sol, cls)) p |= std::uint64_t{1} << (n - 1 - comp.class_var[cls]);
        next.push_back(p);
      }
    for (auto v : comp.class_var) covered[v] = true;
    patterns = std::move(next);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (covered[v]) continue;
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - v);
    const auto count = patterns.size();
    for (std::size_t i = 0; i < count; ++i) patterns.push_back(patterns[i] | bit);
  }
  std::sort(patterns.begin(), patterns.end());

  std::vector<cnf::Assignment> out;
  out.reserve(patterns.size());
  for (auto p : patterns) out.push_back(cnf::Assignment::from_pattern(f.vocabulary_ptr(), p));
  return out;
}

}  // namespace sheafcheck::sheaf
