#include "sheafcheck/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "sheafcheck/error.hpp"

namespace sheafcheck::topology {

Simplex make_simplex(std::vector<Vertex> vertices) {
  if (vertices.empty()) throw InputError("a simplex needs at least one vertex");
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

namespace {

bool face_order(const Simplex& a, const Simplex& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_subset(const Simplex& small, const Simplex& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

SimplicialComplex::SimplicialComplex(std::vector<std::string> labels, std::vector<Simplex> generators)
    : labels_(std::move(labels)) {
  std::set<Simplex> gens;
  for (auto& g : generators) {
    auto s = make_simplex(std::move(g));
    if (s.back() >= labels_.size()) throw InputError("simplex vertex has no label");
    if (s.size() > 20) throw LimitError("simplex with " + std::to_string(s.size()) + " vertices is too large");
    gens.insert(std::move(s));
  }

  for (const auto& g : gens) {
    const bool absorbed = std::any_of(gens.begin(), gens.end(),
                                      [&](const Simplex& other) { return other != g && is_subset(g, other); });
    if (!absorbed) maximal_.push_back(g);
  }

  std::set<Simplex> all;
  for (const auto& m : maximal_) {
    const std::uint32_t end = 1U << m.size();
    for (std::uint32_t mask = 1; mask < end; ++mask) {
      Simplex f;
      for (std::size_t i = 0; i < m.size(); ++i)
        if (mask & (1U << i)) f.push_back(m[i]);
      all.insert(std::move(f));
      if (all.size() > kMaxFaces) throw LimitError("complex exceeds " + std::to_string(kMaxFaces) + " faces");
    }
  }
  faces_.assign(all.begin(), all.end());
  std::sort(faces_.begin(), faces_.end(), face_order);
  for (std::size_t i = 0; i < faces_.size(); ++i) index_.emplace(faces_[i], i);

  facets_.resize(faces_.size());
  cofacets_.resize(faces_.size());
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const auto& f = faces_[i];
    if (f.size() < 2) continue;
    for (std::size_t drop = 0; drop < f.size(); ++drop) {
      Simplex sub;
      for (std::size_t k = 0; k < f.size(); ++k)
        if (k != drop) sub.push_back(f[k]);
      const auto j = index_.at(sub);
      facets_[i].push_back(j);
      cofacets_[j].push_back(i);
    }
  }
  for (auto& c : cofacets_) std::sort(c.begin(), c.end());
  for (auto& c : facets_) std::sort(c.begin(), c.end());
}

std::optional<std::size_t> SimplicialComplex::face_index(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SimplicialComplex::require_face(const Simplex& s) const {
  if (auto i = face_index(s)) return *i;
  throw InputError(format(s) + " is not a face of the complex");
}

int SimplicialComplex::dimension() const noexcept {
  return faces_.empty() ? -1 : static_cast<int>(faces_.back().size()) - 1;
}

std::size_t SimplicialComplex::count_of_dimension(int k) const {
  return static_cast<std::size_t>(std::count_if(
      faces_.begin(), faces_.end(), [k](const Simplex& f) { return static_cast<int>(f.size()) == k + 1; }));
}

std::string SimplicialComplex::format(const Simplex& s) const {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += s[i] < labels_.size() ? labels_[s[i]] : "?" + std::to_string(s[i]);
  }
  return out + "}";
}

Simplex SimplicialComplex::parse_simplex(std::string_view text) const {
  std::string body(text);
  std::erase_if(body, [](char c) { return c == '{' || c == '}' || c == ' '; });
  std::vector<Vertex> verts;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto comma = body.find(',', start);
    if (comma == std::string::npos) comma = body.size();
    const auto name = body.substr(start, comma - start);
    auto it = std::find(labels_.begin(), labels_.end(), name);
    if (name.empty() || it == labels_.end()) throw InputError("unknown vertex '" + name + "'");
    verts.push_back(static_cast<Vertex>(it - labels_.begin()));
    start = comma + 1;
  }
  return make_simplex(std::move(verts));
}

std::string SimplicialComplex::listing() const {
  std::ostringstream out;
  for (const auto& m : maximal_) {
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << labels_[m[i]];
    out << '\n';
  }
  return out.str();
}

bool FacePoset::leq(std::size_t i, std::size_t j) const {
  return is_subset(complex_->face(i), complex_->face(j));
}

bool FacePoset::covers(std::size_t j, std::size_t i) const {
  const auto& c = complex_->cofacets(i);
  return std::binary_search(c.begin(), c.end(), j);
}

// Open sets --------------------------------------------------------------------

OpenSet OpenSet::from_cells(const SimplicialComplex& complex, std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (!is_open(complex, cells)) throw InputError("cell set is not up-closed");
  return OpenSet(std::move(cells));
}

bool OpenSet::contains(std::size_t face) const { return std::binary_search(cells_.begin(), cells_.end(), face); }

bool OpenSet::subset_of(const OpenSet& other) const {
  return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

OpenSet OpenSet::unite(const OpenSet& other) const {
  std::vector<std::size_t> out;
  std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(), std::back_inserter(out));
  return OpenSet(std::move(out));
}

OpenSet OpenSet::intersect(const OpenSet& other) const {
  std::vector<std::size_t> out;
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out));
  return OpenSet(std::move(out));
}

OpenSet up_set(const SimplicialComplex& complex, const Simplex& sigma) {
  const auto start = complex.require_face(sigma);
  std::vector<bool> seen(complex.face_count(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  std::vector<std::size_t> cells;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    cells.push_back(i);
    for (auto j : complex.cofacets(i))
      if (!seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
  }
  std::sort(cells.begin(), cells.end());
  return OpenSet(std::move(cells));
}

OpenSet whole_space(const SimplicialComplex& complex) {
  std::vector<std::size_t> cells(complex.face_count());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  return OpenSet(std::move(cells));
}

bool is_open(const SimplicialComplex& complex, const std::vector<std::size_t>& cells) {
  std::vector<bool> in(complex.face_count(), false);
  for (auto c : cells) {
    if (c >= complex.face_count()) throw InputError("unknown cell index " + std::to_string(c));
    in[c] = true;
  }
  // Up-closure under covers implies up-closure under containment.
  for (auto c : cells)
    for (auto j : complex.cofacets(c))
      if (!in[j]) return false;
  return true;
}

bool is_open(const SimplicialComplex& complex, const std::vector<Simplex>& cells) {
  std::vector<std::size_t> idx;
  for (const auto& s : cells) idx.push_back(complex.require_face(s));
  return is_open(complex, idx);
}

// Homology -----------------------------------------------------------------------

std::int64_t BettiNumbers::euler_characteristic() const {
  std::int64_t chi = 0;
  for (std::size_t k = 0; k < b.size(); ++k) chi += (k % 2 ? -1 : 1) * static_cast<std::int64_t>(b[k]);
  return chi;
}

std::string BettiNumbers::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k) out += ' ';
    out += "b" + std::to_string(k) + "=" + std::to_string(b[k]);
  }
  return out;
}

std::int64_t euler_characteristic(const SimplicialComplex& complex) {
  std::int64_t chi = 0;
  for (const auto& f : complex.faces()) chi += (f.size() % 2 ? 1 : -1);
  return chi;
}

namespace {

// Rank over GF(2) of a matrix given as bit-packed rows.
std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows, std::size_t ncols) {
  std::size_t rank = 0;
  const std::size_t words = (ncols + 63) / 64;
  for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t pivot = rank;
    while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || !(rows[r][w] & bit)) continue;
      for (std::size_t k = w; k < words; ++k) rows[r][k] ^= rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Rank of the boundary map from k-faces to (k-1)-faces.
std::size_t boundary_rank(const SimplicialComplex& complex, int k) {
  if (k <= 0) return 0;
  std::vector<std::size_t> lower_pos(complex.face_count(), 0);
  std::size_t nlower = 0;
  for (std::size_t i = 0; i < complex.face_count(); ++i)
    if (static_cast<int>(complex.face(i).size()) == k) lower_pos[i] = nlower++;
  if (nlower == 0) return 0;

  std::vector<std::vector<std::uint64_t>> rows;
  const std::size_t words = (nlower + 63) / 64;
  for (std::size_t i = 0; i < complex.face_count(); ++i) {
    if (static_cast<int>(complex.face(i).size()) != k + 1) continue;
    std::vector<std::uint64_t> row(words, 0);
    for (auto j : complex.facets(i)) row[lower_pos[j] / 64] |= std::uint64_t{1} << (lower_pos[j] % 64);
    rows.push_back(std::move(row));
  }
  return gf2_rank(std::move(rows), nlower);
}

}  // namespace

BettiNumbers betti(const SimplicialComplex& complex, std::optional<int> max_dim) {
  if (complex.face_count() > kMaxHomologyFaces)
    throw LimitError("homology is limited to " + std::to_string(kMaxHomologyFaces) + " faces; complex has " +
                     std::to_string(complex.face_count()));
  const int top = max_dim.value_or(std::max(complex.dimension(), 0));
  if (top < 0) throw InputError("max dimension must be non-negative");

  BettiNumbers out;
  std::size_t rank_k = 0;  // rank of the boundary out of dimension k
  for (int k = 0; k <= top; ++k) {
    const auto nk = complex.count_of_dimension(k);
    const auto rank_next = boundary_rank(complex, k + 1);
    out.b.push_back(nk - rank_k - rank_next);
    rank_k = rank_next;
  }
  return out;
}

// Constructions ----------------------------------------------------------------

SimplicialComplex clause_complex(const cnf::CnfFormula& formula) {
  if (formula.num_clauses() == 0) throw InputError("clause complex of a formula with no clauses");
  std::vector<Simplex> gens;
  for (const auto& c : formula.clauses()) gens.push_back(c.variables());
  return SimplicialComplex(formula.vocabulary().names(), std::move(gens));
}

SimplicialComplex dowker_dual(const cnf::CnfFormula& formula) {
  if (formula.num_clauses() == 0) throw InputError("dual complex of a formula with no clauses");
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < formula.num_clauses(); ++j) labels.push_back("c" + std::to_string(j + 1));
  std::vector<Simplex> by_var(formula.num_vars());
  for (std::size_t j = 0; j < formula.num_clauses(); ++j)
    for (auto v : formula.clauses()[j].variables()) by_var[v].push_back(static_cast<Vertex>(j));
  std::vector<Simplex> gens;
  for (auto& s : by_var)
    if (!s.empty()) gens.push_back(std::move(s));
  return SimplicialComplex(std::move(labels), std::move(gens));
}

SimplicialComplex clique_complex(std::vector<std::string> labels,
                                 const std::vector<std::pair<Vertex, Vertex>>& edges) {
  const std::size_t n = labels.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw InputError("edge endpoint out of range");
    if (u == v) continue;
    adj[u][v] = adj[v][u] = true;
  }

  // Bron-Kerbosch with pivoting; isolated vertices come out as singleton cliques.
  std::vector<Simplex> cliques;
  auto bk = [&](auto&& self, std::vector<Vertex> r, std::vector<Vertex> p, std::vector<Vertex> x) -> void {
    if (p.empty() && x.empty()) {
      cliques.push_back(make_simplex(r));
      return;
    }
    Vertex pivot = !p.empty() ? p.front() : x.front();
    std::size_t best = 0;
    for (const auto* set : {&p, &x})
      for (auto u : *set) {
        std::size_t deg = 0;
        for (auto v : p) deg += adj[u][v];
        if (deg >= best) {
          best = deg;
          pivot = u;
        }
      }
    const auto candidates = p;
    for (auto v : candidates) {
      if (adj[pivot][v]) continue;
      std::vector<Vertex> r2 = r, p2, x2;
      r2.push_back(v);
      for (auto u : p)
        if (adj[v][u]) p2.push_back(u);
      for (auto u : x)
        if (adj[v][u]) x2.push_back(u);
      self(self, std::move(r2), std::move(p2), std::move(x2));
      std::erase(p, v);
      x.push_back(v);
    }
  };
  std::vector<Vertex> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Vertex>(i);
  if (n > 0) bk(bk, {}, all, {});
  return SimplicialComplex(std::move(labels), std::move(cliques));
}

}  // namespace sheafcheck::topology
