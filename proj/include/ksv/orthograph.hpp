#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksv/errors.hpp"
#include "ksv/rayset.hpp"

namespace ksv {

inline constexpr int kMaxGraphVertices = 64;

/// Orthogonality graph: symmetric 0/1 adjacency with zero diagonal over an
/// ordered vertex-label sequence.  Rows are 64-bit masks, so all the
/// enumeration machinery downstream can work on plain integers.
class OrthGraph {
 public:
  explicit OrthGraph(std::vector<std::string> vertices)
      : vertices_(std::move(vertices)), adj_(vertices_.size(), 0) {
    if (vertices_.size() > kMaxGraphVertices)
      throw TooLargeError("graph with more than 64 vertices");
  }

  int n() const { return static_cast<int>(vertices_.size()); }
  const std::vector<std::string>& vertex_labels() const { return vertices_; }
  const std::string& label(int v) const { return vertices_[v]; }

  int index_of(const std::string& label) const {
    for (int i = 0; i < n(); ++i)
      if (vertices_[i] == label) return i;
    return -1;
  }

  void add_edge(int u, int v) {
    if (u == v) throw Error(ErrorKind::input, "self-loop on vertex " + vertices_[u]);
    adj_[u] |= std::uint64_t{1} << v;
    adj_[v] |= std::uint64_t{1} << u;
  }

  bool adjacent(int u, int v) const { return (adj_[u] >> v) & 1; }
  std::uint64_t row(int v) const { return adj_[v]; }
  int degree(int v) const { return std::popcount(adj_[v]); }

  int edge_count() const {
    int total = 0;
    for (int v = 0; v < n(); ++v) total += degree(v);
    return total / 2;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n(); ++u)
      for (int v = u + 1; v < n(); ++v)
        if (adjacent(u, v)) out.emplace_back(u, v);
    return out;
  }

  /// Degree -> multiplicity, e.g. {{3,4},{4,9}} for the 13-ray graph.
  std::map<int, int> degree_histogram() const {
    std::map<int, int> h;
    for (int v = 0; v < n(); ++v) h[degree(v)]++;
    return h;
  }

  friend bool operator==(const OrthGraph& a, const OrthGraph& b) {
    return a.vertices_ == b.vertices_ && a.adj_ == b.adj_;
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<std::uint64_t> adj_;
};

/// Gamma_uv = 1 iff the rays are orthogonal (exact test on exact rays,
/// |<u,v>| <= eps on float rays).  Throws DuplicateRayError when two labels
/// canonicalize to the same projective ray.
inline OrthGraph build_graph(const RaySet& rs, double eps = 1e-9) {
  OrthGraph g(rs.labels());
  for (int u = 0; u < rs.size(); ++u)
    for (int v = u + 1; v < rs.size(); ++v) {
      const Ray& a = rs.ray(u);
      const Ray& b = rs.ray(v);
      if (projectively_equal(a, b, eps))
        throw DuplicateRayError("rays '" + a.label + "' and '" + b.label +
                                "' are the same projective ray");
      Scalar ip = inner_product(a, b);
      bool orthogonal = (a.exact && b.exact) ? ip.is_zero()
                                             : std::abs(ip.to_complex()) <= eps;
      if (orthogonal) g.add_edge(u, v);
    }
  return g;
}

/// A d-clique, i.e. a complete orthonormal basis present in the ray set.
/// Vertex indices, sorted ascending.
using BasisClique = std::vector<int>;

inline std::vector<std::string> clique_labels(const OrthGraph& g, const BasisClique& c) {
  std::vector<std::string> out;
  out.reserve(c.size());
  for (int v : c) out.push_back(g.label(v));
  return out;
}

/// All d-cliques in lexicographic order over the canonical vertex order.
inline std::vector<BasisClique> basis_cliques(const OrthGraph& g, int d) {
  if (d < 2) throw Error(ErrorKind::input, "basis cliques need d >= 2");
  std::vector<BasisClique> out;
  BasisClique current;
  auto extend = [&](auto&& self, int start, std::uint64_t common) -> void {
    if (static_cast<int>(current.size()) == d) {
      out.push_back(current);
      return;
    }
    for (int v = start; v < g.n(); ++v) {
      if (!((common >> v) & 1)) continue;
      current.push_back(v);
      self(self, v + 1, common & g.row(v));
      current.pop_back();
    }
  };
  std::uint64_t all = g.n() == 64 ? ~std::uint64_t{0}
                                  : (std::uint64_t{1} << g.n()) - 1;
  extend(extend, 0, all);
  return out;
}

namespace detail {

inline bool extend_isomorphism(const OrthGraph& g1, const OrthGraph& g2,
                               std::vector<int>& map, std::vector<bool>& used,
                               int next) {
  if (next == g1.n()) return true;
  for (int cand = 0; cand < g2.n(); ++cand) {
    if (used[cand] || g2.degree(cand) != g1.degree(next)) continue;
    bool ok = true;
    for (int prev = 0; prev < next; ++prev)
      if (g1.adjacent(prev, next) != g2.adjacent(map[prev], cand)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    map[next] = cand;
    used[cand] = true;
    if (extend_isomorphism(g1, g2, map, used, next + 1)) return true;
    used[cand] = false;
  }
  return false;
}

}  // namespace detail

/// First adjacency-preserving vertex bijection pi with
/// Gamma1_uv == Gamma2_pi(u)pi(v), in canonical search order; empty if the
/// graphs are not isomorphic.  Backtracking with degree pruning, adequate for
/// the <= 40-vertex graphs this toolkit handles.
inline std::optional<std::vector<int>> labeled_isomorphism(const OrthGraph& g1,
                                                           const OrthGraph& g2) {
  if (g1.n() == 0 || g2.n() == 0)
    throw Error(ErrorKind::input, "isomorphism of empty graph");
  if (g1.n() != g2.n()) return std::nullopt;
  auto h1 = g1.degree_histogram();
  if (h1 != g2.degree_histogram()) return std::nullopt;
  std::vector<int> map(g1.n(), -1);
  std::vector<bool> used(g2.n(), false);
  if (detail::extend_isomorphism(g1, g2, map, used, 0)) return map;
  return std::nullopt;
}

/// All automorphisms (label permutations preserving adjacency), in canonical
/// search order.  `limit` = 0 means unlimited.
inline std::vector<std::vector<int>> automorphisms(const OrthGraph& g,
                                                   std::size_t limit = 0) {
  std::vector<std::vector<int>> out;
  std::vector<int> map(g.n(), -1);
  std::vector<bool> used(g.n(), false);
  auto search = [&](auto&& self, int next) -> bool {
    if (next == g.n()) {
      out.push_back(map);
      return limit != 0 && out.size() >= limit;
    }
    for (int cand = 0; cand < g.n(); ++cand) {
      if (used[cand] || g.degree(cand) != g.degree(next)) continue;
      bool ok = true;
      for (int prev = 0; prev < next; ++prev)
        if (g.adjacent(prev, next) != g.adjacent(map[prev], cand)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      map[next] = cand;
      used[cand] = true;
      if (self(self, next + 1)) return true;
      used[cand] = false;
    }
    return false;
  };
  search(search, 0);
  return out;
}

/// True iff every k-subset of `subset` contains at least one edge, i.e. the
/// induced independence number is < k.  Throws KTooLargeError for k > |subset|.
inline bool independent_pair_free(const OrthGraph& g, const std::vector<int>& subset,
                                  int k) {
  for (int v : subset)
    if (v < 0 || v >= g.n())
      throw Error(ErrorKind::input, "subset vertex out of range");
  if (k > static_cast<int>(subset.size()))
    throw KTooLargeError("k = " + std::to_string(k) + " exceeds subset size " +
                         std::to_string(subset.size()));
  if (k <= 0) return false;
  // Search for an independent set of size k inside `subset`.
  auto find_independent = [&](auto&& self, std::size_t start, int remaining,
                              std::uint64_t chosen) -> bool {
    if (remaining == 0) return true;
    for (std::size_t i = start; i < subset.size(); ++i) {
      int v = subset[i];
      if (g.row(v) & chosen) continue;
      if (self(self, i + 1, remaining - 1, chosen | (std::uint64_t{1} << v))) return true;
    }
    return false;
  };
  return !find_independent(find_independent, 0, k, 0);
}

/// The orthogonality graph of the built-in 13-ray set.
inline const OrthGraph& delta13() {
  static const OrthGraph g = build_graph(yu_oh_13());
  return g;
}

}  // namespace ksv
