#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksv/orthograph.hpp"

namespace ksv {

inline constexpr int kMaxEnumerationVertices = 30;

/// Constraint bundle for Kochen-Specker {0,1} value assignments: linked
/// vertices may not both take 1, and every basis clique takes exactly one 1.
struct ColoringProblem {
  OrthGraph graph;
  std::vector<BasisClique> bases;
};

inline ColoringProblem make_problem(OrthGraph graph, std::vector<BasisClique> bases) {
  for (const auto& basis : bases)
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        if (!graph.adjacent(basis[i], basis[j]))
          throw Error(ErrorKind::input,
                      "basis {" + graph.label(basis[i]) + ", " + graph.label(basis[j]) +
                          ", ...} is not a clique");
  return ColoringProblem{std::move(graph), std::move(bases)};
}

/// Graph plus all complete-basis cliques of a ray set.
inline ColoringProblem problem_for(const RaySet& rs, double eps = 1e-9) {
  OrthGraph g = build_graph(rs, eps);
  auto bases = basis_cliques(g, rs.dim());
  return ColoringProblem{std::move(g), std::move(bases)};
}

/// Assignments are bitmasks over the canonical vertex order: bit v set means
/// vertex v takes value 1.
inline bool ks_satisfies(const ColoringProblem& p, std::uint64_t ones) {
  for (int v = 0; v < p.graph.n(); ++v)
    if ((ones >> v) & 1)
      if (p.graph.row(v) & ones) return false;
  for (const auto& basis : p.bases) {
    int count = 0;
    for (int v : basis) count += (ones >> v) & 1;
    if (count != 1) return false;
  }
  return true;
}

struct KSEnumeration {
  std::vector<std::uint64_t> assignments;  // lexicographic, possibly truncated
  std::uint64_t count = 0;                 // exact total
};

namespace detail {

struct KSSearchState {
  const ColoringProblem* p;
  std::vector<std::uint64_t> basis_masks;
  std::uint64_t ones = 0;
  std::uint64_t assigned = 0;
};

// DFS in canonical vertex order, value 0 before 1: emits assignments in
// lexicographic order over (v0, v1, ...).
template <typename Visit>
inline void ks_enumerate_dfs(KSSearchState& st, int v, Visit&& visit) {
  int n = st.p->graph.n();
  if (v == n) {
    visit(st.ones);
    return;
  }
  std::uint64_t bit = std::uint64_t{1} << v;
  for (int value = 0; value <= 1; ++value) {
    if (value == 1 && (st.p->graph.row(v) & st.ones)) continue;
    st.assigned |= bit;
    if (value == 1) st.ones |= bit;
    bool feasible = true;
    for (std::size_t b = 0; b < st.basis_masks.size() && feasible; ++b) {
      std::uint64_t mask = st.basis_masks[b];
      if (!(mask & bit)) continue;
      std::uint64_t ones_in = mask & st.ones;
      if (std::popcount(ones_in) > 1) feasible = false;
      else if ((mask & ~st.assigned) == 0 && ones_in == 0) feasible = false;
    }
    if (feasible) ks_enumerate_dfs(st, v + 1, visit);
    if (value == 1) st.ones &= ~bit;
    st.assigned &= ~bit;
  }
}

template <typename Visit>
inline void for_each_ks_assignment(const ColoringProblem& p, Visit&& visit) {
  if (p.graph.n() > kMaxEnumerationVertices)
    throw TooLargeError("exhaustive enumeration limited to " +
                        std::to_string(kMaxEnumerationVertices) + " vertices");
  KSSearchState st;
  st.p = &p;
  st.basis_masks.reserve(p.bases.size());
  for (const auto& basis : p.bases) {
    std::uint64_t m = 0;
    for (int v : basis) m |= std::uint64_t{1} << v;
    st.basis_masks.push_back(m);
  }
  ks_enumerate_dfs(st, 0, visit);
}

}  // namespace detail

/// All KS value assignments, lexicographic.  The returned sequence is
/// truncated to `limit` entries (default 64, nullopt = keep all) but the
/// count is always exact.
inline KSEnumeration enumerate_ks(const ColoringProblem& p,
                                  std::optional<std::uint64_t> limit = 64) {
  KSEnumeration out;
  detail::for_each_ks_assignment(p, [&](std::uint64_t ones) {
    ++out.count;
    if (!limit || out.assignments.size() < *limit) out.assignments.push_back(ones);
  });
  return out;
}

/// Witness search: backtracking over vertices in descending-degree order
/// (ties by canonical order) with forced-value propagation.  Returns the
/// deterministic first witness, or empty = UNSAT.  `pins` preassigns values.
inline std::optional<std::uint64_t> ks_colorable(
    const ColoringProblem& p,
    const std::vector<std::pair<int, int>>& pins = {}) {
  int n = p.graph.n();
  std::vector<std::uint64_t> basis_masks;
  for (const auto& basis : p.bases) {
    std::uint64_t m = 0;
    for (int v : basis) m |= std::uint64_t{1} << v;
    basis_masks.push_back(m);
  }

  struct State {
    std::uint64_t ones = 0, assigned = 0;
  };

  // Assign + propagate; false on conflict.
  auto propagate = [&](State& st, int v0, int value0) -> bool {
    std::vector<std::pair<int, int>> queue{{v0, value0}};
    while (!queue.empty()) {
      auto [v, value] = queue.back();
      queue.pop_back();
      std::uint64_t bit = std::uint64_t{1} << v;
      if (st.assigned & bit) {
        if (((st.ones >> v) & 1) != static_cast<std::uint64_t>(value)) return false;
        continue;
      }
      st.assigned |= bit;
      if (value) {
        st.ones |= bit;
        std::uint64_t nb = p.graph.row(v);
        if (nb & st.ones) return false;           // linked rays both 1
        std::uint64_t forced = nb & ~st.assigned;  // neighbors drop to 0
        while (forced) {
          int u = std::countr_zero(forced);
          forced &= forced - 1;
          queue.emplace_back(u, 0);
        }
      }
      for (std::uint64_t mask : basis_masks) {
        if (!(mask & bit)) continue;
        std::uint64_t unassigned = mask & ~st.assigned;
        std::uint64_t ones_in = mask & st.ones;
        if (ones_in == 0) {
          if (unassigned == 0) return false;       // basis with no 1 left
          if (std::popcount(unassigned) == 1)      // last slot must take 1
            queue.emplace_back(std::countr_zero(unassigned), 1);
        }
      }
    }
    return true;
  };

  State root;
  for (auto [v, value] : pins) {
    if (v < 0 || v >= n) throw Error(ErrorKind::input, "pinned vertex out of range");
    if (value != 0 && value != 1)
      throw Error(ErrorKind::input, "pinned value must be 0 or 1");
    if (!propagate(root, v, value)) return std::nullopt;
  }

  std::vector<int> order;
  for (int v = 0; v < n; ++v) order.push_back(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return p.graph.degree(a) > p.graph.degree(b); });

  auto search = [&](auto&& self, const State& st) -> std::optional<std::uint64_t> {
    int branch = -1;
    for (int v : order)
      if (!((st.assigned >> v) & 1)) {
        branch = v;
        break;
      }
    if (branch < 0)
      return ks_satisfies(p, st.ones) ? std::optional<std::uint64_t>(st.ones)
                                      : std::nullopt;
    for (int value = 0; value <= 1; ++value) {
      State child = st;
      if (propagate(child, branch, value)) {
        auto found = self(self, child);
        if (found) return found;
      }
    }
    return std::nullopt;
  };
  return search(search, root);
}

/// Propagation-only trace from a set of pins: which vertices get forced to 1
/// before a conflict (if any) is reached.  Used by the exclusion report.
inline std::vector<int> forced_ones_from_pins(const ColoringProblem& p,
                                              const std::vector<std::pair<int, int>>& pins) {
  // Re-run the solver's propagation with the pins and record level-1 forces.
  std::vector<std::uint64_t> basis_masks;
  for (const auto& basis : p.bases) {
    std::uint64_t m = 0;
    for (int v : basis) m |= std::uint64_t{1} << v;
    basis_masks.push_back(m);
  }
  std::uint64_t ones = 0, assigned = 0, pinned = 0;
  std::vector<std::pair<int, int>> queue;
  for (auto [v, value] : pins) {
    if (v < 0 || v >= p.graph.n())
      throw Error(ErrorKind::input, "pinned vertex out of range");
    queue.emplace_back(v, value);
    pinned |= std::uint64_t{1} << v;
  }
  std::vector<int> forced;
  while (!queue.empty()) {
    auto [v, value] = queue.back();
    queue.pop_back();
    std::uint64_t bit = std::uint64_t{1} << v;
    if (assigned & bit) continue;
    assigned |= bit;
    if (value) {
      ones |= bit;
      if (!(pinned & bit)) forced.push_back(v);
      std::uint64_t nb = p.graph.row(v) & ~assigned;
      while (nb) {
        int u = std::countr_zero(nb);
        nb &= nb - 1;
        queue.emplace_back(u, 0);
      }
    }
    for (std::uint64_t mask : basis_masks) {
      if (!(mask & bit)) continue;
      std::uint64_t unassigned = mask & ~assigned;
      if ((mask & ones) == 0 && std::popcount(unassigned) == 1)
        queue.emplace_back(std::countr_zero(unassigned), 1);
    }
  }
  std::sort(forced.begin(), forced.end());
  return forced;
}

struct SubsetMax {
  int max = 0;
  std::uint64_t witness = 0;  // lexicographically first maximizer
};

/// Maximum of sum_{v in subset} value(v) over all KS assignments.
/// Throws UncolorableError when the problem admits no assignment at all.
inline SubsetMax max_subset_sum(const ColoringProblem& p, const std::vector<int>& subset) {
  std::uint64_t subset_mask = 0;
  for (int v : subset) {
    if (v < 0 || v >= p.graph.n())
      throw Error(ErrorKind::input, "subset vertex out of range");
    subset_mask |= std::uint64_t{1} << v;
  }
  bool any = false;
  SubsetMax best;
  detail::for_each_ks_assignment(p, [&](std::uint64_t ones) {
    int value = std::popcount(ones & subset_mask);
    if (!any || value > best.max) {
      best.max = value;
      best.witness = ones;
    }
    any = true;
  });
  if (!any) throw UncolorableError("problem admits no KS assignment");
  return best;
}

struct PairExclusion {
  std::array<int, 2> pair;        // vertex indices of the pinned pair
  bool unsat = false;
  std::vector<int> forced_ones;   // vertices propagation forces to 1
};

struct PairExclusionReport {
  std::vector<PairExclusion> pairs;
  bool all_unsat = false;
};

/// For a problem isomorphic to the 13-ray graph: pins every unordered pair
/// of degree-3 vertices (the h-rays) to 1 and reports UNSAT per pair,
/// aggregating the "at most one h takes value 1" statement.
inline PairExclusionReport pairwise_h_exclusion(const ColoringProblem& p) {
  auto iso = labeled_isomorphism(delta13(), p.graph);
  if (!iso)
    throw GraphMismatchError("graph is not isomorphic to the 13-ray orthogonality graph");
  // Canonical order puts h0..h3 at indices 9..12.
  std::array<int, 4> h{(*iso)[9], (*iso)[10], (*iso)[11], (*iso)[12]};
  PairExclusionReport report;
  report.all_unsat = true;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      PairExclusion entry;
      entry.pair = {h[a], h[b]};
      std::vector<std::pair<int, int>> pins{{h[a], 1}, {h[b], 1}};
      entry.unsat = !ks_colorable(p, pins).has_value();
      entry.forced_ones = forced_ones_from_pins(p, pins);
      report.all_unsat = report.all_unsat && entry.unsat;
      report.pairs.push_back(std::move(entry));
    }
  return report;
}

}  // namespace ksv
