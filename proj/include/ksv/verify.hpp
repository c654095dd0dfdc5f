#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksv/coloring.hpp"
#include "ksv/io.hpp"
#include "ksv/mcsim.hpp"

namespace ksv {

struct VerifyOptions {
  double eps = 1e-9;
  std::uint64_t witness_limit = 64;  // cap on listed assignments and maximizers
};

namespace detail {

inline json assignment_to_json(const OrthGraph& g, std::uint64_t ones) {
  json out;
  for (int v = 0; v < g.n(); ++v) out[g.label(v)] = static_cast<int>((ones >> v) & 1);
  return out;
}

inline json sign_assignment_to_json(const SignAssignment& a) {
  json out;
  for (const auto& [label, sign] : a.entries) out[label] = sign;
  return out;
}

// op == (num/den) * I, exactly on the exact backend and within eps otherwise.
inline bool matches_identity_multiple(const Operator& op, const Rational& want, double eps) {
  auto multiple = identity_multiple(op, eps);
  if (!multiple) return false;
  if (multiple->is_exact()) return multiple->rat() == want;
  return std::abs(multiple->to_complex().real() - want.to_double()) <= eps &&
         std::abs(multiple->to_complex().imag()) <= eps;
}

inline bool scalar_matches(const Scalar& got, const Rational& want, double eps) {
  if (got.is_exact()) return got.rat() == want;
  return std::abs(got.to_complex().real() - want.to_double()) <= eps &&
         std::abs(got.to_complex().imag()) <= eps;
}

// The two reference maximizers: -1 exactly on {z1, y2-, y3+, h3} and on
// {z1, y2-, y3+, y1-, h3}, expressed through iso for relabeled inputs.
inline std::vector<SignAssignment> reference_maximizers(const OrthGraph& g,
                                                        const std::vector<int>& iso) {
  std::vector<SignAssignment> out;
  for (const auto& canon : {std::vector<int>{0, 4, 8, 12}, std::vector<int>{0, 3, 4, 8, 12}}) {
    std::uint64_t minus = 0;
    for (int c : canon) minus |= std::uint64_t{1} << iso[c];
    SignAssignment a;
    for (int v = 0; v < g.n(); ++v)
      a.entries.emplace_back(g.label(v), ((minus >> v) & 1) ? -1 : +1);
    out.push_back(std::move(a));
  }
  return out;
}

inline bool same_assignment(const SignAssignment& a, const SignAssignment& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (const auto& [label, sign] : a.entries)
    if (b.at(label) != sign) return false;
  return true;
}

}  // namespace detail

/// The full claim suite for a ray set.  On a set realizing the 13-ray graph
/// this checks every quantitative claim (graph shape, coloring structure,
/// bounds, operator identities); on other sets it reports the generic
/// pipeline (graph, colorability, induced bound, state-independence test).
/// Check failures are collected, never short-circuited; structural
/// impossibilities (parse errors, oversize inputs) throw.
inline Report run_verify(const RaySet& rs, const VerifyOptions& opts = {}) {
  Report report;
  OrthGraph g = build_graph(rs, opts.eps);
  report.data["name"] = rs.name();
  report.data["dimension"] = rs.dim();
  report.data["rays"] = rs.size();
  report.data["edges"] = g.edge_count();
  json hist;
  for (auto [deg, count] : g.degree_histogram()) hist[std::to_string(deg)] = count;
  report.data["degree_histogram"] = std::move(hist);

  auto iso = labeled_isomorphism(delta13(), g);
  report.data["standard_13_ray_graph"] = iso.has_value();

  auto bases = basis_cliques(g, rs.dim());
  report.data["bases"] = [&] {
    json arr = json::array();
    for (const auto& basis : bases) arr.push_back(clique_labels(g, basis));
    return arr;
  }();

  ColoringProblem problem{g, bases};

  if (iso) {
    report.check("orthogonality graph has 24 edges", g.edge_count() == 24,
                 "found " + std::to_string(g.edge_count()));
    auto dh = g.degree_histogram();
    bool degrees_ok = dh.size() == 2 && dh[3] == 4 && dh[4] == 9;
    report.check("nine vertices of degree 4 and four of degree 3", degrees_ok);

    // The four complete bases: the z triangle and the three z_k, y_k-, y_k+.
    std::vector<std::vector<int>> expected;
    for (const auto& canon :
         {std::vector<int>{0, 1, 2}, std::vector<int>{0, 3, 6}, std::vector<int>{1, 4, 7},
          std::vector<int>{2, 5, 8}}) {
      std::vector<int> b;
      for (int c : canon) b.push_back((*iso)[c]);
      std::sort(b.begin(), b.end());
      expected.push_back(std::move(b));
    }
    std::sort(expected.begin(), expected.end());
    auto found = bases;
    std::sort(found.begin(), found.end());
    report.check("exactly four complete bases, the z triangle and the three z-y triangles",
                 found == expected);

    auto enumeration = enumerate_ks(problem, opts.witness_limit);
    report.data["ks_assignment_count"] = enumeration.count;
    report.data["ks_assignments"] = [&] {
      json arr = json::array();
      for (auto ones : enumeration.assignments)
        arr.push_back(detail::assignment_to_json(g, ones));
      return arr;
    }();
    report.check("KS value assignments exist", enumeration.count > 0,
                 std::to_string(enumeration.count) + " assignments");

    std::vector<int> h_vertices{(*iso)[9], (*iso)[10], (*iso)[11], (*iso)[12]};
    auto h_max = max_subset_sum(problem, h_vertices);
    report.data["h_sum_max"] = h_max.max;
    report.data["h_sum_witness"] = detail::assignment_to_json(g, h_max.witness);
    report.check("KS assignments put at most one 1 on the four h rays, and one does",
                 h_max.max == 1, "max " + std::to_string(h_max.max));

    auto exclusion = pairwise_h_exclusion(problem);
    report.data["h_pair_exclusions"] = [&] {
      json arr = json::array();
      for (const auto& entry : exclusion.pairs) {
        json e;
        e["pair"] = json::array({g.label(entry.pair[0]), g.label(entry.pair[1])});
        e["unsat"] = entry.unsat;
        json forced = json::array();
        for (int v : entry.forced_ones) forced.push_back(g.label(v));
        e["forced_ones"] = std::move(forced);
        arr.push_back(std::move(e));
      }
      return arr;
    }();
    report.check("no KS assignment sets any two h rays to 1", exclusion.all_unsat);

    // Independence-pair property behind the combinatorial bound proof.
    std::vector<int> degree4;
    for (int v = 0; v < g.n(); ++v)
      if (g.degree(v) == 4) degree4.push_back(v);
    report.check("every 4-subset of the degree-4 vertices contains an edge",
                 independent_pair_free(g, degree4, 4));

    Inequality mc = magic_cube_inequality(g);
    auto bound = classical_bound(mc);
    report.data["classical_bound"] = scalar_to_json(bound.bound);
    report.data["maximizer_count"] = bound.maximizer_count;
    report.data["maximizers"] = [&] {
      json arr = json::array();
      std::uint64_t kept = 0;
      for (const auto& m : bound.maximizers) {
        if (kept++ >= opts.witness_limit) break;
        arr.push_back(detail::sign_assignment_to_json(m));
      }
      return arr;
    }();
    report.check("noncontextual bound of the pairwise form is 8",
                 bound.bound == Scalar(8), "bound " + bound.bound.to_string());

    auto refs = detail::reference_maximizers(g, *iso);
    bool both_present = true;
    for (const auto& ref : refs) {
      bool present = false;
      for (const auto& m : bound.maximizers)
        present = present || detail::same_assignment(ref, m);
      both_present = both_present && present;
    }
    report.check("both reference maximizers attain the bound", both_present);

    bool shortcut_ok = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << 13) && shortcut_ok; ++mask) {
      auto a = assignment_from_mask(mc.vertices, mask);
      shortcut_ok = evaluate(mc, a) == appendix_value(g, a);
    }
    report.check("the 1 + t + f - 2l shortcut matches direct evaluation on all 8192 assignments",
                 shortcut_ok);

    // Projector-sum identities for the three vertex families.
    auto family_sum = [&](int lo, int hi) {
      std::vector<Ray> rays;
      for (int c = lo; c <= hi; ++c) rays.push_back(rs.ray((*iso)[c]));
      return sum_of_projectors(rays);
    };
    report.check("the three z projectors sum to the identity",
                 detail::matches_identity_multiple(family_sum(0, 2), Rational(1), opts.eps));
    report.check("the six y projectors sum to twice the identity",
                 detail::matches_identity_multiple(family_sum(3, 8), Rational(2), opts.eps));
    report.check("the four h projectors sum to 4/3 of the identity",
                 detail::matches_identity_multiple(family_sum(9, 12), Rational(4, 3), opts.eps));

    auto violation = violation_report(mc, rs, std::nullopt, opts.eps);
    report.data["quantum_value"] = scalar_to_json(violation.quantum);
    report.data["margin"] = scalar_to_json(violation.margin);
    report.check("the inequality operator is 25/3 of the identity",
                 violation.state_independent &&
                     detail::scalar_matches(violation.quantum, Rational(25, 3), opts.eps));
    report.check("quantum-classical margin is 1/3",
                 detail::scalar_matches(violation.margin, Rational(1, 3), opts.eps));

    Inequality hsub = h_subset_inequality(g);
    hsub.classical_bound_value = Scalar(h_max.max);
    auto h_violation = violation_report(hsub, rs, std::nullopt, opts.eps);
    report.data["h_quantum_value"] = scalar_to_json(h_violation.quantum);
    report.check("the h projector total has quantum value 4/3 against KS maximum 1",
                 detail::scalar_matches(h_violation.quantum, Rational(4, 3), opts.eps) &&
                     h_max.max == 1);
    return report;
  }

  // Generic pipeline for sets that do not realize the 13-ray graph.
  if (g.n() <= kMaxEnumerationVertices) {
    auto enumeration = enumerate_ks(problem, opts.witness_limit);
    report.data["ks_assignment_count"] = enumeration.count;
    report.data["ks_assignments"] = [&] {
      json arr = json::array();
      for (auto ones : enumeration.assignments)
        arr.push_back(detail::assignment_to_json(g, ones));
      return arr;
    }();
    report.check("KS value assignments exist", enumeration.count > 0,
                 std::to_string(enumeration.count) + " assignments");
  } else {
    auto witness = ks_colorable(problem);
    report.data["ks_colorable"] = witness.has_value();
    if (witness) report.data["ks_witness"] = detail::assignment_to_json(g, *witness);
    report.check("KS value assignments exist", witness.has_value());
  }

  if (g.n() <= kMaxExhaustiveVertices) {
    Inequality induced = induced_inequality(g);
    auto bound = classical_bound(induced);
    report.data["classical_bound"] = scalar_to_json(bound.bound);
    report.data["maximizer_count"] = bound.maximizer_count;
    auto violation = violation_report(induced, rs, std::nullopt, opts.eps);
    report.data["state_independent"] = violation.state_independent;
    report.data["quantum_value"] = scalar_to_json(violation.quantum);
    report.data["margin"] = scalar_to_json(violation.margin);
    if (!violation.spectrum.empty()) report.data["spectrum"] = violation.spectrum;
    report.check("the induced inequality operator is a multiple of the identity",
                 violation.state_independent);
  }
  return report;
}

}  // namespace ksv
