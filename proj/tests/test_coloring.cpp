#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include <ksv/coloring.hpp>
#include <ksv/rayset.hpp>

#include "oracles.hpp"

using namespace ksv;

namespace {

ColoringProblem standard_problem() { return problem_for(yu_oh_13()); }

std::vector<std::uint32_t> oracle_masks() {
  auto edges = oracle::edges();
  return oracle::ks_masks(edges, oracle::triangles(edges, 13), 13);
}

// Uncolorable instance: K4 with its four triangles as bases.  One 1 per
// triangle forces two adjacent 1s somewhere.
ColoringProblem k4_problem() {
  OrthGraph g(std::vector<std::string>{"a", "b", "c", "d"});
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) g.add_edge(u, v);
  return make_problem(g, basis_cliques(g, 3));
}

}  // namespace

TEST_CASE("KS assignment enumeration matches the brute-force filter") {
  auto p = standard_problem();
  auto expected = oracle_masks();
  REQUIRE(expected.size() == 24);

  auto e = enumerate_ks(p, 64);
  CHECK(e.count == expected.size());
  REQUIRE(e.assignments.size() == expected.size());

  // Same set of assignments (library order is lexicographic by vertex value,
  // oracle order is ascending mask; compare as sets)
  std::set<std::uint64_t> got(e.assignments.begin(), e.assignments.end());
  std::set<std::uint64_t> want(expected.begin(), expected.end());
  CHECK(got == want);

  // Library order: vertex 0 outermost, value 0 before 1
  for (std::size_t i = 1; i < e.assignments.size(); ++i) {
    std::uint64_t prev = e.assignments[i - 1], cur = e.assignments[i];
    int v = 0;
    while (v < 13 && ((prev >> v) & 1) == ((cur >> v) & 1)) ++v;
    REQUIRE(v < 13);
    CHECK(((prev >> v) & 1) == 0);
  }
}

TEST_CASE("ks_satisfies agrees with the constraint definition on all masks") {
  auto p = standard_problem();
  auto expected = oracle_masks();
  std::set<std::uint32_t> member(expected.begin(), expected.end());
  for (std::uint32_t mask = 0; mask < (1u << 13); ++mask)
    REQUIRE(ks_satisfies(p, mask) == (member.count(mask) != 0));
}

TEST_CASE("enumeration truncates the list but never the count") {
  auto p = standard_problem();
  auto e = enumerate_ks(p, 5);
  CHECK(e.count == 24);
  CHECK(e.assignments.size() == 5);
  auto full = enumerate_ks(p, 64);
  for (int i = 0; i < 5; ++i) CHECK(e.assignments[i] == full.assignments[i]);
}

TEST_CASE("max subset sum over the h rays is 1, attained") {
  auto p = standard_problem();
  std::vector<int> h{9, 10, 11, 12};
  auto res = max_subset_sum(p, h);
  CHECK(res.max == 1);
  CHECK(ks_satisfies(p, res.witness));

  // Oracle cross-check over every assignment
  int oracle_max = 0;
  for (auto mask : oracle_masks()) {
    int sum = 0;
    for (int v : h) sum += (mask >> v) & 1;
    oracle_max = std::max(oracle_max, sum);
    CHECK(sum <= 1);
  }
  CHECK(oracle_max == 1);

  // Every assignment has exactly one 1 on the z triangle
  auto zres = max_subset_sum(p, {0, 1, 2});
  CHECK(zres.max == 1);
}

TEST_CASE("all six h pairs are jointly excluded") {
  auto p = standard_problem();
  auto report = pairwise_h_exclusion(p);
  REQUIRE(report.pairs.size() == 6);
  CHECK(report.all_unsat);
  for (const auto& entry : report.pairs) {
    CHECK(entry.unsat);
    CHECK_FALSE(entry.forced_ones.empty());
    // Propagation's forced vertices are sound: every completion respects them,
    // so pinning the pair plus negating a forced vertex is also unsat
    for (int forced : entry.forced_ones) {
      std::vector<std::pair<int, int>> pins{{entry.pair[0], 1}, {entry.pair[1], 1},
                                            {forced, 0}};
      CHECK_FALSE(ks_colorable(p, pins).has_value());
    }
  }
  // Oracle: no mask carries two h ones
  for (auto mask : oracle_masks())
    for (int a = 9; a <= 12; ++a)
      for (int b = a + 1; b <= 12; ++b)
        CHECK_FALSE((((mask >> a) & 1) && ((mask >> b) & 1)));
}

TEST_CASE("pairwise exclusion requires the canonical graph") {
  RaySet rs("short", 3);
  RaySet full = yu_oh_13();
  for (int i = 0; i < 12; ++i) rs.add(full.ray(i));
  CHECK_THROWS_AS(pairwise_h_exclusion(problem_for(rs)), GraphMismatchError);
}

TEST_CASE("colorability search honors pins and is deterministic") {
  auto p = standard_problem();
  auto w1 = ks_colorable(p);
  auto w2 = ks_colorable(p);
  REQUIRE(w1.has_value());
  CHECK(*w1 == *w2);
  CHECK(ks_satisfies(p, *w1));

  // Pinning a vertex to 1 forces it in the witness
  auto pinned = ks_colorable(p, {{9, 1}});
  REQUIRE(pinned.has_value());
  CHECK(((*pinned >> 9) & 1) == 1);
  CHECK(ks_satisfies(p, *pinned));

  // Contradictory pins on an edge
  CHECK_FALSE(ks_colorable(p, {{0, 1}, {1, 1}}).has_value());
  CHECK_THROWS_AS(ks_colorable(p, {{99, 1}}), Error);
}

TEST_CASE("an uncolorable problem reports no witness and no maximum") {
  auto p = k4_problem();
  CHECK_FALSE(ks_colorable(p).has_value());
  CHECK(enumerate_ks(p, 8).count == 0);
  CHECK_THROWS_AS(max_subset_sum(p, {0, 1}), UncolorableError);
}

TEST_CASE("enumeration guards the vertex budget") {
  std::vector<std::string> labels;
  for (int i = 0; i < 31; ++i) labels.push_back("v" + std::to_string(i));
  OrthGraph g(labels);
  ColoringProblem p{g, {}};
  CHECK_THROWS_AS(enumerate_ks(p, 4), TooLargeError);
}

TEST_CASE("the split between assignments with and without an h one is 12/12") {
  int with_h = 0;
  for (auto mask : oracle_masks())
    if (mask >> 9) ++with_h;
  CHECK(with_h == 12);

  auto p = standard_problem();
  auto e = enumerate_ks(p, 64);
  int lib_with_h = 0;
  for (auto mask : e.assignments)
    if (mask >> 9) ++lib_with_h;
  CHECK(lib_with_h == 12);
}
