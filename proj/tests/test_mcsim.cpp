#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include <ksv/bounds.hpp>
#include <ksv/density.hpp>
#include <ksv/mcsim.hpp>
#include <ksv/orthograph.hpp>
#include <ksv/rayset.hpp>
#include <ksv/rng.hpp>

using namespace ksv;

namespace {

Inequality magic_cube() { return magic_cube_inequality(build_graph(yu_oh_13())); }

HVModel point_model(const Inequality& q, std::uint64_t minus) {
  HVModel m;
  m.support.push_back(assignment_from_mask(q.vertices, minus));
  m.weights.push_back(Scalar(1));
  return m;
}

}  // namespace

TEST_CASE("the default plan covers every nonzero term exactly once") {
  Inequality q = magic_cube();
  auto plan = default_plan(q, 100, 1);
  CHECK(plan.shots_per_term == 100);
  CHECK(plan.seed == 1);
  int singles = 0, pairs = 0;
  for (const auto& term : plan.terms) term.is_pair() ? ++pairs : ++singles;
  CHECK(singles == 13);
  CHECK(pairs == 24);
  CHECK_NOTHROW(validate_plan(plan, q));

  SECTION("coverage violations are named") {
    auto missing = plan;
    missing.terms.pop_back();
    CHECK_THROWS_AS(validate_plan(missing, q), PlanMismatchError);

    auto doubled = plan;
    doubled.terms.push_back(doubled.terms[0]);
    CHECK_THROWS_AS(validate_plan(doubled, q), PlanMismatchError);

    auto swapped_pair = plan;  // measuring (v, u) instead of (u, v) still covers it
    for (auto& term : swapped_pair.terms)
      if (term.is_pair()) std::swap(term.u, term.v);
    CHECK_NOTHROW(validate_plan(swapped_pair, q));

    auto zero_shots = plan;
    zero_shots.shots_per_term = 0;
    CHECK_THROWS_AS(validate_plan(zero_shots, q), Error);

    auto unknown = plan;
    unknown.terms[0].u = "nope";
    CHECK_THROWS_AS(validate_plan(unknown, q), Error);
  }
}

TEST_CASE("joint distributions are exact and order-symmetric") {
  RaySet rs = yu_oh_13();
  auto rho = pure_state(rs.ray("z1"));

  // Measuring (z1, z2) on |z1>: the first outcome is -1 (on the ray), the
  // second +1, with certainty.  Outcome order (-1,-1), (-1,+1), (+1,-1), (+1,+1).
  auto dist = joint_distribution(rho, rs.ray("z1"), rs.ray("z2"));
  CHECK(dist[0] == Scalar(0));
  CHECK(dist[1] == Scalar(1));
  CHECK(dist[2] == Scalar(0));
  CHECK(dist[3] == Scalar(0));

  auto mixed = maximally_mixed(3);
  for (const auto& [a, b] :
       std::vector<std::pair<std::string, std::string>>{{"z1", "z2"}, {"h0", "y1-"}}) {
    auto d_ab = joint_distribution(mixed, rs.ray(a), rs.ray(b));
    auto d_ba = joint_distribution(mixed, rs.ray(b), rs.ray(a));
    Scalar total(0);
    for (const auto& p : d_ab) total += p;
    CHECK(total == Scalar(1));
    CHECK(d_ab[0] == d_ba[0]);  // (-1,-1) symmetric
    CHECK(d_ab[1] == d_ba[2]);  // (-1,+1) vs (+1,-1)
    CHECK(d_ab[2] == d_ba[1]);
    CHECK(d_ab[3] == d_ba[3]);
  }

  // Mixed state on an orthogonal pair: both -1 is impossible, each marginal 1/3
  auto d = joint_distribution(mixed, rs.ray("z1"), rs.ray("z2"));
  CHECK(d[0] == Scalar(0));
  CHECK(d[1] == Scalar(Rational(1, 3)));
  CHECK(d[2] == Scalar(Rational(1, 3)));
  CHECK(d[3] == Scalar(Rational(1, 3)));
}

TEST_CASE("single-ray sampling frequencies match the projector weight") {
  RaySet rs = yu_oh_13();
  auto mixed = maximally_mixed(3);
  Rng rng(21);
  const int shots = 30000;
  int minus = 0;
  for (int i = 0; i < shots; ++i)
    if (sample_single(mixed, rs.ray("h0"), rng) == -1) ++minus;
  double p = 1.0 / 3.0;  // tr(rho P) for the mixed state
  double se = std::sqrt(p * (1 - p) / shots);
  CHECK(std::abs(minus / double(shots) - p) < 5 * se);
}

TEST_CASE("pair sampling respects exclusion on orthogonal rays") {
  RaySet rs = yu_oh_13();
  auto mixed = maximally_mixed(3);
  Rng rng(22);
  for (int i = 0; i < 2000; ++i) {
    auto [a, b] = sample_pair(mixed, rs.ray("z1"), rs.ray("z2"), rng);
    CHECK_FALSE((a == -1 && b == -1));
  }
}

TEST_CASE("quantum estimates are deterministic per seed and track 25/3") {
  Inequality q = magic_cube();
  RaySet rs = yu_oh_13();
  auto mixed = maximally_mixed(3);

  auto plan = default_plan(q, 20000, 5);
  auto a = estimate_quantum(mixed, q, rs, plan);
  auto b = estimate_quantum(mixed, q, rs, plan);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  REQUIRE(a.terms.size() == b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    CHECK(a.terms[i].estimate == b.terms[i].estimate);
    CHECK(a.terms[i].std_error == b.terms[i].std_error);
  }

  auto other = estimate_quantum(mixed, q, rs, default_plan(q, 20000, 6));
  CHECK(a.estimate != other.estimate);

  CHECK(std::abs(a.estimate - 25.0 / 3.0) <= 5 * a.std_error);

  auto pure = estimate_quantum(pure_state(rs.ray("z1")), q, rs, plan);
  CHECK(std::abs(pure.estimate - 25.0 / 3.0) <= 5 * pure.std_error);
}

TEST_CASE("term weights expose the doubled quadratic convention") {
  Inequality q = magic_cube();
  RaySet rs = yu_oh_13();
  auto report = estimate_quantum(maximally_mixed(3), q, rs, default_plan(q, 10, 0));
  for (const auto& t : report.terms) {
    if (t.term.is_pair())
      CHECK(t.weight == -0.5);  // 2 * (-1/4)
    else
      CHECK(t.weight == 1.0);
  }
}

TEST_CASE("hidden-variable sampling reproduces model expectations") {
  Inequality q = magic_cube();

  SECTION("point maximizer is exact with zero error") {
    // minus set {z1, y2-, y3+, h3} = canonical indices {0, 4, 8, 12}
    std::uint64_t minus = (1ull << 0) | (1ull << 4) | (1ull << 8) | (1ull << 12);
    HVModel m = point_model(q, minus);
    auto report = estimate_hv(m, q, default_plan(q, 500, 9));
    CHECK(report.estimate == 8.0);
    CHECK(report.std_error == 0.0);
    CHECK(hv_expectation(m, q) == Scalar(8));
  }

  SECTION("mixtures stay near their exact expectation") {
    Inequality bound_q = magic_cube();
    auto maximizers = classical_bound(bound_q).maximizers;
    HVModel m;
    m.support = {maximizers[0], maximizers[5], maximizers[9]};
    m.weights = {Scalar(Rational(1, 2)), Scalar(Rational(1, 4)), Scalar(Rational(1, 4))};
    double exact = hv_expectation(m, q).real();
    auto report = estimate_hv(m, q, default_plan(q, 20000, 10));
    CHECK(std::abs(report.estimate - exact) <= 5 * report.std_error + 1e-9);
  }
}

TEST_CASE("standard errors shrink like the square root of the shot count") {
  Inequality q = magic_cube();
  RaySet rs = yu_oh_13();
  auto mixed = maximally_mixed(3);
  auto small = estimate_quantum(mixed, q, rs, default_plan(q, 4000, 3));
  auto large = estimate_quantum(mixed, q, rs, default_plan(q, 64000, 3));
  double ratio = small.std_error / large.std_error;
  CHECK(ratio > 2.5);  // ideal 4.0
  CHECK(ratio < 5.5);
}

TEST_CASE("estimators reject malformed requests") {
  Inequality q = magic_cube();
  RaySet rs = yu_oh_13();
  auto plan = default_plan(q, 100, 0);

  auto wrong_dim = maximally_mixed(2);
  CHECK_THROWS_AS(estimate_quantum(wrong_dim, q, rs, plan), Error);

  // HV estimation needs dichotomic observables
  Inequality proj = h_subset_inequality(build_graph(rs));
  HVModel m = point_model(q, 0);
  CHECK_THROWS_AS(estimate_hv(m, proj, default_plan(proj, 100, 0)), Error);

  // Model must cover the inequality vertices
  HVModel partial;
  SignAssignment a;
  a.entries.emplace_back("z1", 1);
  partial.support.push_back(a);
  partial.weights.push_back(Scalar(1));
  CHECK_THROWS_AS(estimate_hv(partial, q, plan), Error);
}
