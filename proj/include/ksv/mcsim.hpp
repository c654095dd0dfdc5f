#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ksv/bounds.hpp"
#include "ksv/density.hpp"
#include "ksv/rng.hpp"

namespace ksv {

/// One subensemble: a single observable (v empty) or a compatible pair.
struct MeasurementTerm {
  std::string u;
  std::string v;

  bool is_pair() const { return !v.empty(); }
};

struct MeasurementPlan {
  std::vector<MeasurementTerm> terms;
  std::uint64_t shots_per_term = 0;
  std::uint64_t seed = 0;
};

/// One term per nonzero linear coefficient (vertex order), then one per
/// nonzero unordered quadratic pair (lexicographic by index).
inline MeasurementPlan default_plan(const Inequality& q, std::uint64_t shots,
                                    std::uint64_t seed) {
  MeasurementPlan plan;
  plan.shots_per_term = shots;
  plan.seed = seed;
  int n = q.n();
  for (int v = 0; v < n; ++v)
    if (!q.linear[v].is_zero()) plan.terms.push_back({q.vertices[v], ""});
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!q.quadratic[u][v].is_zero())
        plan.terms.push_back({q.vertices[u], q.vertices[v]});
  return plan;
}

/// The plan must cover exactly the inequality's nonzero terms, once each.
inline void validate_plan(const MeasurementPlan& plan, const Inequality& q) {
  if (plan.shots_per_term == 0)
    throw Error(ErrorKind::input, "plan needs a positive number of shots per term");
  int n = q.n();
  std::vector<int> single_seen(n, 0);
  std::vector<std::vector<int>> pair_seen(n, std::vector<int>(n, 0));
  for (const auto& term : plan.terms) {
    int u = q.index_of(term.u);
    if (!term.is_pair()) {
      if (q.linear[u].is_zero())
        throw PlanMismatchError("plan measures '" + term.u +
                                "' which has a zero linear coefficient");
      if (single_seen[u]++)
        throw PlanMismatchError("plan measures '" + term.u + "' twice");
    } else {
      int v = q.index_of(term.v);
      if (u == v) throw PlanMismatchError("pair term repeats vertex '" + term.u + "'");
      if (q.quadratic[u][v].is_zero())
        throw PlanMismatchError("plan measures pair ('" + term.u + "', '" + term.v +
                                "') which has zero weight");
      if (pair_seen[u][v]++ || pair_seen[v][u])
        throw PlanMismatchError("plan measures pair ('" + term.u + "', '" + term.v +
                                "') twice");
    }
  }
  for (int v = 0; v < n; ++v)
    if (!q.linear[v].is_zero() && !single_seen[v])
      throw PlanMismatchError("plan misses vertex '" + q.vertices[v] + "'");
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!q.quadratic[u][v].is_zero() && !pair_seen[u][v] && !pair_seen[v][u])
        throw PlanMismatchError("plan misses pair ('" + q.vertices[u] + "', '" +
                                q.vertices[v] + "')");
}

/// Exact joint outcome distribution of a sequential compatible pair, in the
/// order (-1,-1), (-1,+1), (+1,-1), (+1,+1): P(a,b) = tr(rho Pi_a Pi_b) with
/// Pi_{-1} the ray projector and Pi_{+1} its complement.  Order of the two
/// measurements does not matter for commuting projectors.
inline std::array<Scalar, 4> joint_distribution(const DensityMatrix& rho, const Ray& u,
                                                const Ray& v, double eps = 1e-9) {
  Operator pu = projector(u);
  Operator pv = projector(v);
  if (!commutes(pu, pv, eps))
    throw NonCommutingPairError("projectors for '" + u.label + "' and '" + v.label +
                                "' do not commute");
  Operator cu = Operator::identity(u.dim) - pu;
  Operator cv = Operator::identity(v.dim) - pv;
  auto prob = [&](const Operator& a, const Operator& b) {
    return (rho.op() * (a * b)).trace();
  };
  return {prob(pu, pv), prob(pu, cv), prob(cu, pv), prob(cu, cv)};
}

/// Single dichotomic outcome: -1 with probability tr(rho P).
inline int sample_single(const DensityMatrix& rho, const Ray& v, Rng& rng) {
  double p_minus = (rho.op() * projector(v)).trace().real();
  return rng.uniform01() < p_minus ? -1 : +1;
}

/// One draw from the exact joint distribution of a compatible pair.
inline std::pair<int, int> sample_pair(const DensityMatrix& rho, const Ray& u, const Ray& v,
                                       Rng& rng, double eps = 1e-9) {
  auto joint = joint_distribution(rho, u, v, eps);
  double r = rng.uniform01();
  static constexpr std::pair<int, int> outcomes[4] = {{-1, -1}, {-1, +1}, {+1, -1}, {+1, +1}};
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += joint[k].real();
    if (r < acc) return outcomes[k];
  }
  return outcomes[3];
}

struct TermEstimate {
  MeasurementTerm term;
  double weight = 0.0;     // c_v for singles, 2 W_uv for pairs
  double estimate = 0.0;   // mean outcome value over the subensemble
  double std_error = 0.0;  // sample standard deviation / sqrt(shots)
};

struct EstimateReport {
  std::vector<TermEstimate> terms;
  double estimate = 0.0;   // weight-combined estimate of L
  double std_error = 0.0;  // sqrt of the weight-squared sum of term variances
  std::uint64_t shots_per_term = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline double term_weight(const Inequality& q, const MeasurementTerm& term) {
  int u = q.index_of(term.u);
  if (!term.is_pair()) return q.linear[u].real();
  // The ordered double sum counts each unordered pair twice.
  return 2.0 * q.quadratic[u][q.index_of(term.v)].real();
}

// Mean and standard error of a subensemble; shots below 2 report error 0.
inline std::pair<double, double> mean_and_error(const std::vector<double>& values) {
  double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// make_sampler(term) runs once per term (the place for exact precomputation);
// the sampler it returns runs once per shot.
template <typename MakeSampler>
EstimateReport run_plan(const MeasurementPlan& plan, const Inequality& q,
                        MakeSampler&& make_sampler) {
  EstimateReport report;
  report.shots_per_term = plan.shots_per_term;
  report.seed = plan.seed;
  std::vector<double> values(plan.shots_per_term);
  for (std::size_t i = 0; i < plan.terms.size(); ++i) {
    const auto& term = plan.terms[i];
    auto sampler = make_sampler(term);
    Rng rng = Rng::substream(plan.seed, i);
    for (auto& x : values) x = sampler(rng);
    auto [mean, err] = mean_and_error(values);
    TermEstimate te;
    te.term = term;
    te.weight = term_weight(q, term);
    te.estimate = mean;
    te.std_error = err;
    report.estimate += te.weight * mean;
    report.std_error += te.weight * te.weight * err * err;
    report.terms.push_back(std::move(te));
  }
  report.std_error = std::sqrt(report.std_error);
  return report;
}

}  // namespace detail

/// Quantum estimate of L: every term is sampled on its own subensemble with
/// its own RNG substream, so the report is deterministic for a given seed
/// and independent of scheduling.
inline EstimateReport estimate_quantum(const DensityMatrix& rho, const Inequality& q,
                                       const RaySet& rs, const MeasurementPlan& plan,
                                       double eps = 1e-9) {
  validate_plan(plan, q);
  bool projector_valued = q.kind == ObservableKind::projector;
  // Outcome -1 means "the ray projector fired"; projector-valued terms score
  // it as 1 and the complement as 0.
  auto score = [projector_valued](int a) { return projector_valued ? (1 - a) / 2.0 : a * 1.0; };
  using Sampler = std::function<double(Rng&)>;
  return detail::run_plan(plan, q, [&](const MeasurementTerm& term) -> Sampler {
    if (!term.is_pair()) {
      double p_minus = (rho.op() * projector(rs.ray(term.u))).trace().real();
      return [p_minus, score](Rng& rng) {
        return score(rng.uniform01() < p_minus ? -1 : +1);
      };
    }
    auto joint = joint_distribution(rho, rs.ray(term.u), rs.ray(term.v), eps);
    std::array<double, 4> cumulative{};
    std::array<double, 4> value{};
    static constexpr std::pair<int, int> outcomes[4] = {
        {-1, -1}, {-1, +1}, {+1, -1}, {+1, +1}};
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
      acc += joint[k].real();
      cumulative[k] = acc;
      value[k] = score(outcomes[k].first) * score(outcomes[k].second);
    }
    return [cumulative, value](Rng& rng) {
      double r = rng.uniform01();
      for (int k = 0; k < 3; ++k)
        if (r < cumulative[k]) return value[k];
      return value[3];
    };
  });
}

/// Hidden-variable estimate: each shot draws an assignment from the model
/// and reads off the deterministic term value.  Converges to hv_expectation.
inline EstimateReport estimate_hv(const HVModel& model, const Inequality& q,
                                  const MeasurementPlan& plan, double eps = 1e-9) {
  if (q.kind != ObservableKind::dichotomic)
    throw Error(ErrorKind::input, "hidden-variable sampling needs dichotomic observables");
  validate_hv_model(model, eps);
  validate_plan(plan, q);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& w : model.weights) {
    acc += w.real();
    cumulative.push_back(acc);
  }
  auto draw = [&cumulative, acc](Rng& rng) -> std::size_t {
    double r = rng.uniform01() * acc;  // acc absorbs eps-level weight slack
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (r < cumulative[mid]) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  };
  using Sampler = std::function<double(Rng&)>;
  return detail::run_plan(plan, q, [&](const MeasurementTerm& term) -> Sampler {
    // Deterministic per-assignment term values, tabulated once.
    std::vector<double> table;
    table.reserve(model.support.size());
    for (const auto& a : model.support) {
      double value = a.at(term.u);
      if (term.is_pair()) value *= a.at(term.v);
      table.push_back(value);
    }
    return [table = std::move(table), &draw](Rng& rng) { return table[draw(rng)]; };
  });
}

}  // namespace ksv
