#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ksv/coloring.hpp"
#include "ksv/density.hpp"
#include "ksv/linalg.hpp"
#include "ksv/operator.hpp"
#include "ksv/orthograph.hpp"

namespace ksv {

inline constexpr int kMaxExhaustiveVertices = 30;
inline constexpr std::size_t kMaxReportedMaximizers = 1024;

/// Total map from vertex labels to values in {+1, -1}.
struct SignAssignment {
  std::vector<std::pair<std::string, int>> entries;

  int at(const std::string& label) const {
    for (const auto& [l, s] : entries)
      if (l == label) return s;
    throw Error(ErrorKind::input, "assignment has no value for vertex '" + label + "'");
  }
};

inline SignAssignment assignment_from_mask(const std::vector<std::string>& vertices,
                                           std::uint64_t mask) {
  SignAssignment a;
  a.entries.reserve(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v)
    a.entries.emplace_back(vertices[v], ((mask >> v) & 1) ? -1 : +1);
  return a;
}

/// How a vertex's ray enters the quantum side: A = I - 2P (outcomes +-1) or
/// the bare projector P (outcomes 1/0).
enum class ObservableKind { dichotomic, projector };

/// L(a) = sum_v c_v a_v + sum_{u,v} W_uv a_u a_v with the ordered double sum,
/// so each unordered pair contributes 2 W_uv.
struct Inequality {
  std::string name;
  ObservableKind kind = ObservableKind::dichotomic;
  std::vector<std::string> vertices;
  std::vector<Scalar> linear;                  // c_v, aligned with vertices
  std::vector<std::vector<Scalar>> quadratic;  // symmetric, zero diagonal
  std::optional<Scalar> classical_bound_value;

  int n() const { return static_cast<int>(vertices.size()); }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == label) return static_cast<int>(i);
    throw Error(ErrorKind::input, "inequality has no vertex '" + label + "'");
  }
};

inline void validate_inequality(const Inequality& q) {
  std::size_t n = q.vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (q.vertices[i] == q.vertices[j])
        throw Error(ErrorKind::input, "duplicate inequality vertex '" + q.vertices[i] + "'");
  if (q.linear.size() != n)
    throw Error(ErrorKind::input, "linear coefficient count does not match vertex count");
  if (q.quadratic.size() != n)
    throw Error(ErrorKind::input, "quadratic matrix does not match vertex count");
  for (std::size_t u = 0; u < n; ++u) {
    if (q.quadratic[u].size() != n)
      throw Error(ErrorKind::input, "quadratic matrix is not square");
    if (!q.quadratic[u][u].is_zero())
      throw Error(ErrorKind::input, "quadratic matrix has a nonzero diagonal entry");
    for (std::size_t v = u + 1; v < n; ++v)
      if (!(q.quadratic[u][v] == q.quadratic[v][u]))
        throw Error(ErrorKind::input, "quadratic matrix is not symmetric");
  }
}

/// Unit linear terms plus weight -1/4 on every ordered adjacent pair of an
/// arbitrary orthogonality graph.
inline Inequality induced_inequality(const OrthGraph& g, std::string name = "induced") {
  Inequality q;
  q.name = std::move(name);
  int n = g.n();
  q.vertices.reserve(n);
  for (int v = 0; v < n; ++v) q.vertices.push_back(g.label(v));
  q.linear.assign(n, Scalar(1));
  q.quadratic.assign(n, std::vector<Scalar>(n, Scalar(0)));
  Scalar w(Rational(-1, 4));
  for (auto [u, v] : g.edges()) {
    q.quadratic[u][v] = w;
    q.quadratic[v][u] = w;
  }
  return q;
}

/// The induced form on the 13-ray graph.  Noncontextual bound 8, quantum
/// value 25/3.
inline Inequality magic_cube_inequality(const OrthGraph& g) {
  if (!labeled_isomorphism(delta13(), g))
    throw GraphMismatchError("graph is not isomorphic to the 13-ray orthogonality graph");
  return induced_inequality(g, "magic-cube");
}

/// Linear projector-valued form with coefficient 1 on the four degree-3
/// vertices.  Its classical side lives in the KS-assignment pipeline
/// (max over colorings), not in classical_bound.
inline Inequality h_subset_inequality(const OrthGraph& g) {
  auto iso = labeled_isomorphism(delta13(), g);
  if (!iso)
    throw GraphMismatchError("graph is not isomorphic to the 13-ray orthogonality graph");
  Inequality q;
  q.name = "h-subset";
  q.kind = ObservableKind::projector;
  for (int c = 9; c <= 12; ++c) q.vertices.push_back(g.label((*iso)[c]));
  q.linear.assign(4, Scalar(1));
  q.quadratic.assign(4, std::vector<Scalar>(4, Scalar(0)));
  return q;
}

/// Direct evaluation of L at a total sign assignment.
inline Scalar evaluate(const Inequality& q, const SignAssignment& a) {
  if (q.kind != ObservableKind::dichotomic)
    throw Error(ErrorKind::input, "sign assignments apply to dichotomic inequalities only");
  int n = q.n();
  std::vector<int> s(n);
  for (int v = 0; v < n; ++v) {
    s[v] = a.at(q.vertices[v]);
    if (s[v] != 1 && s[v] != -1)
      throw Error(ErrorKind::input, "assignment value must be +1 or -1");
  }
  Scalar total(0);
  for (int v = 0; v < n; ++v) total += q.linear[v] * Scalar(s[v]);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && !q.quadratic[u][v].is_zero())
        total += q.quadratic[u][v] * Scalar(s[u] * s[v]);
  return total;
}

namespace detail {

// Lexicographic key over assignments: vertex 0 most significant, +1 (bit 0)
// before -1 (bit 1).  Pure bit reversal over n bits, its own inverse.
inline std::uint64_t lex_key(std::uint64_t mask, int n) {
  std::uint64_t k = 0;
  for (int v = 0; v < n; ++v) k = (k << 1) | ((mask >> v) & 1);
  return k;
}

// Per-partition accumulator: exact max, maximizer count, and the lex-smallest
// keys capped at kMaxReportedMaximizers.  Merging is partition-independent.
template <typename V>
struct BoundCollector {
  bool any = false;
  V best{};
  std::uint64_t count = 0;
  std::priority_queue<std::uint64_t> keys;  // max-heap over lex keys

  void offer(const V& value, std::uint64_t key) {
    if (!any || best < value) {
      any = true;
      best = value;
      count = 1;
      keys = {};
      keys.push(key);
    } else if (value == best) {
      ++count;
      if (keys.size() < kMaxReportedMaximizers) {
        keys.push(key);
      } else if (key < keys.top()) {
        keys.pop();
        keys.push(key);
      }
    }
  }
};

// Numeric policies share the Gray-code scan: reset(mask) recomputes from
// scratch, flip(v, mask) applies an incremental update after bit v toggled,
// screen_below(best) may cheaply discard, value(mask) is the canonical value
// used for all comparisons (deterministic regardless of scan order).
template <typename Num>
struct ExactEngine {
  using Value = Num;
  int n;
  std::vector<Num> c;
  std::vector<Num> W;  // row-major n*n, symmetric, zero diagonal
  std::vector<int> sign;
  Num cur{};

  Num recompute(std::uint64_t mask) {
    for (int v = 0; v < n; ++v) sign[v] = ((mask >> v) & 1) ? -1 : 1;
    Num total{};
    for (int v = 0; v < n; ++v) total = total + scale(c[v], sign[v]);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        total = total + scale(W[u * n + v], 2 * sign[u] * sign[v]);
    return total;
  }
  static Num scale(const Num& x, int k) { return x * Num(k); }

  void reset(std::uint64_t mask) { cur = recompute(mask); }
  void flip(int v, std::uint64_t mask) {
    sign[v] = ((mask >> v) & 1) ? -1 : 1;
    Num row{};
    for (int u = 0; u < n; ++u) row = row + scale(W[v * n + u], sign[u]);
    cur = cur + scale(c[v] + row + row, 2 * sign[v]);
  }
  bool screen_below(const Value& best) const { return cur < best; }
  Value value(std::uint64_t) const { return cur; }
};

// Float path: the incremental value only screens (with drift margin and
// periodic resync); candidates are recomputed in a fixed summation order so
// results do not depend on partitioning.
struct FloatEngine {
  using Value = double;
  int n;
  std::vector<double> c;
  std::vector<double> W;
  std::vector<int> sign;
  double cur = 0.0;
  double margin = 0.0;
  std::uint32_t steps = 0;
  std::uint64_t last_mask = 0;

  double recompute(std::uint64_t mask) {
    for (int v = 0; v < n; ++v) sign[v] = ((mask >> v) & 1) ? -1 : 1;
    double total = 0.0;
    for (int v = 0; v < n; ++v) total += c[v] * sign[v];
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) total += 2.0 * W[u * n + v] * sign[u] * sign[v];
    return total;
  }

  void reset(std::uint64_t mask) {
    cur = recompute(mask);
    last_mask = mask;
    steps = 0;
  }
  void flip(int v, std::uint64_t mask) {
    last_mask = mask;
    if (++steps == 65536) {  // kill accumulated rounding drift
      reset(mask);
      return;
    }
    sign[v] = ((mask >> v) & 1) ? -1 : 1;
    double row = 0.0;
    for (int u = 0; u < n; ++u) row += W[v * n + u] * sign[u];
    cur += 2.0 * sign[v] * (c[v] + 2.0 * row);
  }
  bool screen_below(double best) const { return cur < best - margin; }
  double value(std::uint64_t mask) {
    double exactish = recompute(mask);
    cur = exactish;
    return exactish;
  }
};

template <typename Engine>
void scan_partition(Engine& eng, std::uint64_t prefix, int low_bits, int n,
                    BoundCollector<typename Engine::Value>& out) {
  std::uint64_t mask = prefix;
  eng.reset(mask);
  if (!out.any || !eng.screen_below(out.best))
    out.offer(eng.value(mask), lex_key(mask, n));
  std::uint64_t total = std::uint64_t{1} << low_bits;
  for (std::uint64_t i = 1; i < total; ++i) {
    int v = std::countr_zero(i);
    mask ^= std::uint64_t{1} << v;
    eng.flip(v, mask);
    if (!out.any || !eng.screen_below(out.best))
      out.offer(eng.value(mask), lex_key(mask, n));
  }
}

template <typename Engine>
std::pair<typename Engine::Value, BoundCollector<typename Engine::Value>> run_engine(
    const Engine& proto, int n, int threads) {
  using V = typename Engine::Value;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = std::max(1, hw);
  int prefix_bits = 0;
  if (n >= 20 && threads > 1) {
    while ((1 << prefix_bits) < threads && prefix_bits < n - 16) ++prefix_bits;
  }
  int low_bits = n - prefix_bits;
  std::uint64_t partitions = std::uint64_t{1} << prefix_bits;

  std::vector<BoundCollector<V>> results(partitions);
  if (partitions == 1) {
    Engine eng = proto;
    scan_partition(eng, 0, low_bits, n, results[0]);
  } else {
    std::vector<std::exception_ptr> errors(partitions);
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    int workers = std::min<int>(threads, static_cast<int>(partitions));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        (void)w;
        for (;;) {
          std::uint64_t p = next.fetch_add(1);
          if (p >= partitions) return;
          try {
            Engine eng = proto;
            scan_partition(eng, p << low_bits, low_bits, n, results[p]);
          } catch (...) {
            errors[p] = std::current_exception();
            return;
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Deterministic reduction: global max, summed counts, merged lex keys.
  BoundCollector<V> merged;
  for (auto& r : results) {
    if (!r.any) continue;
    if (!merged.any || merged.best < r.best) {
      merged.any = true;
      merged.best = r.best;
      merged.count = 0;
      merged.keys = {};
    }
    if (!(r.best < merged.best) && !(merged.best < r.best)) {
      merged.count += r.count;
      while (!r.keys.empty()) {
        std::uint64_t key = r.keys.top();
        r.keys.pop();
        if (merged.keys.size() < kMaxReportedMaximizers) {
          merged.keys.push(key);
        } else if (key < merged.keys.top()) {
          merged.keys.pop();
          merged.keys.push(key);
        }
      }
    }
  }
  return {merged.best, std::move(merged)};
}

inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  __int128 l = static_cast<__int128>(a) / std::gcd(a, b) * b;
  if (l > std::numeric_limits<std::int64_t>::max())
    throw OverflowError("denominator lcm exceeds the 64-bit range");
  return static_cast<std::int64_t>(l);
}

}  // namespace detail

struct ClassicalBoundResult {
  Scalar bound;
  std::vector<SignAssignment> maximizers;  // all when <= 1024, else lex-first 1024
  std::uint64_t maximizer_count = 0;
  bool truncated = false;
};

/// Exact maximum of L over all 2^n sign assignments by Gray-code exhaustion.
/// Fills q.classical_bound_value.  Partitioned across threads for large n;
/// the result is independent of the partitioning.
inline ClassicalBoundResult classical_bound(Inequality& q, int threads = 0) {
  validate_inequality(q);
  if (q.kind != ObservableKind::dichotomic)
    throw Error(ErrorKind::input,
                "sign-assignment exhaustion applies to dichotomic inequalities only");
  int n = q.n();
  if (n > kMaxExhaustiveVertices)
    throw TooLargeError("exhaustive bound limited to " +
                        std::to_string(kMaxExhaustiveVertices) + " vertices");

  bool exact = true;
  for (const auto& s : q.linear) exact = exact && s.is_exact();
  for (const auto& row : q.quadratic)
    for (const auto& s : row) exact = exact && s.is_exact();

  ClassicalBoundResult result;
  std::vector<std::uint64_t> keys;
  auto finish = [&](auto&& collector, Scalar bound) {
    result.bound = std::move(bound);
    result.maximizer_count = collector.count;
    result.truncated = collector.count > kMaxReportedMaximizers;
    while (!collector.keys.empty()) {
      keys.push_back(collector.keys.top());
      collector.keys.pop();
    }
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t key : keys)
      result.maximizers.push_back(assignment_from_mask(q.vertices, detail::lex_key(key, n)));
  };

  if (exact) {
    // Fast path: scale to a common denominator and run on int64 when safe.
    bool fits = true;
    std::int64_t den = 1;
    auto fold_den = [&](const Rational& r) {
      if (!fits) return;
      try {
        den = detail::checked_lcm(den, r.den());
      } catch (const OverflowError&) {
        fits = false;
      }
    };
    for (const auto& s : q.linear) fold_den(s.rat());
    for (const auto& row : q.quadratic)
      for (const auto& s : row) fold_den(s.rat());

    detail::ExactEngine<std::int64_t> ieng;
    if (fits) {
      ieng.n = n;
      ieng.sign.assign(n, 1);
      __int128 magnitude = 0;
      auto scaled = [&](const Rational& r) -> std::int64_t {
        __int128 v = static_cast<__int128>(r.num()) * (den / r.den());
        magnitude += v < 0 ? -v : v;
        return static_cast<std::int64_t>(v);
      };
      for (const auto& s : q.linear) ieng.c.push_back(scaled(s.rat()));
      for (const auto& row : q.quadratic)
        for (const auto& s : row) ieng.W.push_back(scaled(s.rat()));
      // Every intermediate stays within ~6x the total magnitude.
      if (magnitude > std::numeric_limits<std::int64_t>::max() / 8) fits = false;
    }
    if (fits) {
      auto [best, collector] = detail::run_engine(ieng, n, threads);
      finish(collector, Scalar(Rational(best) / Rational(den)));
    } else {
      detail::ExactEngine<Rational> reng;
      reng.n = n;
      reng.sign.assign(n, 1);
      for (const auto& s : q.linear) reng.c.push_back(s.rat());
      for (const auto& row : q.quadratic)
        for (const auto& s : row) reng.W.push_back(s.rat());
      auto [best, collector] = detail::run_engine(reng, n, threads);
      finish(collector, Scalar(best));
    }
  } else {
    detail::FloatEngine feng;
    feng.n = n;
    feng.sign.assign(n, 1);
    double scale = 0.0;
    auto real_part = [](const Scalar& s) {
      if (s.imag() != 0.0)
        throw Error(ErrorKind::input, "inequality coefficients must be real");
      return s.real();
    };
    for (const auto& s : q.linear) {
      feng.c.push_back(real_part(s));
      scale += std::abs(feng.c.back());
    }
    for (const auto& row : q.quadratic)
      for (const auto& s : row) {
        feng.W.push_back(real_part(s));
        scale += std::abs(feng.W.back());
      }
    feng.margin = 1e-7 * (1.0 + scale);
    auto [best, collector] = detail::run_engine(feng, n, threads);
    finish(collector, Scalar::floating(best));
  }
  q.classical_bound_value = result.bound;
  return result;
}

/// Combinatorial shortcut for the 13-vertex inequality: with t the number of
/// -1 values, f those on degree-4 vertices, and l the edges with both ends
/// -1, the value is 1 + t + f - 2l.
inline Scalar appendix_value(const OrthGraph& g, const SignAssignment& a) {
  if (!labeled_isomorphism(delta13(), g))
    throw GraphMismatchError("graph is not isomorphic to the 13-ray orthogonality graph");
  int n = g.n();
  std::vector<int> s(n);
  for (int v = 0; v < n; ++v) {
    s[v] = a.at(g.label(v));
    if (s[v] != 1 && s[v] != -1)
      throw Error(ErrorKind::input, "assignment value must be +1 or -1");
  }
  int t = 0, f = 0, l = 0;
  for (int v = 0; v < n; ++v)
    if (s[v] == -1) {
      ++t;
      if (g.degree(v) == 4) ++f;
    }
  for (auto [u, v] : g.edges())
    if (s[u] == -1 && s[v] == -1) ++l;
  return Scalar(1 + t + f - 2 * l);
}

/// Sum of c_v A_v plus the ordered double sum of W_uv A_u A_v, where A_v is
/// I - 2P_v (dichotomic) or P_v (projector).  Every weighted pair must
/// commute, otherwise the quantum side is not well defined.
inline Operator quantum_operator(const Inequality& q, const RaySet& rs, double eps = 1e-9) {
  validate_inequality(q);
  int n = q.n();
  std::vector<Operator> A;
  A.reserve(n);
  for (const auto& label : q.vertices) {
    const Ray& r = rs.ray(label);
    A.push_back(q.kind == ObservableKind::dichotomic ? observable(r) : projector(r));
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (q.quadratic[u][v].is_zero()) continue;
      if (!commutes(A[u], A[v], eps))
        throw NonCommutingPairError("observables for '" + q.vertices[u] + "' and '" +
                                    q.vertices[v] + "' do not commute");
    }
  Operator total = Scalar(0) * Operator::identity(rs.dim());
  for (int v = 0; v < n; ++v)
    if (!q.linear[v].is_zero()) total = total + q.linear[v] * A[v];
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && !q.quadratic[u][v].is_zero())
        total = total + q.quadratic[u][v] * (A[u] * A[v]);
  return total;
}

struct ViolationReport {
  Scalar classical;
  Scalar quantum;
  Scalar margin;
  bool state_independent = false;
  std::optional<Scalar> identity_multiple_value;
  std::vector<double> spectrum;  // ascending; filled when the operator is not c*I
};

/// Classical bound vs quantum value.  Without a state, a scalar multiple of
/// the identity proves state-independence and supplies the quantum value;
/// otherwise the report falls back to the top of the spectrum.
inline ViolationReport violation_report(const Inequality& q, const RaySet& rs,
                                        const std::optional<DensityMatrix>& rho = std::nullopt,
                                        double eps = 1e-9) {
  ViolationReport r;
  if (q.classical_bound_value) {
    r.classical = *q.classical_bound_value;
  } else if (q.kind == ObservableKind::dichotomic) {
    Inequality work = q;
    r.classical = classical_bound(work).bound;
  } else {
    throw Error(ErrorKind::input,
                "projector-valued inequality needs an externally computed classical bound");
  }
  Operator op = quantum_operator(q, rs, eps);
  auto multiple = identity_multiple(op, eps);
  r.state_independent = multiple.has_value();
  if (multiple) r.identity_multiple_value = *multiple;
  if (!multiple) r.spectrum = hermitian_eigenvalues(op);
  if (rho) {
    r.quantum = expectation(op, *rho, eps);
  } else if (multiple) {
    r.quantum = *multiple;
  } else {
    r.quantum = Scalar::floating(r.spectrum.back());
  }
  r.margin = r.quantum - r.classical;
  return r;
}

/// Noncontextual hidden-variable model: a distribution over sign assignments.
struct HVModel {
  std::vector<SignAssignment> support;
  std::vector<Scalar> weights;
};

inline void validate_hv_model(const HVModel& m, double eps = 1e-9) {
  if (m.weights.size() != m.support.size())
    throw WeightMismatchError("model has " + std::to_string(m.support.size()) +
                              " assignments but " + std::to_string(m.weights.size()) +
                              " weights");
  Scalar sum(0);
  for (const auto& w : m.weights) {
    if (w.imag() != 0.0 || w.real() < -eps)
      throw Error(ErrorKind::input, "model weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum.real() - 1.0) > eps || sum.imag() != 0.0)
    throw Error(ErrorKind::input, "model weights must sum to 1");
}

/// Model average of L: sum over the support of weight times value.  Never
/// exceeds the classical bound.
inline Scalar hv_expectation(const HVModel& m, const Inequality& q, double eps = 1e-9) {
  validate_hv_model(m, eps);
  Scalar total(0);
  for (std::size_t i = 0; i < m.support.size(); ++i)
    total += m.weights[i] * evaluate(q, m.support[i]);
  return total;
}

}  // namespace ksv
