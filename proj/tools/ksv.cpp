#include <complex>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <ksv/ksv.hpp>

namespace {

using ksv::json;

struct SourcedRaySet {
  ksv::RaySet rays;
  std::string source;
  std::string digest;
};

SourcedRaySet load_set_arg(const std::string& arg) {
  if (arg == "yu-oh-13") {
    ksv::RaySet rs = ksv::yu_oh_13();
    std::string digest = ksv::digest_string(ksv::rayset_to_json(rs).dump());
    return {std::move(rs), arg, std::move(digest)};
  }
  std::string text = ksv::read_text_file(arg);
  return {ksv::rayset_from_json(ksv::parse_json_text(text)), arg, ksv::digest_string(text)};
}

struct SourcedInequality {
  std::optional<std::string> preset;
  std::optional<ksv::Inequality> inequality;
  std::string source;
  std::string digest;

  // Presets are built against the graph of the set the command runs on.
  ksv::Inequality resolve(const ksv::OrthGraph& g) const {
    if (inequality) return *inequality;
    return ksv::magic_cube_inequality(g);
  }
};

SourcedInequality load_ineq_arg(const std::string& arg) {
  if (arg == "magic-cube") {
    json canonical{{"preset", "magic-cube"}};
    return {arg, std::nullopt, arg, ksv::digest_string(canonical.dump())};
  }
  std::string text = ksv::read_text_file(arg);
  ksv::InequalityFileContent content = ksv::inequality_from_json(ksv::parse_json_text(text));
  return {content.preset, std::move(content.inequality), arg, ksv::digest_string(text)};
}

struct SourcedState {
  ksv::DensityMatrix state;
  std::string source;
  std::string digest;
};

SourcedState load_state_arg(const std::string& arg, int dim, double eps) {
  if (arg == "mixed") {
    ksv::DensityMatrix rho = ksv::maximally_mixed(dim);
    std::string digest = ksv::digest_string(ksv::density_to_json(rho).dump());
    return {std::move(rho), arg, std::move(digest)};
  }
  if (arg.rfind("random:", 0) == 0) {
    std::uint64_t state_seed = 0;
    try {
      state_seed = std::stoull(arg.substr(7));
    } catch (const std::exception&) {
      throw ksv::ParseError("state '" + arg + "' needs an unsigned integer seed");
    }
    ksv::Rng rng(state_seed);
    ksv::DensityMatrix rho = ksv::pure_state(ksv::haar_state(dim, rng), eps);
    std::string digest = ksv::digest_string(ksv::density_to_json(rho).dump());
    return {std::move(rho), arg, std::move(digest)};
  }
  std::string text = ksv::read_text_file(arg);
  return {ksv::density_from_json(ksv::parse_json_text(text), eps), arg,
          ksv::digest_string(text)};
}

json unitary_to_json(const ksv::Unitary& u) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    json row = json::array();
    for (int c = 0; c < 3; ++c)
      row.push_back(json::array({u.m[r][c].real(), u.m[r][c].imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

json term_to_json(const ksv::TermEstimate& t) {
  json out;
  out["observable"] = t.term.is_pair() ? t.term.u + "*" + t.term.v : t.term.u;
  out["weight"] = t.weight;
  out["estimate"] = t.estimate;
  out["std_error"] = t.std_error;
  return out;
}

int emit_report(ksv::Report& report, const std::string& subcommand, bool as_json) {
  json payload = ksv::report_to_json(report);
  if (const char* dir = std::getenv("KSV_REPORT_DIR"))
    ksv::write_text_file(std::string(dir) + "/" + subcommand + "-report.json",
                         payload.dump(2) + "\n");
  if (as_json)
    std::cout << payload.dump(2) << "\n";
  else
    std::cout << ksv::render_text(report);
  return report.passed() ? 0 : 1;
}

int run_verify_cmd(const std::string& set_arg, bool as_json,
                   const std::string& dot_path, double eps, std::uint64_t limit,
                   const std::string& command_line) {
  SourcedRaySet input = load_set_arg(set_arg);
  ksv::VerifyOptions opts;
  opts.eps = eps;
  opts.witness_limit = limit;
  ksv::Report report = ksv::run_verify(input.rays, opts);
  report.command = command_line;
  report.inputs.emplace_back(input.source, input.digest);
  if (!dot_path.empty())
    ksv::write_text_file(dot_path,
                         ksv::emit_dot(ksv::build_graph(input.rays, eps), input.rays.name()));
  return emit_report(report, "verify", as_json);
}

int run_bound_cmd(const std::string& ineq_arg, const std::string& set_arg, bool as_json,
                  double eps, std::uint64_t limit, const std::string& command_line) {
  SourcedInequality ineq_input = load_ineq_arg(ineq_arg);
  SourcedRaySet set_input = load_set_arg(set_arg);
  ksv::OrthGraph g = ksv::build_graph(set_input.rays, eps);
  ksv::Inequality q = ineq_input.resolve(g);

  ksv::Report report;
  report.command = command_line;
  report.inputs.emplace_back(ineq_input.source, ineq_input.digest);
  report.inputs.emplace_back(set_input.source, set_input.digest);

  auto bound = ksv::classical_bound(q);
  report.data["name"] = q.name;
  report.data["vertices"] = q.n();
  report.data["classical_bound"] = ksv::scalar_to_json(bound.bound);
  report.data["maximizer_count"] = bound.maximizer_count;
  report.data["maximizers_truncated"] = bound.truncated;
  json maximizers = json::array();
  std::uint64_t kept = 0;
  for (const auto& m : bound.maximizers) {
    if (kept++ >= limit) break;
    json entry;
    for (const auto& [label, sign] : m.entries) entry[label] = sign;
    maximizers.push_back(std::move(entry));
  }
  report.data["maximizers"] = std::move(maximizers);

  auto violation = ksv::violation_report(q, set_input.rays, std::nullopt, eps);
  report.data["state_independent"] = violation.state_independent;
  report.data["quantum_value"] = ksv::scalar_to_json(violation.quantum);
  report.data["margin"] = ksv::scalar_to_json(violation.margin);
  if (!violation.spectrum.empty()) report.data["spectrum"] = violation.spectrum;
  return emit_report(report, "bound", as_json);
}

int run_simulate_cmd(const std::string& model_arg, const std::string& state_arg,
                     const std::string& ineq_arg, const std::string& set_arg,
                     std::uint64_t shots, std::uint64_t seed, bool as_json, double eps,
                     const std::string& command_line) {
  SourcedInequality ineq_input = load_ineq_arg(ineq_arg);
  SourcedRaySet set_input = load_set_arg(set_arg);
  ksv::OrthGraph g = ksv::build_graph(set_input.rays, eps);
  ksv::Inequality q = ineq_input.resolve(g);
  ksv::MeasurementPlan plan = ksv::default_plan(q, shots, seed);

  ksv::Report report;
  report.command = command_line;
  report.inputs.emplace_back(ineq_input.source, ineq_input.digest);
  report.inputs.emplace_back(set_input.source, set_input.digest);
  report.seed = seed;

  ksv::EstimateReport estimate;
  ksv::Scalar prediction;
  if (model_arg == "qm") {
    SourcedState state = load_state_arg(state_arg, set_input.rays.dim(), eps);
    report.inputs.emplace_back(state.source, state.digest);
    estimate = ksv::estimate_quantum(state.state, q, set_input.rays, plan, eps);
    prediction = ksv::expectation(ksv::quantum_operator(q, set_input.rays, eps),
                                  state.state, eps);
    report.data["model"] = "qm";
  } else if (model_arg.rfind("hv:", 0) == 0) {
    std::string path = model_arg.substr(3);
    std::string text = ksv::read_text_file(path);
    ksv::HVModel model = ksv::hv_model_from_json(ksv::parse_json_text(text));
    report.inputs.emplace_back(path, ksv::digest_string(text));
    estimate = ksv::estimate_hv(model, q, plan, eps);
    prediction = ksv::hv_expectation(model, q, eps);
    report.data["model"] = "hv";
  } else {
    throw ksv::ParseError("model must be \"qm\" or \"hv:<path>\"");
  }

  report.data["shots_per_term"] = estimate.shots_per_term;
  report.data["estimate"] = estimate.estimate;
  report.data["std_error"] = estimate.std_error;
  report.data["prediction"] = ksv::scalar_to_json(prediction);
  json terms = json::array();
  for (const auto& t : estimate.terms) terms.push_back(term_to_json(t));
  report.data["terms"] = std::move(terms);

  double tolerance = std::max(5.0 * estimate.std_error, 1e-9);
  double gap = std::abs(estimate.estimate - prediction.real());
  report.check("estimate within five standard errors of the exact expectation",
               gap <= tolerance,
               "gap " + json(gap).dump() + ", tolerance " + json(tolerance).dump());
  return emit_report(report, "simulate", as_json);
}

int run_reconstruct_cmd(const std::string& set_arg, bool as_json, double eps,
                        const std::string& command_line) {
  SourcedRaySet input = load_set_arg(set_arg);
  ksv::Realization realization{input.rays, {}};
  realization.iso.resize(input.rays.size());
  for (std::size_t i = 0; i < realization.iso.size(); ++i)
    realization.iso[i] = static_cast<int>(i);
  if (ksv::OrthGraph g = ksv::build_graph(input.rays, eps); g.n() == 13) {
    // Any relabeling works; without one the identity map lets the adjacency
    // check name a concrete offending pair.
    if (auto iso = ksv::labeled_isomorphism(ksv::delta13(), g)) realization.iso = *iso;
  }
  ksv::CanonicalizationResult result = ksv::canonicalize_realization(realization, eps);

  ksv::Report report;
  report.command = command_line;
  report.inputs.emplace_back(input.source, input.digest);
  report.data["unitary"] = unitary_to_json(result.unitary);
  report.data["residual"] = result.residual;
  json t = json::array();
  for (const auto& phase : result.t)
    t.push_back(json::array({phase.real(), phase.imag()}));
  report.data["t"] = std::move(t);
  report.data["conjugated"] = result.conjugated;
  report.data["canonical"] = ksv::rayset_to_json(result.canonical);
  report.check("rotated rays match the standard form projectively",
               result.residual <= eps, "residual " + json(result.residual).dump());
  return emit_report(report, "reconstruct", as_json);
}

std::string join_command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += " ";
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kochen-Specker verification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  bool as_json = false;
  double eps = 1e-9;
  std::uint64_t limit = 64;
  app.add_flag("--json", as_json, "emit the report as JSON");
  app.add_option("--eps", eps, "numerical tolerance for float-valued inputs");
  app.add_option("--limit", limit, "cap on witness and maximizer lists");

  auto* verify = app.add_subcommand("verify", "run the full claim suite on a ray set");
  std::string verify_set = "yu-oh-13";
  std::string dot_path;
  verify->add_option("set", verify_set, "ray set file, or \"yu-oh-13\"");
  verify->add_option("--dot", dot_path, "write the orthogonality graph in DOT form");

  auto* bound = app.add_subcommand("bound", "classical bound and quantum value of an inequality");
  std::string bound_ineq = "magic-cube";
  std::string bound_set = "yu-oh-13";
  bound->add_option("inequality", bound_ineq, "inequality file, or \"magic-cube\"");
  bound->add_option("set", bound_set, "ray set file, or \"yu-oh-13\"");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of an inequality value");
  std::string model = "qm";
  std::string state = "mixed";
  std::string sim_ineq = "magic-cube";
  std::string sim_set = "yu-oh-13";
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  simulate->add_option("--model", model, "\"qm\" or \"hv:<model file>\"");
  simulate->add_option("--state", state,
                       "state file, \"mixed\", or \"random:<seed>\" (qm model only)");
  simulate->add_option("--ineq", sim_ineq, "inequality file, or \"magic-cube\"");
  simulate->add_option("--set", sim_set, "ray set file, or \"yu-oh-13\"");
  simulate->add_option("--shots", shots, "shots per measurement term");
  simulate->add_option("--seed", seed, "root seed for the per-term RNG substreams");

  auto* reconstruct = app.add_subcommand("reconstruct", "canonicalize a 13-ray realization");
  std::string reconstruct_set;
  reconstruct->add_option("set", reconstruct_set, "ray set file, or \"yu-oh-13\"")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string command_line = join_command_line(argc, argv);
  try {
    if (*verify) return run_verify_cmd(verify_set, as_json, dot_path, eps, limit, command_line);
    if (*bound) return run_bound_cmd(bound_ineq, bound_set, as_json, eps, limit, command_line);
    if (*simulate)
      return run_simulate_cmd(model, state, sim_ineq, sim_set, shots, seed, as_json, eps,
                              command_line);
    if (*reconstruct) return run_reconstruct_cmd(reconstruct_set, as_json, eps, command_line);
  } catch (const ksv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ksv::ErrorKind::verification: return 1;
      case ksv::ErrorKind::input: return 2;
      case ksv::ErrorKind::limit: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
