#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ksv/bounds.hpp"
#include "ksv/density.hpp"
#include "ksv/orthograph.hpp"

namespace ksv {

using json = nlohmann::ordered_json;

/// FNV-1a over the raw bytes; digests are tagged with the algorithm name.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_string(std::string_view bytes) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) out += hex[(h >> shift) & 0xF];
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::input, "cannot write '" + path + "'");
  out << text;
}

inline json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

// ---------------------------------------------------------------------------
// Scalars: exact values as "p/q" strings, complex floats as [re, im] pairs.

inline json scalar_to_json(const Scalar& s) {
  if (s.is_exact()) return json(s.rat().to_string());
  return json::array({s.to_complex().real(), s.to_complex().imag()});
}

inline Scalar scalar_from_json(const json& j) {
  if (j.is_string()) return Scalar(Rational::parse(j.get<std::string>()));
  if (j.is_number()) return Scalar::floating(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Scalar::floating(j[0].get<double>(), j[1].get<double>());
  throw ParseError("expected a \"p/q\" string or an [re, im] pair");
}

// ---------------------------------------------------------------------------
// Ray set files.

inline json rayset_to_json(const RaySet& rs) {
  bool exact = true;
  for (const auto& r : rs.rays()) exact = exact && r.exact;
  json out;
  out["name"] = rs.name();
  out["dimension"] = rs.dim();
  out["field"] = exact ? "rational" : "complex";
  json rays = json::array();
  for (const auto& r : rs.rays()) {
    json entry;
    entry["label"] = r.label;
    json comps = json::array();
    for (const auto& c : r.comps) {
      if (exact)
        comps.push_back(c.rat().to_string());
      else
        comps.push_back(json::array({c.to_complex().real(), c.to_complex().imag()}));
    }
    entry["components"] = comps;
    rays.push_back(std::move(entry));
  }
  out["rays"] = std::move(rays);
  return out;
}

inline RaySet rayset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("name") || !j.contains("dimension") ||
      !j.contains("field") || !j.contains("rays"))
    throw ParseError("ray set needs name, dimension, field and rays");
  if (!j["dimension"].is_number_integer()) throw ParseError("dimension must be an integer");
  int dim = j["dimension"].get<int>();
  std::string field = j["field"].get<std::string>();
  if (field != "rational" && field != "complex")
    throw ParseError("field must be \"rational\" or \"complex\"");
  RaySet rs(j["name"].get<std::string>(), dim);
  if (!j["rays"].is_array()) throw ParseError("rays must be an array");
  for (const auto& entry : j["rays"]) {
    if (!entry.contains("label") || !entry.contains("components"))
      throw ParseError("each ray needs label and components");
    const json& comps = entry["components"];
    if (!comps.is_array() || static_cast<int>(comps.size()) != dim)
      throw ParseError("component count must equal the dimension");
    std::vector<Scalar> values;
    for (const auto& c : comps) {
      Scalar s = scalar_from_json(c);
      if (field == "rational" && !s.is_exact())
        throw ParseError("rational ray sets use \"p/q\" component strings");
      values.push_back(std::move(s));
    }
    rs.add(canonicalize_ray(std::move(values), dim, entry["label"].get<std::string>()));
  }
  return rs;
}

inline RaySet load_rayset(const std::string& path) {
  return rayset_from_json(parse_json_text(read_text_file(path)));
}

// ---------------------------------------------------------------------------
// Inequality files.  Coefficients are exact; the engine doubles the stored
// unordered weight internally via the symmetric matrix.

inline json inequality_to_json(const Inequality& q) {
  validate_inequality(q);
  if (q.kind != ObservableKind::dichotomic)
    throw Error(ErrorKind::input, "inequality files store dichotomic forms");
  json out;
  out["name"] = q.name;
  out["vertices"] = q.vertices;
  json linear = json::array();
  for (int v = 0; v < q.n(); ++v) {
    if (q.linear[v].is_zero()) continue;
    if (!q.linear[v].is_exact())
      throw Error(ErrorKind::input, "inequality files store exact coefficients");
    linear.push_back(json{{"vertex", q.vertices[v]},
                          {"coefficient", q.linear[v].rat().to_string()}});
  }
  out["linear"] = std::move(linear);
  json quadratic = json::array();
  for (int u = 0; u < q.n(); ++u)
    for (int v = u + 1; v < q.n(); ++v) {
      if (q.quadratic[u][v].is_zero()) continue;
      if (!q.quadratic[u][v].is_exact())
        throw Error(ErrorKind::input, "inequality files store exact coefficients");
      quadratic.push_back(json{{"u", q.vertices[u]},
                               {"v", q.vertices[v]},
                               {"weight", q.quadratic[u][v].rat().to_string()}});
    }
  out["quadratic"] = std::move(quadratic);
  return out;
}

/// An inequality file either spells out the terms or names a preset built
/// against the ray set the command runs on.
struct InequalityFileContent {
  std::optional<std::string> preset;
  std::optional<Inequality> inequality;
};

inline InequalityFileContent inequality_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("inequality file must be a JSON object");
  InequalityFileContent out;
  if (j.contains("preset")) {
    out.preset = j["preset"].get<std::string>();
    if (*out.preset != "magic-cube")
      throw ParseError("unknown preset '" + *out.preset + "'");
    return out;
  }
  if (!j.contains("vertices")) throw ParseError("inequality needs vertices or a preset");
  Inequality q;
  q.name = j.contains("name") ? j["name"].get<std::string>() : "inequality";
  q.vertices = j["vertices"].get<std::vector<std::string>>();
  int n = q.n();
  q.linear.assign(n, Scalar(0));
  q.quadratic.assign(n, std::vector<Scalar>(n, Scalar(0)));
  auto index = [&](const json& v) {
    std::string label = v.get<std::string>();
    for (int i = 0; i < n; ++i)
      if (q.vertices[i] == label) return i;
    throw ParseError("term references unknown vertex '" + label + "'");
  };
  if (j.contains("linear"))
    for (const auto& term : j["linear"]) {
      if (!term.contains("vertex") || !term.contains("coefficient"))
        throw ParseError("each linear term needs vertex and coefficient");
      int v = index(term["vertex"]);
      if (!q.linear[v].is_zero()) throw ParseError("duplicate linear term");
      q.linear[v] = Scalar(Rational::parse(term["coefficient"].get<std::string>()));
    }
  if (j.contains("quadratic"))
    for (const auto& term : j["quadratic"]) {
      if (!term.contains("u") || !term.contains("v") || !term.contains("weight"))
        throw ParseError("each quadratic term needs u, v and weight");
      int u = index(term["u"]);
      int v = index(term["v"]);
      if (u == v) throw ParseError("quadratic term repeats a vertex");
      if (!q.quadratic[u][v].is_zero()) throw ParseError("duplicate quadratic term");
      Scalar w(Rational::parse(term["weight"].get<std::string>()));
      q.quadratic[u][v] = w;
      q.quadratic[v][u] = w;
    }
  validate_inequality(q);
  out.inequality = std::move(q);
  return out;
}

// ---------------------------------------------------------------------------
// Density matrix files: row-major matrix of scalars, validated on parse.

inline json density_to_json(const DensityMatrix& rho) {
  json out;
  out["dimension"] = rho.dim();
  json matrix = json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < rho.dim(); ++c) row.push_back(scalar_to_json(rho.op().at(r, c)));
    matrix.push_back(std::move(row));
  }
  out["matrix"] = std::move(matrix);
  return out;
}

inline DensityMatrix density_from_json(const json& j, double eps = 1e-9) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("matrix"))
    throw ParseError("state needs dimension and matrix");
  if (!j["dimension"].is_number_integer()) throw ParseError("dimension must be an integer");
  int dim = j["dimension"].get<int>();
  if (dim < 1) throw ParseError("dimension must be positive");
  const json& matrix = j["matrix"];
  if (!matrix.is_array() || static_cast<int>(matrix.size()) != dim)
    throw ParseError("matrix must have one row per dimension");
  Operator m(dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = matrix[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ParseError("matrix rows must have one entry per dimension");
    for (int c = 0; c < dim; ++c) m.at(r, c) = scalar_from_json(row[c]);
  }
  return validate_density(m, eps);
}

inline DensityMatrix load_density(const std::string& path, double eps = 1e-9) {
  return density_from_json(parse_json_text(read_text_file(path)), eps);
}

// ---------------------------------------------------------------------------
// Hidden-variable model files: a weighted list of total sign assignments.

inline json hv_model_to_json(const HVModel& m) {
  json out;
  json support = json::array();
  for (const auto& a : m.support) {
    json entry;
    for (const auto& [label, sign] : a.entries) entry[label] = sign;
    support.push_back(std::move(entry));
  }
  out["support"] = std::move(support);
  json weights = json::array();
  for (const auto& w : m.weights) {
    if (!w.is_exact())
      throw Error(ErrorKind::input, "model files store exact weights");
    weights.push_back(w.rat().to_string());
  }
  out["weights"] = std::move(weights);
  return out;
}

inline HVModel hv_model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("support") || !j.contains("weights"))
    throw ParseError("model needs support and weights");
  HVModel m;
  for (const auto& entry : j["support"]) {
    if (!entry.is_object()) throw ParseError("each assignment must be an object");
    SignAssignment a;
    for (const auto& [label, value] : entry.items()) {
      if (!value.is_number_integer()) throw ParseError("assignment values must be +1 or -1");
      int s = value.get<int>();
      if (s != 1 && s != -1) throw ParseError("assignment values must be +1 or -1");
      a.entries.emplace_back(label, s);
    }
    m.support.push_back(std::move(a));
  }
  for (const auto& w : j["weights"])
    m.weights.push_back(Scalar(Rational::parse(w.get<std::string>())));
  if (m.weights.size() != m.support.size())
    throw WeightMismatchError("model has " + std::to_string(m.support.size()) +
                              " assignments but " + std::to_string(m.weights.size()) +
                              " weights");
  return m;
}

inline HVModel load_hv_model(const std::string& path) {
  return hv_model_from_json(parse_json_text(read_text_file(path)));
}

// ---------------------------------------------------------------------------
// DOT rendering of the orthogonality graph.

inline std::string emit_dot(const OrthGraph& g, const std::string& name = "orthogonality") {
  std::string out = "graph \"" + name + "\" {\n";
  for (int v = 0; v < g.n(); ++v) out += "  \"" + g.label(v) + "\";\n";
  for (auto [u, v] : g.edges())
    out += "  \"" + g.label(u) + "\" -- \"" + g.label(v) + "\";\n";
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reports: one structured payload rendered to JSON and to text with the same
// number tokens (the text renderer reuses the JSON serializer for values).

struct ReportCheck {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // source -> digest
  std::optional<std::uint64_t> seed;
  json data = json::object();
  std::vector<ReportCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void check(const std::string& claim, bool pass, std::string detail = "") {
    checks.push_back({claim, pass, std::move(detail)});
  }
};

inline json report_to_json(const Report& r) {
  json out;
  out["command"] = r.command;
  json inputs = json::array();
  for (const auto& [source, digest] : r.inputs)
    inputs.push_back(json{{"source", source}, {"digest", digest}});
  out["inputs"] = std::move(inputs);
  if (r.seed) out["seed"] = *r.seed;
  out["data"] = r.data;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json entry;
    entry["claim"] = c.claim;
    entry["pass"] = c.pass;
    if (!c.detail.empty()) entry["detail"] = c.detail;
    checks.push_back(std::move(entry));
  }
  out["checks"] = std::move(checks);
  out["pass"] = r.passed();
  return out;
}

inline std::string render_text(const Report& r) {
  std::string out;
  out += "command: " + r.command + "\n";
  for (const auto& [source, digest] : r.inputs)
    out += "input: " + source + " " + digest + "\n";
  if (r.seed) out += "seed: " + json(*r.seed).dump() + "\n";
  for (const auto& [key, value] : r.data.items())
    out += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  for (const auto& c : r.checks) {
    out += std::string(c.pass ? "[pass] " : "[FAIL] ") + c.claim;
    if (!c.detail.empty()) out += " (" + c.detail + ")";
    out += "\n";
  }
  if (!r.checks.empty())
    out += std::string("result: ") + (r.passed() ? "pass" : "FAIL") + "\n";
  return out;
}

}  // namespace ksv
