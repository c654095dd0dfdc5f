#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>

#include <ksv/bounds.hpp>
#include <ksv/density.hpp>
#include <ksv/io.hpp>
#include <ksv/orthograph.hpp>
#include <ksv/rayset.hpp>
#include <ksv/rng.hpp>

using namespace ksv;

namespace {

std::string temp_path(const std::string& stem) {
  return "/tmp/ksv-io-test-" + stem + ".json";
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("digests follow the published fnv1a vectors") {
  CHECK(digest_string("") == "fnv1a64:cbf29ce484222325");
  CHECK(digest_string("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(digest_string("foobar") == "fnv1a64:85944171f73967e8");
  CHECK(fnv1a64("") == 14695981039346656037ull);

  // Independent restatement of the algorithm
  auto oracle = [](const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ull;
    return h;
  };
  for (const std::string& s : std::vector<std::string>{"", "yu-oh-13", "{\"x\":1}",
                                                       std::string(1, '\0') + "b"})
    CHECK(fnv1a64(s) == oracle(s));
}

TEST_CASE("text files round-trip and missing paths are reported") {
  std::string path = temp_path("text");
  std::string content = "line one\nline two\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file(path), ParseError);
  CHECK_THROWS_AS(parse_json_text("{not json"), ParseError);
  CHECK(parse_json_text("{\"k\": [1, 2]}")["k"][1] == 2);
}

TEST_CASE("scalars serialize as exact strings or [re, im] pairs") {
  Scalar exact(Rational(-3, 4));
  json je = scalar_to_json(exact);
  CHECK(je.is_string());
  CHECK(je.get<std::string>() == "-3/4");
  CHECK(scalar_from_json(je) == exact);

  Scalar flt = Scalar::floating(1.5, -2.25);
  json jf = scalar_to_json(flt);
  REQUIRE(jf.is_array());
  CHECK(jf[0].get<double>() == 1.5);
  CHECK(jf[1].get<double>() == -2.25);
  CHECK(scalar_from_json(jf) == flt);

  CHECK(scalar_from_json(json(0.5)) == Scalar::floating(0.5));
  CHECK_THROWS_AS(scalar_from_json(json::array({1.0})), ParseError);
  CHECK_THROWS_AS(scalar_from_json(json::object()), ParseError);
  CHECK_THROWS_AS(scalar_from_json(json("2/0")), Error);
}

TEST_CASE("ray set files round-trip the standard set exactly") {
  RaySet rs = yu_oh_13();
  json j = rayset_to_json(rs);
  CHECK(j["field"] == "rational");
  CHECK(j["dimension"] == 3);
  CHECK(j["rays"].size() == 13);

  RaySet back = rayset_from_json(j);
  CHECK(back.name() == rs.name());
  REQUIRE(back.size() == rs.size());
  for (int i = 0; i < rs.size(); ++i) {
    CHECK(back.rays()[i].label == rs.rays()[i].label);
    for (int c = 0; c < 3; ++c) CHECK(back.rays()[i].comps[c] == rs.rays()[i].comps[c]);
  }
  // Serialization is deterministic, so digests are stable across emissions
  CHECK(digest_string(j.dump()) == digest_string(rayset_to_json(back).dump()));

  std::string path = temp_path("rayset");
  write_text_file(path, j.dump(2) + "\n");
  RaySet loaded = load_rayset(path);
  CHECK(build_graph(loaded).edge_count() == 24);
  std::remove(path.c_str());
}

TEST_CASE("float ray sets survive a serialization cycle") {
  Rng rng(31);
  RaySet rs("random", 3);
  for (int i = 0; i < 4; ++i) {
    auto amps = haar_state(3, rng);
    std::vector<Scalar> comps;
    for (const auto& a : amps) comps.push_back(Scalar(a));
    rs.add(canonicalize_ray(std::move(comps), 3, "r" + std::to_string(i)));
  }
  json j = rayset_to_json(rs);
  CHECK(j["field"] == "complex");
  RaySet back = rayset_from_json(j);
  // Parsing re-canonicalizes, which re-applies the phase rotation and may
  // shift the last bits; the values agree to far below any tolerance in use.
  for (int i = 0; i < rs.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(back.rays()[i].comps[c].to_complex() -
                     rs.rays()[i].comps[c].to_complex()) < 1e-14);
}

TEST_CASE("ray set parsing rejects malformed documents") {
  json good = rayset_to_json(yu_oh_13());

  json missing = good;
  missing.erase("field");
  CHECK_THROWS_AS(rayset_from_json(missing), ParseError);

  json bad_field = good;
  bad_field["field"] = "octonion";
  CHECK_THROWS_AS(rayset_from_json(bad_field), ParseError);

  json bad_dim = good;
  bad_dim["dimension"] = "3";
  CHECK_THROWS_AS(rayset_from_json(bad_dim), ParseError);

  json short_ray = good;
  short_ray["rays"][0]["components"] = json::array({"1", "0"});
  CHECK_THROWS_AS(rayset_from_json(short_ray), ParseError);

  json mixed_field = good;
  mixed_field["rays"][0]["components"][0] = json::array({1.0, 0.0});
  CHECK_THROWS_AS(rayset_from_json(mixed_field), ParseError);

  json unlabeled = good;
  unlabeled["rays"][0].erase("label");
  CHECK_THROWS_AS(rayset_from_json(unlabeled), ParseError);

  CHECK_THROWS_AS(rayset_from_json(json::array()), ParseError);
}

TEST_CASE("inequality files round-trip terms and honor presets") {
  Inequality q = magic_cube_inequality(build_graph(yu_oh_13()));
  json j = inequality_to_json(q);
  CHECK(j["linear"].size() == 13);
  CHECK(j["quadratic"].size() == 24);

  InequalityFileContent content = inequality_from_json(j);
  REQUIRE(content.inequality.has_value());
  CHECK_FALSE(content.preset.has_value());
  const Inequality& back = *content.inequality;
  CHECK(back.vertices == q.vertices);
  for (int v = 0; v < q.n(); ++v) CHECK(back.linear[v] == q.linear[v]);
  for (int u = 0; u < q.n(); ++u)
    for (int v = 0; v < q.n(); ++v) CHECK(back.quadratic[u][v] == q.quadratic[u][v]);

  InequalityFileContent preset = inequality_from_json(json{{"preset", "magic-cube"}});
  REQUIRE(preset.preset.has_value());
  CHECK(*preset.preset == "magic-cube");
  CHECK_FALSE(preset.inequality.has_value());

  CHECK_THROWS_AS(inequality_from_json(json{{"preset", "unknown"}}), ParseError);
}

TEST_CASE("inequality parsing rejects inconsistent terms") {
  json base;
  base["vertices"] = json::array({"a", "b"});
  base["linear"] = json::array({json{{"vertex", "a"}, {"coefficient", "1"}}});

  json dup = base;
  dup["linear"].push_back(json{{"vertex", "a"}, {"coefficient", "2"}});
  CHECK_THROWS_AS(inequality_from_json(dup), ParseError);

  json unknown = base;
  unknown["linear"][0]["vertex"] = "c";
  CHECK_THROWS_AS(inequality_from_json(unknown), ParseError);

  json self_pair = base;
  self_pair["quadratic"] = json::array({json{{"u", "a"}, {"v", "a"}, {"weight", "1"}}});
  CHECK_THROWS_AS(inequality_from_json(self_pair), ParseError);

  json dup_pair = base;
  dup_pair["quadratic"] =
      json::array({json{{"u", "a"}, {"v", "b"}, {"weight", "1"}},
                   json{{"u", "b"}, {"v", "a"}, {"weight", "1"}}});
  CHECK_THROWS_AS(inequality_from_json(dup_pair), ParseError);

  CHECK_THROWS_AS(inequality_from_json(json{{"name", "empty"}}), ParseError);

  // Symmetric storage: the file records each unordered pair once
  json ok = base;
  ok["quadratic"] = json::array({json{{"u", "a"}, {"v", "b"}, {"weight", "-1/4"}}});
  auto parsed = inequality_from_json(ok);
  REQUIRE(parsed.inequality.has_value());
  CHECK(parsed.inequality->quadratic[0][1] == Scalar(Rational(-1, 4)));
  CHECK(parsed.inequality->quadratic[1][0] == Scalar(Rational(-1, 4)));
}

TEST_CASE("state files round-trip exact and floating densities") {
  DensityMatrix mixed = maximally_mixed(3);
  json j = density_to_json(mixed);
  CHECK(j["dimension"] == 3);
  DensityMatrix back = density_from_json(j);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(back.op().at(r, c) == mixed.op().at(r, c));

  Rng rng(7);
  DensityMatrix pure = pure_state(haar_state(3, rng));
  json jp = density_to_json(pure);
  DensityMatrix pure_back = density_from_json(jp);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(pure_back.op().at(r, c).to_complex() == pure.op().at(r, c).to_complex());

  std::string path = temp_path("state");
  write_text_file(path, j.dump());
  CHECK(expectation(Operator::identity(3), load_density(path)) == Scalar(1));
  std::remove(path.c_str());
}

TEST_CASE("state parsing validates shape and physicality") {
  json good = density_to_json(maximally_mixed(2));

  json no_matrix = good;
  no_matrix.erase("matrix");
  CHECK_THROWS_AS(density_from_json(no_matrix), ParseError);

  json ragged = good;
  ragged["matrix"][0] = json::array({"1/2"});
  CHECK_THROWS_AS(density_from_json(ragged), ParseError);

  json wrong_rows = good;
  wrong_rows["matrix"].push_back(json::array({"0", "0"}));
  CHECK_THROWS_AS(density_from_json(wrong_rows), ParseError);

  json traceless = good;
  traceless["matrix"][0][0] = "0";
  CHECK_THROWS_AS(density_from_json(traceless), NotAStateError);

  json negative = good;
  negative["matrix"][0][0] = "-1/2";
  negative["matrix"][1][1] = "3/2";
  CHECK_THROWS_AS(density_from_json(negative), NotAStateError);
}

TEST_CASE("model files round-trip weighted assignments") {
  Inequality q = magic_cube_inequality(build_graph(yu_oh_13()));
  HVModel m;
  m.support.push_back(assignment_from_mask(q.vertices, 0));
  m.support.push_back(assignment_from_mask(q.vertices, (1ull << 0) | (1ull << 4)));
  m.weights = {Scalar(Rational(2, 3)), Scalar(Rational(1, 3))};

  json j = hv_model_to_json(m);
  HVModel back = hv_model_from_json(j);
  REQUIRE(back.support.size() == 2);
  CHECK(back.weights[0] == m.weights[0]);
  CHECK(back.weights[1] == m.weights[1]);
  for (const auto& v : q.vertices) {
    CHECK(back.support[0].at(v) == m.support[0].at(v));
    CHECK(back.support[1].at(v) == m.support[1].at(v));
  }
  CHECK(hv_expectation(back, q) == hv_expectation(m, q));

  std::string path = temp_path("model");
  write_text_file(path, j.dump());
  CHECK_NOTHROW(validate_hv_model(load_hv_model(path)));
  std::remove(path.c_str());
}

TEST_CASE("model parsing rejects malformed documents") {
  json good = hv_model_to_json([] {
    HVModel m;
    SignAssignment a;
    a.entries.emplace_back("x", 1);
    m.support.push_back(a);
    m.weights.push_back(Scalar(1));
    return m;
  }());

  json mismatch = good;
  mismatch["weights"].push_back("1/2");
  CHECK_THROWS_AS(hv_model_from_json(mismatch), WeightMismatchError);

  json bad_sign = good;
  bad_sign["support"][0]["x"] = 2;
  CHECK_THROWS_AS(hv_model_from_json(bad_sign), ParseError);

  json fractional = good;
  fractional["support"][0]["x"] = 0.5;
  CHECK_THROWS_AS(hv_model_from_json(fractional), ParseError);

  json no_support = good;
  no_support.erase("support");
  CHECK_THROWS_AS(hv_model_from_json(no_support), ParseError);

  json string_assignment = good;
  string_assignment["support"][0] = "all plus";
  CHECK_THROWS_AS(hv_model_from_json(string_assignment), ParseError);
}

TEST_CASE("dot output lists every vertex and edge") {
  OrthGraph g = build_graph(yu_oh_13());
  std::string dot = emit_dot(g, "thirteen");
  CHECK(dot.rfind("graph \"thirteen\" {", 0) == 0);
  CHECK(dot.find("}\n") == dot.size() - 2);
  CHECK(count_occurrences(dot, " -- ") == 24);
  CHECK(count_occurrences(dot, ";\n") == 13 + 24);
  CHECK(dot.find("\"z1\" -- \"z2\"") != std::string::npos);
  CHECK(dot.find("\"h0\"") != std::string::npos);
}

TEST_CASE("reports render the same numbers in JSON and text") {
  Report r;
  r.command = "verify";
  r.inputs.emplace_back("built-in:yu-oh-13", digest_string("payload"));
  r.seed = 42;
  r.data["classical_bound"] = "8";
  r.data["estimate"] = 0.1 + 0.2;  // not exactly 0.3 in binary
  r.check("bound matches", true);
  r.check("margin positive", true, "1/3");

  CHECK(r.passed());
  json j = report_to_json(r);
  CHECK(j["command"] == "verify");
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 42);
  CHECK(j["inputs"][0]["digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][1]["detail"] == "1/3");

  std::string text = render_text(r);
  std::string estimate_token = j["data"]["estimate"].dump();
  CHECK(text.find("estimate: " + estimate_token + "\n") != std::string::npos);
  CHECK(text.find("classical_bound: 8\n") != std::string::npos);
  CHECK(text.find("[pass] bound matches") != std::string::npos);
  CHECK(text.find("seed: 42") != std::string::npos);
  CHECK(text.find("result: pass") != std::string::npos);

  r.check("failing claim", false, "details here");
  CHECK_FALSE(r.passed());
  CHECK(report_to_json(r)["pass"] == false);
  std::string failed = render_text(r);
  CHECK(failed.find("[FAIL] failing claim (details here)") != std::string::npos);
  CHECK(failed.find("result: FAIL") != std::string::npos);

  Report bare;
  bare.command = "bound";
  CHECK(bare.passed());
  CHECK(render_text(bare).find("result:") == std::string::npos);
  CHECK_FALSE(report_to_json(bare).contains("seed"));
}
