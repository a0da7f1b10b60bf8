#include "sqcqp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sqcqp::io {

namespace {

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return j;
}

QuadForm quadform_from_json(const nlohmann::json& j, int n, bool one_b) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b") || !j.contains("c"))
    throw ParseError("functional needs fields a, b, c");
  QuadForm f;
  if (!j["a"].is_number() || !j["c"].is_number())
    throw ParseError("a and c must be numbers");
  f.a = j["a"].get<double>();
  f.c = j["c"].get<double>();
  f.b = vector_from_json(j["b"], "b");
  if (f.dim() != n) throw ParseError("linear coefficient length differs from n");
  if (one_b) f.b *= 0.5;
  if (!std::isfinite(f.a) || !std::isfinite(f.c) || !f.b.allFinite())
    throw ParseError("non-finite coefficient");
  return f;
}

}  // namespace

Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  Vector v(j.size());
  int i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(std::string(what) + " entries must be numbers");
    v[i++] = e.get<double>();
  }
  return v;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Problem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("problem file must be a JSON object");
  for (const char* key : {"n", "objective", "constraints"})
    if (!j.contains(key)) throw ParseError(std::string("missing field ") + key);
  if (!j["n"].is_number_integer()) throw ParseError("n must be an integer");
  const int n = j["n"].get<int>();
  if (n < 1) throw ParseError("n must be positive");

  std::string convention = "two-b";
  if (j.contains("convention")) convention = j["convention"].get<std::string>();
  if (convention != "two-b" && convention != "one-b")
    throw ParseError("convention must be \"two-b\" or \"one-b\"");
  const bool one_b = convention == "one-b";

  QuadForm obj = quadform_from_json(j["objective"], n, one_b);
  if (!j["constraints"].is_array() || j["constraints"].empty())
    throw ParseError("constraints must be a non-empty array");
  std::vector<QuadForm> cons;
  for (const auto& e : j["constraints"]) cons.push_back(quadform_from_json(e, n, one_b));

  try {
    return Problem::make(std::move(obj), std::move(cons));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Problem load_problem(const std::string& path) { return problem_from_json(parse_file(path)); }

nlohmann::json problem_to_json(const Problem& p) {
  auto form = [](const QuadForm& f) {
    return nlohmann::json{{"a", f.a}, {"b", vector_to_json(f.b)}, {"c", f.c}};
  };
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& f : p.constraints) cons.push_back(form(f));
  return nlohmann::json{{"n", p.n},
                        {"convention", "two-b"},
                        {"objective", form(p.objective)},
                        {"constraints", cons}};
}

PointFile load_point(const std::string& path, int expected_dim) {
  nlohmann::json j = parse_file(path);
  if (!j.is_object() || !j.contains("x")) throw ParseError("point file needs field x");
  PointFile pf;
  pf.x = vector_from_json(j["x"], "x");
  if (pf.x.size() != expected_dim) throw ParseError("point dimension differs from problem n");
  if (j.contains("gamma")) {
    pf.gamma = vector_from_json(j["gamma"], "gamma");
  }
  return pf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw WriteError("write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sqcqp::io
