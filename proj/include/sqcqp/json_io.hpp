#pragma once

#include "sqcqp/quadform.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace sqcqp::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WriteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem file:
//   { "n": int, "convention": "two-b" | "one-b",
//     "objective": {"a": x, "b": [x;n], "c": x},
//     "constraints": [ ...same shape... ] }
// "one-b" linear coefficients are divided by 2 on load.
Problem problem_from_json(const nlohmann::json& j);
Problem load_problem(const std::string& path);

nlohmann::json problem_to_json(const Problem& p);

struct PointFile {
  Vector x;
  std::optional<Vector> gamma;
};

// Point file: { "x": [..], "gamma": [..]? }
PointFile load_point(const std::string& path, int expected_dim);

Vector vector_from_json(const nlohmann::json& j, const char* what);
nlohmann::json vector_to_json(const Vector& v);

// Writes text to a file, or to stdout when path is "-".
void write_text(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);

}  // namespace sqcqp::io
