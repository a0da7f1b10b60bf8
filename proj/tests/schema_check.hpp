// Minimal structural validator for the subset of JSON Schema the shipped
// schema files use: type (string or list), required, properties, items,
// enum, const and oneOf.
#pragma once

#include "json.hpp"

#include <string>

namespace schema_check {

inline bool type_matches(const nlohmann::json& value, const std::string& t) {
  if (t == "object") return value.is_object();
  if (t == "array") return value.is_array();
  if (t == "string") return value.is_string();
  if (t == "number") return value.is_number();
  if (t == "integer") return value.is_number_integer();
  if (t == "boolean") return value.is_boolean();
  if (t == "null") return value.is_null();
  return false;
}

inline bool validate(const nlohmann::json& value, const nlohmann::json& schema,
                     std::string* error = nullptr, const std::string& path = "$") {
  auto fail = [&](const std::string& why) {
    if (error) *error = path + ": " + why;
    return false;
  };

  if (schema.contains("const")) {
    if (value != schema["const"]) return fail("const mismatch");
    return true;
  }
  if (schema.contains("enum")) {
    for (const auto& e : schema["enum"])
      if (value == e) return true;
    return fail("not in enum");
  }
  if (schema.contains("oneOf")) {
    for (const auto& sub : schema["oneOf"])
      if (validate(value, sub, nullptr, path)) return true;
    return fail("matches no oneOf branch");
  }
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else {
      for (const auto& e : t)
        ok = ok || type_matches(value, e.get<std::string>());
    }
    if (!ok) return fail("wrong type");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          return fail("missing required key " + key.get<std::string>());
    if (schema.contains("properties"))
      for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
        if (value.contains(it.key()))
          if (!validate(value[it.key()], it.value(), error, path + "." + it.key()))
            return false;
  }
  if (value.is_array() && schema.contains("items")) {
    int i = 0;
    for (const auto& e : value) {
      if (!validate(e, schema["items"], error, path + "[" + std::to_string(i) + "]"))
        return false;
      ++i;
    }
  }
  return true;
}

}  // namespace schema_check
