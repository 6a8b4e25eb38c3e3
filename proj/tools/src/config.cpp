#include "config.hpp"

#include <cmath>

namespace hypersde::cli {

namespace {

std::string at(std::string_view where, std::string_view key) {
  std::string s(where);
  if (!s.empty()) s += '.';
  s += key;
  return s;
}

}  // namespace

const nlohmann::json* find(const nlohmann::json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const nlohmann::json& require(const nlohmann::json& obj, std::string_view key, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where.empty() ? "config" : where) + " must be an object");
  const auto* v = find(obj, key);
  if (!v) throw ConfigError("missing required field '" + at(where, key) + "'");
  return *v;
}

double number(const nlohmann::json& v, std::string_view where) {
  if (!v.is_number()) throw ConfigError(std::string(where) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string(where) + " must be finite");
  return x;
}

double number_or(const nlohmann::json& obj, std::string_view key, double fallback, std::string_view where) {
  const auto* v = find(obj, key);
  return v ? number(*v, at(where, key)) : fallback;
}

std::size_t count_or(const nlohmann::json& obj, std::string_view key, std::size_t fallback, std::string_view where) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<long long>() < 0)
    throw ConfigError(at(where, key) + " must be a non-negative integer");
  return v->get<std::size_t>();
}

std::string string_or(const nlohmann::json& obj, std::string_view key, const std::string& fallback,
                      std::string_view where) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(at(where, key) + " must be a string");
  return v->get<std::string>();
}

bool bool_or(const nlohmann::json& obj, std::string_view key, bool fallback, std::string_view where) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(at(where, key) + " must be true or false");
  return v->get<bool>();
}

std::vector<double> numbers(const nlohmann::json& v, std::string_view where, std::size_t expected) {
  if (!v.is_array()) throw ConfigError(std::string(where) + " must be an array of numbers");
  if (expected != any_length && v.size() != expected)
    throw ConfigError(std::string(where) + " needs " + std::to_string(expected) + " entries, got " +
                      std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], std::string(where) + "[" + std::to_string(i) + "]"));
  return out;
}

expr::Expr expression(const nlohmann::json& v, const expr::ParseOptions& opts, std::string_view where) {
  if (v.is_number()) return expr::literal(number(v, where));
  if (!v.is_string()) throw ConfigError(std::string(where) + " must be an expression string or a number");
  try {
    return expr::parse(v.get<std::string>(), opts);
  } catch (const ParseError& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

std::vector<expr::Expr> expressions(const nlohmann::json& v, const expr::ParseOptions& opts, std::string_view where,
                                    std::size_t expected) {
  if (!v.is_array()) throw ConfigError(std::string(where) + " must be an array of expressions");
  if (expected != any_length && v.size() != expected)
    throw ConfigError(std::string(where) + " needs " + std::to_string(expected) + " entries, got " +
                      std::to_string(v.size()));
  std::vector<expr::Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(expression(v[i], opts, std::string(where) + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace hypersde::cli
