#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypersde/errors.hpp"
#include "hypersde/expr.hpp"

namespace hypersde::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationFailure : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t any_length = std::numeric_limits<std::size_t>::max();

const nlohmann::json& require(const nlohmann::json& obj, std::string_view key, std::string_view where);
const nlohmann::json* find(const nlohmann::json& obj, std::string_view key);

double number(const nlohmann::json& v, std::string_view where);
double number_or(const nlohmann::json& obj, std::string_view key, double fallback, std::string_view where);
std::size_t count_or(const nlohmann::json& obj, std::string_view key, std::size_t fallback, std::string_view where);
std::string string_or(const nlohmann::json& obj, std::string_view key, const std::string& fallback,
                      std::string_view where);
bool bool_or(const nlohmann::json& obj, std::string_view key, bool fallback, std::string_view where);

std::vector<double> numbers(const nlohmann::json& v, std::string_view where, std::size_t expected = any_length);

/// Accepts a string in the expression grammar or a bare number.
expr::Expr expression(const nlohmann::json& v, const expr::ParseOptions& opts, std::string_view where);
std::vector<expr::Expr> expressions(const nlohmann::json& v, const expr::ParseOptions& opts, std::string_view where,
                                    std::size_t expected = any_length);

}  // namespace hypersde::cli
