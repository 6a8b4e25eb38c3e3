#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "hypersde/algebra.hpp"

namespace hypersde {

/// Reads `{"dim":n, "gamma":[[[...]]], "identity":[...], "label":"..."}`.
/// `identity` is optional. Shape errors throw LengthMismatch; JSON type errors
/// propagate from nlohmann::json.
AlgebraTable table_from_json(const nlohmann::json& doc);
nlohmann::json table_to_json(const AlgebraTable& table);

/// Accepts either a table document or a builder:
///   {"builtin":"Cp","p":-1} | {"builtin":"A3_4"} | {"builtin":"R"}
///   {"product":[spec, spec]} | {"sum":[spec, spec]} | {"table_file":"path"}
/// Relative table_file paths resolve against `base_dir`.
Algebra algebra_from_json(const nlohmann::json& spec, const std::filesystem::path& base_dir = {});

nlohmann::json report_to_json(const VerificationReport& report);

}  // namespace hypersde
