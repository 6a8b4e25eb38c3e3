#include "hypersde/algebra_io.hpp"

#include <fstream>

#include "hypersde/errors.hpp"

namespace hypersde {

AlgebraTable table_from_json(const nlohmann::json& doc) {
  AlgebraTable t;
  t.dim = doc.at("dim").get<std::size_t>();
  const auto& g = doc.at("gamma");
  const std::size_t n = t.dim;
  if (!g.is_array() || g.size() != n) throw LengthMismatch("gamma rows", n, g.is_array() ? g.size() : 0);
  t.gamma.reserve(n * n * n);
  for (const auto& row : g) {
    if (!row.is_array() || row.size() != n) throw LengthMismatch("gamma columns", n, row.is_array() ? row.size() : 0);
    for (const auto& cell : row) {
      if (!cell.is_array() || cell.size() != n) {
        throw LengthMismatch("gamma fibre", n, cell.is_array() ? cell.size() : 0);
      }
      for (const auto& v : cell) t.gamma.push_back(v.get<double>());
    }
  }
  if (doc.contains("identity") && !doc.at("identity").is_null()) {
    t.identity = doc.at("identity").get<std::vector<double>>();
    if (t.identity->size() != n) throw LengthMismatch("identity", n, t.identity->size());
  }
  t.label = doc.value("label", std::string("table"));
  return t;
}

nlohmann::json table_to_json(const AlgebraTable& table) {
  const std::size_t n = table.dim;
  nlohmann::json g = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < n; ++j) {
      nlohmann::json cell = nlohmann::json::array();
      for (std::size_t k = 0; k < n; ++k) cell.push_back(table.gamma[(i * n + j) * n + k]);
      row.push_back(std::move(cell));
    }
    g.push_back(std::move(row));
  }
  nlohmann::json doc{{"dim", n}, {"gamma", std::move(g)}, {"label", table.label}};
  if (table.identity) doc["identity"] = *table.identity;
  return doc;
}

Algebra algebra_from_json(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
  if (spec.contains("builtin")) {
    const auto name = spec.at("builtin").get<std::string>();
    if (name == "Cp") return make_cp(spec.at("p").get<double>());
    if (name == "A3_4") return make_a34();
    if (name == "R") return make_real();
    throw Error("unknown builtin algebra '" + name + "'");
  }
  if (spec.contains("product")) {
    const auto& parts = spec.at("product");
    if (parts.size() != 2) throw LengthMismatch("product operands", 2, parts.size());
    return direct_product(algebra_from_json(parts[0], base_dir), algebra_from_json(parts[1], base_dir));
  }
  if (spec.contains("sum")) {
    const auto& parts = spec.at("sum");
    if (parts.size() != 2) throw LengthMismatch("sum operands", 2, parts.size());
    return direct_sum(algebra_from_json(parts[0], base_dir), algebra_from_json(parts[1], base_dir));
  }
  if (spec.contains("table_file")) {
    auto path = std::filesystem::path(spec.at("table_file").get<std::string>());
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) throw Error("cannot open algebra table '" + path.string() + "'");
    return make_algebra(table_from_json(nlohmann::json::parse(in)));
  }
  return make_algebra(table_from_json(spec));
}

namespace {

nlohmann::json check_to_json(const AxiomCheck& c) {
  return {{"pass", c.pass}, {"max_residual", c.max_residual}, {"witness", c.witness}};
}

}  // namespace

nlohmann::json report_to_json(const VerificationReport& report) {
  return {{"pass", report.pass()},
          {"tolerance", report.tolerance},
          {"commutativity", check_to_json(report.commutativity)},
          {"associativity", check_to_json(report.associativity)},
          {"identity", check_to_json(report.identity)}};
}

}  // namespace hypersde
