#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypersde/jet.hpp"

namespace hypersde::expr {

enum class NodeKind { literal, variable, neg, add, sub, mul, div, pow, call };
enum class Func { exp, ln, sin, cos, sqrt };

struct Node;
using Expr = std::shared_ptr<const Node>;

/// Variable 0 is t; variable i >= 1 is x_i.
struct Node {
  NodeKind kind = NodeKind::literal;
  double value = 0.0;
  std::size_t var = 0;
  Func func = Func::exp;
  Expr lhs;
  Expr rhs;
  // Byte offset in the source text; 0 for programmatically built nodes.
  std::size_t offset = 0;
};

using Aliases = std::map<std::string, std::size_t, std::less<>>;

struct ParseOptions {
  // Largest admissible x index.
  std::size_t dim = std::numeric_limits<std::size_t>::max();
  // Extra identifiers that name variables, e.g. {"Z", 1}.
  Aliases aliases;
};

Expr parse(std::string_view text, const ParseOptions& options = {});

std::string to_string(const Expr& e);

/// Structural equality; source offsets are ignored.
bool equal(const Expr& a, const Expr& b);

/// Largest variable index referenced (0 when only t or none).
std::size_t max_variable(const Expr& e);
bool depends_on(const Expr& e, std::size_t var);

// Builders.
Expr literal(double c);
Expr variable(std::size_t var);
inline Expr time() { return variable(0); }
inline Expr x(std::size_t i) { return variable(i); }
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, Expr b);
Expr call(Func f, Expr a);

bool is_zero_literal(const Expr& e);

/// `env[0]` is t, `env[i]` is x_i. Throws DomainError for ln or sqrt of an
/// out-of-range argument, division by zero, and a non-integer power of a
/// non-positive base.
double eval(const Expr& e, std::span<const double> env);

/// Evaluates with every variable replaced by a jet. All jets share a layout.
Jet eval_jet(const Expr& e, std::span<const Jet> env);

/// Jet of the given order in the variables `vars` (indices into `env`).
Jet eval_jet(const Expr& e, std::span<const double> env, std::span<const std::size_t> vars,
             std::size_t order);

struct Taylor2 {
  double value = 0.0;
  std::vector<std::size_t> vars;
  std::vector<double> gradient;
  // Row-major, vars.size() squared.
  std::vector<double> hessian;

  double d(std::size_t a) const { return gradient[a]; }
  double d2(std::size_t a, std::size_t b) const { return hessian[a * vars.size() + b]; }
};

Taylor2 eval_taylor2(const Expr& e, std::span<const double> env, std::span<const std::size_t> vars);

/// Wraps an expression as f(t, x) with x = (x_1..x_n).
std::function<double(double, std::span<const double>)> to_function(Expr e);

}  // namespace hypersde::expr
