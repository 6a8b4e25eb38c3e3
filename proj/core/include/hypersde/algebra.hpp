#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypersde {

/// Structure of a built-in algebra, used to pick closed-form elementary
/// functions. Anything loaded from a table or built by sum/product is
/// `table`, `product` or `sum` and goes through the series fallbacks.
enum class AlgebraKind { table, real, generalized_complex, a34, product, sum };

/// Raw multiplication table as supplied by a user or a constructor, before any
/// axiom has been checked. `gamma` is row-major over (i, j, k) with
/// e_i e_j = sum_k gamma[i][j][k] e_k.
struct AlgebraTable {
  std::size_t dim = 0;
  std::vector<double> gamma;
  std::optional<std::vector<double>> identity;
  std::string label;
};

struct AxiomCheck {
  bool pass = true;
  double max_residual = 0.0;
  // 1-based indices of the worst violation; empty when the residual is zero.
  std::vector<std::size_t> witness;
};

struct VerificationReport {
  AxiomCheck commutativity;
  AxiomCheck associativity;
  AxiomCheck identity;
  double tolerance = 0.0;

  bool pass() const noexcept {
    return commutativity.pass && associativity.pass && identity.pass;
  }
};

class Algebra;

/// Validates `table` and returns the algebra. A missing identity is solved
/// for by least squares. Throws AxiomViolation or NoIdentity.
Algebra make_algebra(AlgebraTable table, AlgebraKind kind = AlgebraKind::table,
                     double parameter = 0.0);

/// A verified commutative, associative, unital real algebra. Immutable;
/// copies share the table.
class Algebra {
 public:
  std::size_t dim() const noexcept { return impl_->dim; }
  const std::string& label() const noexcept { return impl_->label; }
  AlgebraKind kind() const noexcept { return impl_->kind; }
  /// The parameter p for generalized complex numbers, 0 otherwise.
  double parameter() const noexcept { return impl_->parameter; }

  double gamma(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return impl_->gamma[(i * impl_->dim + j) * impl_->dim + k];
  }
  std::span<const double> gamma() const noexcept { return impl_->gamma; }
  std::span<const double> identity() const noexcept { return impl_->identity; }

  AlgebraTable table() const;

 private:
  struct Impl {
    std::size_t dim;
    std::vector<double> gamma;
    std::vector<double> identity;
    std::string label;
    AlgebraKind kind;
    double parameter;
  };

  explicit Algebra(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  friend Algebra make_algebra(AlgebraTable table, AlgebraKind kind, double parameter);

  std::shared_ptr<const Impl> impl_;
};

/// Element of an algebra in the unit basis. The algebra is referenced by label.
class HValue {
 public:
  HValue() = default;
  HValue(std::string algebra, std::vector<double> coeffs)
      : algebra_(std::move(algebra)), coeffs_(std::move(coeffs)) {}

  const std::string& algebra() const noexcept { return algebra_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  double operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  double& operator[](std::size_t i) noexcept { return coeffs_[i]; }

  friend bool operator==(const HValue&, const HValue&) = default;

 private:
  std::string algebra_;
  std::vector<double> coeffs_;
};

/// Checks commutativity, associativity and the identity equations on a raw
/// table. Residuals are the exact maximum absolute violations. Passing uses
/// `tol` scaled by the magnitude of the table entries.
VerificationReport verify_table(const AlgebraTable& table, double tol = 1e-12);
VerificationReport verify_algebra(const Algebra& alg, double tol = 1e-12);

Algebra make_real();
/// Generalized complex numbers C_p: units 1, i with i^2 = p.
Algebra make_cp(double p);
/// Units 1, i, j with i^2 = j, ij = 0, j^2 = 0.
Algebra make_a34();

/// Tensor product over index pairs (i, a) -> i * dim(B) + a.
Algebra direct_product(const Algebra& a, const Algebra& b);
/// Block-diagonal table; identity (eps_A, eps_B).
Algebra direct_sum(const Algebra& a, const Algebra& b);

HValue zero(const Algebra& alg);
HValue one(const Algebra& alg);
HValue unit(const Algebra& alg, std::size_t i);
HValue element(const Algebra& alg, std::vector<double> coeffs);

HValue add(const HValue& u, const HValue& v);
HValue subtract(const HValue& u, const HValue& v);
HValue scale(const HValue& u, double c);

/// (u v)_k = sum_ij gamma_ijk u_i v_j.
HValue multiply(const Algebra& alg, const HValue& u, const HValue& v);

/// Left-multiplication matrix M(u), row-major, with (u v) = M(u) v.
std::vector<double> multiplication_matrix(const Algebra& alg, const HValue& u);

/// Default zero-divisor threshold: 1e-10 * norm(u)^(n-1).
double default_singular_tolerance(const Algebra& alg, const HValue& u);

/// Solves M(u) v = eps. Throws SingularElement when |det M(u)| falls below
/// `singular_tol` (default_singular_tolerance when negative).
HValue invert(const Algebra& alg, const HValue& u, double singular_tol = -1.0);

double determinant(const Algebra& alg, const HValue& u);

double norm(const HValue& u);

/// Sum of e_k e_k over the first `m` units: the quadratic-variation element of
/// W = sum_k W_k e_k, i.e. dW dW = noise_square * dt.
HValue noise_square(const Algebra& alg, std::size_t m);
HValue noise_square(const Algebra& alg);

}  // namespace hypersde
