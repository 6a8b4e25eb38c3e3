#include "hypersde/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Dense>

#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"

namespace hypersde {

namespace {

std::size_t idx3(std::size_t n, std::size_t i, std::size_t j, std::size_t k) {
  return (i * n + j) * n + k;
}

void require_same(const HValue& u, const HValue& v) {
  if (u.algebra() != v.algebra()) throw AlgebraMismatch(u.algebra(), v.algebra());
  if (u.size() != v.size()) throw LengthMismatch("algebra element", u.size(), v.size());
}

void require_member(const Algebra& alg, const HValue& u) {
  if (u.algebra() != alg.label()) throw AlgebraMismatch(alg.label(), u.algebra());
  if (u.size() != alg.dim()) throw LengthMismatch("algebra element", alg.dim(), u.size());
}

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

// Least-squares solution of sum_k eps_k gamma_ikj = delta_ij. Returns the
// candidate identity and the max residual.
std::pair<std::vector<double>, double> solve_identity(std::size_t n, std::span<const double> gamma) {
  Eigen::MatrixXd a(n * n, n);
  Eigen::VectorXd rhs(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n + j);
      for (std::size_t k = 0; k < n; ++k) {
        a(row, static_cast<Eigen::Index>(k)) = gamma[idx3(n, i, k, j)];
      }
      rhs(row) = (i == j) ? 1.0 : 0.0;
    }
  }
  const Eigen::VectorXd eps = a.colPivHouseholderQr().solve(rhs);
  const double residual = (a * eps - rhs).cwiseAbs().maxCoeff();
  return {std::vector<double>(eps.data(), eps.data() + n), residual};
}

}  // namespace

AlgebraTable Algebra::table() const {
  return AlgebraTable{impl_->dim, impl_->gamma, impl_->identity, impl_->label};
}

VerificationReport verify_table(const AlgebraTable& table, double tol) {
  const std::size_t n = table.dim;
  if (n == 0) throw LengthMismatch("algebra dimension", 1, 0);
  if (table.gamma.size() != n * n * n) {
    throw LengthMismatch("structure constants", n * n * n, table.gamma.size());
  }
  const auto& g = table.gamma;
  const double scale = std::max(1.0, max_abs(g));

  VerificationReport rep;
  rep.tolerance = tol;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double r = std::abs(g[idx3(n, i, j, k)] - g[idx3(n, j, i, k)]);
        if (r > rep.commutativity.max_residual) {
          rep.commutativity.max_residual = r;
          rep.commutativity.witness = {i + 1, j + 1, k + 1};
        }
      }
    }
  }
  rep.commutativity.pass = rep.commutativity.max_residual <= tol * scale;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t t = 0; t < n; ++t) {
          double lhs = 0.0;
          double rhs = 0.0;
          for (std::size_t s = 0; s < n; ++s) {
            lhs += g[idx3(n, i, j, s)] * g[idx3(n, s, k, t)];
            rhs += g[idx3(n, i, s, t)] * g[idx3(n, j, k, s)];
          }
          const double r = std::abs(lhs - rhs);
          if (r > rep.associativity.max_residual) {
            rep.associativity.max_residual = r;
            rep.associativity.witness = {i + 1, j + 1, k + 1, t + 1};
          }
        }
      }
    }
  }
  rep.associativity.pass = rep.associativity.max_residual <= tol * scale * scale;

  std::vector<double> eps;
  if (table.identity) {
    if (table.identity->size() != n) throw LengthMismatch("identity", n, table.identity->size());
    eps = *table.identity;
  } else {
    eps = solve_identity(n, g).first;
  }
  const double eps_scale = std::max(1.0, max_abs(eps));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double right = 0.0;  // e_i eps
      double left = 0.0;   // eps e_i
      for (std::size_t k = 0; k < n; ++k) {
        right += eps[k] * g[idx3(n, i, k, j)];
        left += eps[k] * g[idx3(n, k, i, j)];
      }
      const double delta = (i == j) ? 1.0 : 0.0;
      const double r = std::max(std::abs(right - delta), std::abs(left - delta));
      if (r > rep.identity.max_residual) {
        rep.identity.max_residual = r;
        rep.identity.witness = {i + 1, j + 1};
      }
    }
  }
  rep.identity.pass = rep.identity.max_residual <= tol * scale * eps_scale;
  return rep;
}

VerificationReport verify_algebra(const Algebra& alg, double tol) {
  return verify_table(alg.table(), tol);
}

Algebra make_algebra(AlgebraTable table, AlgebraKind kind, double parameter) {
  const std::size_t n = table.dim;
  if (n == 0) throw LengthMismatch("algebra dimension", 1, 0);
  if (table.gamma.size() != n * n * n) {
    throw LengthMismatch("structure constants", n * n * n, table.gamma.size());
  }
  const auto rep = verify_table(table);
  if (!rep.commutativity.pass) {
    throw AxiomViolation("commutativity", rep.commutativity.witness, rep.commutativity.max_residual);
  }
  if (!rep.associativity.pass) {
    throw AxiomViolation("associativity", rep.associativity.witness, rep.associativity.max_residual);
  }
  if (!table.identity) {
    auto [eps, residual] = solve_identity(n, table.gamma);
    if (!(residual <= 1e-10)) throw NoIdentity(table.label, residual);
    table.identity = std::move(eps);
  } else if (!rep.identity.pass) {
    throw AxiomViolation("identity", rep.identity.witness, rep.identity.max_residual);
  }
  auto impl = std::make_shared<Algebra::Impl>(Algebra::Impl{
      n, std::move(table.gamma), std::move(*table.identity), std::move(table.label), kind, parameter});
  return Algebra(std::move(impl));
}

Algebra make_real() {
  return make_algebra(AlgebraTable{1, {1.0}, std::vector<double>{1.0}, "R"}, AlgebraKind::real);
}

Algebra make_cp(double p) {
  AlgebraTable t;
  t.dim = 2;
  t.gamma.assign(8, 0.0);
  t.gamma[idx3(2, 0, 0, 0)] = 1.0;  // 1*1 = 1
  t.gamma[idx3(2, 0, 1, 1)] = 1.0;  // 1*i = i
  t.gamma[idx3(2, 1, 0, 1)] = 1.0;  // i*1 = i
  t.gamma[idx3(2, 1, 1, 0)] = p;    // i*i = p
  t.identity = std::vector<double>{1.0, 0.0};
  t.label = "Cp(p=" + format_double(p) + ")";
  return make_algebra(std::move(t), AlgebraKind::generalized_complex, p);
}

Algebra make_a34() {
  AlgebraTable t;
  t.dim = 3;
  t.gamma.assign(27, 0.0);
  for (std::size_t j = 0; j < 3; ++j) {
    t.gamma[idx3(3, 0, j, j)] = 1.0;
    t.gamma[idx3(3, j, 0, j)] = 1.0;
  }
  t.gamma[idx3(3, 1, 1, 2)] = 1.0;  // i*i = j; i*j = j*j = 0
  t.identity = std::vector<double>{1.0, 0.0, 0.0};
  t.label = "A3_4";
  return make_algebra(std::move(t), AlgebraKind::a34);
}

Algebra direct_product(const Algebra& a, const Algebra& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  const std::size_t n = na * nb;
  AlgebraTable t;
  t.dim = n;
  t.gamma.assign(n * n * n, 0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < na; ++k) {
        const double ga = a.gamma(i, j, k);
        if (ga == 0.0) continue;
        for (std::size_t p = 0; p < nb; ++p)
          for (std::size_t q = 0; q < nb; ++q)
            for (std::size_t r = 0; r < nb; ++r) {
              t.gamma[idx3(n, i * nb + p, j * nb + q, k * nb + r)] = ga * b.gamma(p, q, r);
            }
      }
  std::vector<double> eps(n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t p = 0; p < nb; ++p) eps[i * nb + p] = a.identity()[i] * b.identity()[p];
  t.identity = std::move(eps);
  t.label = a.label() + "⊗" + b.label();
  return make_algebra(std::move(t), AlgebraKind::product);
}

Algebra direct_sum(const Algebra& a, const Algebra& b) {
  const std::size_t na = a.dim();
  const std::size_t n = na + b.dim();
  AlgebraTable t;
  t.dim = n;
  t.gamma.assign(n * n * n, 0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < na; ++k) t.gamma[idx3(n, i, j, k)] = a.gamma(i, j, k);
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      for (std::size_t k = 0; k < b.dim(); ++k)
        t.gamma[idx3(n, na + i, na + j, na + k)] = b.gamma(i, j, k);
  std::vector<double> eps(a.identity().begin(), a.identity().end());
  eps.insert(eps.end(), b.identity().begin(), b.identity().end());
  t.identity = std::move(eps);
  t.label = a.label() + "⊕" + b.label();
  return make_algebra(std::move(t), AlgebraKind::sum);
}

HValue zero(const Algebra& alg) { return HValue(alg.label(), std::vector<double>(alg.dim(), 0.0)); }

HValue one(const Algebra& alg) {
  return HValue(alg.label(), std::vector<double>(alg.identity().begin(), alg.identity().end()));
}

HValue unit(const Algebra& alg, std::size_t i) {
  auto u = zero(alg);
  u[i] = 1.0;
  return u;
}

HValue element(const Algebra& alg, std::vector<double> coeffs) {
  if (coeffs.size() != alg.dim()) throw LengthMismatch("algebra element", alg.dim(), coeffs.size());
  return HValue(alg.label(), std::move(coeffs));
}

HValue add(const HValue& u, const HValue& v) {
  require_same(u, v);
  HValue r = u;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += v[i];
  return r;
}

HValue subtract(const HValue& u, const HValue& v) {
  require_same(u, v);
  HValue r = u;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= v[i];
  return r;
}

HValue scale(const HValue& u, double c) {
  HValue r = u;
  for (auto& x : r.coeffs()) x *= c;
  return r;
}

HValue multiply(const Algebra& alg, const HValue& u, const HValue& v) {
  require_member(alg, u);
  require_member(alg, v);
  const std::size_t n = alg.dim();
  const auto g = alg.gamma();
  HValue r = zero(alg);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double uv = u[i] * v[j];
      if (uv == 0.0) continue;
      const double* row = &g[idx3(n, i, j, 0)];
      for (std::size_t k = 0; k < n; ++k) r[k] += row[k] * uv;
    }
  }
  return r;
}

std::vector<double> multiplication_matrix(const Algebra& alg, const HValue& u) {
  require_member(alg, u);
  const std::size_t n = alg.dim();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += alg.gamma(i, j, k) * u[i];
      m[k * n + j] = s;
    }
  return m;
}

double determinant(const Algebra& alg, const HValue& u) {
  const std::size_t n = alg.dim();
  const auto m = multiplication_matrix(alg, u);
  const auto mat = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      m.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return mat.partialPivLu().determinant();
}

double default_singular_tolerance(const Algebra& alg, const HValue& u) {
  return 1e-10 * std::pow(norm(u), static_cast<double>(alg.dim() - 1));
}

HValue invert(const Algebra& alg, const HValue& u, double singular_tol) {
  const std::size_t n = alg.dim();
  const auto m = multiplication_matrix(alg, u);
  const auto mat = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      m.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto lu = mat.partialPivLu();
  const double det = lu.determinant();
  const double tol = singular_tol < 0.0 ? default_singular_tolerance(alg, u) : singular_tol;
  if (!(std::abs(det) > tol) || !std::isfinite(det)) {
    throw SingularElement("element of " + alg.label() + " is a zero divisor (det " + format_double(det) + ")",
                          det);
  }
  const auto eps = Eigen::Map<const Eigen::VectorXd>(alg.identity().data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd v = lu.solve(eps);
  return HValue(alg.label(), std::vector<double>(v.data(), v.data() + n));
}

double norm(const HValue& u) {
  double s = 0.0;
  for (double x : u.coeffs()) s += x * x;
  return std::sqrt(s);
}

HValue noise_square(const Algebra& alg, std::size_t m) {
  HValue s = zero(alg);
  for (std::size_t k = 0; k < std::min(m, alg.dim()); ++k)
    for (std::size_t r = 0; r < alg.dim(); ++r) s[r] += alg.gamma(k, k, r);
  return s;
}

HValue noise_square(const Algebra& alg) { return noise_square(alg, alg.dim()); }

}  // namespace hypersde
