#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hypersde {

/// Monomial bookkeeping for truncated multivariate Taylor polynomials in
/// `vars` variables up to total degree `order`. Layouts are interned, so
/// equal (vars, order) pairs share one instance.
class JetLayout {
 public:
  static std::shared_ptr<const JetLayout> get(std::size_t vars, std::size_t order);

  std::size_t vars() const noexcept { return vars_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t size() const noexcept { return exponents_.size(); }

  std::span<const std::uint8_t> exponent(std::size_t idx) const noexcept {
    return {exponents_[idx].data(), exponents_[idx].size()};
  }
  /// Index of a monomial, or -1 if its degree exceeds the order.
  long index(std::span<const std::uint8_t> alpha) const;
  /// Index of alpha + e_v, or -1.
  long shifted(std::size_t idx, std::size_t v) const noexcept { return shift_[v][idx]; }
  /// alpha! for the monomial at idx.
  double factorial(std::size_t idx) const noexcept { return factorial_[idx]; }

  struct Product {
    std::uint32_t a, b, c;
  };
  std::span<const Product> products() const noexcept { return products_; }

 private:
  JetLayout(std::size_t vars, std::size_t order);

  std::size_t vars_;
  std::size_t order_;
  std::vector<std::vector<std::uint8_t>> exponents_;
  std::vector<std::vector<long>> shift_;
  std::vector<double> factorial_;
  std::vector<Product> products_;
};

/// Truncated Taylor polynomial: coefficient c_alpha of (x - x0)^alpha, so the
/// partial derivative d^alpha f(x0) equals alpha! * c_alpha. Mixed partials
/// are read from a single coefficient, which makes them symmetric by
/// construction.
class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetLayout> layout, double value);

  static Jet variable(std::shared_ptr<const JetLayout> layout, double value, std::size_t var);

  const std::shared_ptr<const JetLayout>& layout() const noexcept { return layout_; }
  std::span<const double> coeffs() const noexcept { return c_; }

  double value() const noexcept { return c_[0]; }
  double partial(std::span<const std::uint8_t> alpha) const;
  double d(std::size_t v) const;
  double d2(std::size_t v, std::size_t w) const;

  /// Partial derivative along variable v as a jet of the same layout. The
  /// result is accurate through degree order-1; its top-degree coefficients
  /// are zero.
  Jet derivative(std::size_t v) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double c) { c_[0] += c; return *this; }
  Jet& operator-=(double c) { c_[0] -= c; return *this; }
  Jet& operator*=(double c);

  /// Composes a scalar function with this jet given its derivatives
  /// phi^(k)(value()) for k = 0..order.
  Jet compose(std::span<const double> derivs) const;

 private:
  friend Jet operator*(const Jet& a, const Jet& b);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double c);
Jet operator+(double c, Jet a);
Jet operator-(Jet a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(Jet a, double c);
Jet operator*(double c, Jet a);
Jet operator/(Jet a, double c);
Jet operator/(double c, const Jet& a);
Jet operator-(const Jet& a);

// Elementary functions. Domain checks are the caller's job.
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet sqrt(const Jet& u);
Jet reciprocal(const Jet& u);
/// u^a for real a, via the binomial series around value() (value() > 0 unless
/// `a` is a non-negative integer).
Jet pow(const Jet& u, double a);
/// Repeated multiplication; negative n goes through reciprocal.
Jet powi(const Jet& u, long n);

}  // namespace hypersde
