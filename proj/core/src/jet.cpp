#include "hypersde/jet.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace hypersde {

namespace {

void enumerate(std::size_t vars, std::size_t degree, std::size_t v, std::vector<std::uint8_t>& cur,
               std::vector<std::vector<std::uint8_t>>& out) {
  if (v + 1 == vars) {
    cur[v] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    return;
  }
  for (std::size_t k = degree + 1; k-- > 0;) {
    cur[v] = static_cast<std::uint8_t>(k);
    enumerate(vars, degree - k, v + 1, cur, out);
  }
  cur[v] = 0;
}

std::map<std::vector<std::uint8_t>, long>& index_maps(const JetLayout* layout) {
  static std::map<const JetLayout*, std::map<std::vector<std::uint8_t>, long>> maps;
  return maps[layout];
}

std::mutex& layout_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

JetLayout::JetLayout(std::size_t vars, std::size_t order) : vars_(vars), order_(order) {
  std::vector<std::uint8_t> cur(vars, 0);
  if (vars == 0) {
    exponents_.push_back({});
  } else {
    for (std::size_t deg = 0; deg <= order; ++deg) enumerate(vars, deg, 0, cur, exponents_);
  }
  std::map<std::vector<std::uint8_t>, long> lookup;
  for (std::size_t i = 0; i < exponents_.size(); ++i) lookup[exponents_[i]] = static_cast<long>(i);

  factorial_.resize(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    double f = 1.0;
    for (auto e : exponents_[i])
      for (int k = 2; k <= e; ++k) f *= k;
    factorial_[i] = f;
  }

  shift_.assign(vars, std::vector<long>(exponents_.size(), -1));
  for (std::size_t v = 0; v < vars; ++v) {
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      auto up = exponents_[i];
      ++up[v];
      const auto it = lookup.find(up);
      if (it != lookup.end()) shift_[v][i] = it->second;
    }
  }

  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    for (std::size_t b = 0; b < exponents_.size(); ++b) {
      std::vector<std::uint8_t> sum(vars);
      for (std::size_t v = 0; v < vars; ++v) sum[v] = exponents_[a][v] + exponents_[b][v];
      const auto it = lookup.find(sum);
      if (it != lookup.end()) {
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(it->second)});
      }
    }
  }
  index_maps(this) = std::move(lookup);
}

std::shared_ptr<const JetLayout> JetLayout::get(std::size_t vars, std::size_t order) {
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(layout_mutex());
  auto& slot = cache[{vars, order}];
  if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(vars, order));
  return slot;
}

long JetLayout::index(std::span<const std::uint8_t> alpha) const {
  std::lock_guard lock(layout_mutex());
  const auto& m = index_maps(this);
  const auto it = m.find(std::vector<std::uint8_t>(alpha.begin(), alpha.end()));
  return it == m.end() ? -1 : it->second;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, double value)
    : layout_(std::move(layout)), c_(layout_->size(), 0.0) {
  c_[0] = value;
}

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, double value, std::size_t var) {
  Jet j(std::move(layout), value);
  if (j.layout_->order() >= 1) {
    const long idx = j.layout_->shifted(0, var);
    if (idx >= 0) j.c_[static_cast<std::size_t>(idx)] = 1.0;
  }
  return j;
}

double Jet::partial(std::span<const std::uint8_t> alpha) const {
  const long idx = layout_->index(alpha);
  if (idx < 0) return 0.0;
  return c_[static_cast<std::size_t>(idx)] * layout_->factorial(static_cast<std::size_t>(idx));
}

double Jet::d(std::size_t v) const {
  const long idx = layout_->shifted(0, v);
  return idx < 0 ? 0.0 : c_[static_cast<std::size_t>(idx)];
}

double Jet::d2(std::size_t v, std::size_t w) const {
  const long first = layout_->shifted(0, v);
  if (first < 0) return 0.0;
  const long idx = layout_->shifted(static_cast<std::size_t>(first), w);
  if (idx < 0) return 0.0;
  return c_[static_cast<std::size_t>(idx)] * layout_->factorial(static_cast<std::size_t>(idx));
}

Jet Jet::derivative(std::size_t v) const {
  Jet r(layout_, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const long up = layout_->shifted(i, v);
    if (up < 0) continue;
    const auto u = static_cast<std::size_t>(up);
    r.c_[i] = static_cast<double>(layout_->exponent(u)[v]) * c_[u];
  }
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  assert(layout_ == o.layout_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  assert(layout_ == o.layout_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator*=(double c) {
  for (auto& x : c_) x *= c;
  return *this;
}

Jet Jet::compose(std::span<const double> derivs) const {
  const std::size_t order = layout_->order();
  assert(derivs.size() >= order + 1);
  Jet h = *this;
  h.c_[0] = 0.0;
  double fact = 1.0;
  for (std::size_t k = 2; k <= order; ++k) fact *= static_cast<double>(k);
  Jet r(layout_, derivs[order] / fact);
  for (std::size_t k = order; k-- > 0;) {
    fact /= static_cast<double>(k + 1);
    r = r * h;
    r.c_[0] += derivs[k] / fact;
  }
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
  assert(a.layout_ == b.layout_);
  Jet r(a.layout_, 0.0);
  r.c_[0] = 0.0;
  for (const auto& p : a.layout_->products()) r.c_[p.c] += a.c_[p.a] * b.c_[p.b];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double c) { return a += c; }
Jet operator+(double c, Jet a) { return a += c; }
Jet operator-(Jet a, double c) { return a -= c; }
Jet operator-(double c, const Jet& a) { return -a + c; }
Jet operator*(Jet a, double c) { return a *= c; }
Jet operator*(double c, Jet a) { return a *= c; }
Jet operator/(Jet a, double c) { return a *= 1.0 / c; }
Jet operator/(double c, const Jet& a) { return reciprocal(a) * c; }
Jet operator-(const Jet& a) { return a * -1.0; }

namespace {

std::vector<double> derivative_buffer(const Jet& u) { return std::vector<double>(u.layout()->order() + 1); }

}  // namespace

Jet exp(const Jet& u) {
  auto d = derivative_buffer(u);
  const double e = std::exp(u.value());
  for (auto& x : d) x = e;
  return u.compose(d);
}

Jet log(const Jet& u) {
  auto d = derivative_buffer(u);
  const double x = u.value();
  d[0] = std::log(x);
  double fact = 1.0;  // (k-1)!
  double pw = x;      // x^k
  for (std::size_t k = 1; k < d.size(); ++k) {
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / pw;
    fact *= static_cast<double>(k);
    pw *= x;
  }
  return u.compose(d);
}

Jet sin(const Jet& u) {
  auto d = derivative_buffer(u);
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {s, c, -s, -c};
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
  return u.compose(d);
}

Jet cos(const Jet& u) {
  auto d = derivative_buffer(u);
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {c, -s, -c, s};
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
  return u.compose(d);
}

Jet sqrt(const Jet& u) { return pow(u, 0.5); }

Jet reciprocal(const Jet& u) {
  auto d = derivative_buffer(u);
  const double x = u.value();
  double fact = 1.0;
  double pw = x;
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = ((k % 2 == 0) ? 1.0 : -1.0) * fact / pw;
    fact *= static_cast<double>(k + 1);
    pw *= x;
  }
  return u.compose(d);
}

Jet pow(const Jet& u, double a) {
  auto d = derivative_buffer(u);
  const double x = u.value();
  double falling = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = falling == 0.0 ? 0.0 : falling * std::pow(x, a - static_cast<double>(k));
    falling *= a - static_cast<double>(k);
  }
  return u.compose(d);
}

Jet powi(const Jet& u, long n) {
  if (n < 0) return reciprocal(powi(u, -n));
  Jet result(u.layout(), 1.0);
  Jet base = u;
  auto e = static_cast<unsigned long>(n);
  while (e) {
    if (e & 1UL) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

}  // namespace hypersde
