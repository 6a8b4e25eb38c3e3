#include "hypersde/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"

namespace hypersde::expr {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Expr binary(NodeKind k, Expr a, Expr b, std::size_t offset) {
  Node n;
  n.kind = k;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  n.offset = offset;
  return make(std::move(n));
}

const char* func_name(Func f) {
  switch (f) {
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

bool lookup_func(std::string_view name, Func& out) {
  static const std::pair<std::string_view, Func> table[] = {
      {"exp", Func::exp}, {"ln", Func::ln}, {"sin", Func::sin}, {"cos", Func::cos}, {"sqrt", Func::sqrt}};
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts) : s_(text), opts_(opts) {}

  Expr run() {
    Expr e = parse_expr();
    skip();
    if (pos_ != s_.size()) fail({"operator", "end of input"});
    return e;
  }

 private:
  std::string_view s_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string found() const {
    if (pos_ >= s_.size()) return "end of input";
    std::size_t end = pos_ + 1;
    if (std::isalnum(static_cast<unsigned char>(s_[pos_]))) {
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_' || s_[end] == '.'))
        ++end;
    }
    return "'" + std::string(s_.substr(pos_, end - pos_)) + "'";
  }

  [[noreturn]] void fail(std::vector<std::string> expected) { throw ParseError(pos_, std::move(expected), found()); }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = binary(NodeKind::add, lhs, parse_term(), at);
      } else if (accept('-')) {
        lhs = binary(NodeKind::sub, lhs, parse_term(), at);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = binary(NodeKind::mul, lhs, parse_unary(), at);
      } else if (accept('/')) {
        lhs = binary(NodeKind::div, lhs, parse_unary(), at);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    skip();
    const std::size_t at = pos_;
    if (accept('-')) {
      Node n;
      n.lhs = parse_unary();
      n.offset = at;
      // Folding keeps print(parse(s)) a fixpoint, since negative literals
      // print as "(-c)".
      if (n.lhs->kind == NodeKind::literal) {
        n.kind = NodeKind::literal;
        n.value = -n.lhs->value;
        n.lhs.reset();
      } else {
        n.kind = NodeKind::neg;
      }
      return make(std::move(n));
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    skip();
    const std::size_t at = pos_;
    if (accept('^')) return binary(NodeKind::pow, base, parse_unary(), at);
    return base;
  }

  Expr parse_primary() {
    skip();
    const std::size_t at = pos_;
    if (pos_ >= s_.size()) fail({"number", "identifier", "("});
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!accept(')')) fail({")"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      const std::string_view name = s_.substr(pos_, end - pos_);
      Func f;
      if (lookup_func(name, f)) {
        pos_ = end;
        if (!accept('(')) fail({"("});
        Node n;
        n.kind = NodeKind::call;
        n.func = f;
        n.lhs = parse_expr();
        n.offset = at;
        if (!accept(')')) fail({")"});
        return make(std::move(n));
      }
      Node n;
      n.offset = at;
      if (name == "pi") {
        n.kind = NodeKind::literal;
        n.value = std::numbers::pi;
      } else if (name == "t") {
        n.kind = NodeKind::variable;
        n.var = 0;
      } else if (auto it = opts_.aliases.find(name); it != opts_.aliases.end()) {
        n.kind = NodeKind::variable;
        n.var = it->second;
      } else if (name.size() > 1 && name[0] == 'x' && name[1] != '0' &&
                 name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
        std::size_t idx = 0;
        std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (idx > opts_.dim) fail({"variable x1..x" + std::to_string(opts_.dim)});
        n.kind = NodeKind::variable;
        n.var = idx;
      } else {
        fail({"variable", "function", "constant"});
      }
      pos_ = end;
      return make(std::move(n));
    }
    fail({"number", "identifier", "("});
  }

  Expr parse_number() {
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t start = end;
      while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      return end > start;
    };
    bool any = digits();
    if (end < s_.size() && s_[end] == '.') {
      ++end;
      any = digits() || any;
    }
    if (!any) fail({"number"});
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < s_.size() && (s_[end] == '+' || s_[end] == '-')) ++end;
      if (!digits()) end = save;
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + pos_, s_.data() + end, v);
    if (res.ec != std::errc()) fail({"number"});
    Node n;
    n.kind = NodeKind::literal;
    n.value = v;
    n.offset = pos_;
    pos_ = end;
    return make(std::move(n));
  }
};

int level(const Expr& e) {
  switch (e->kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e->kind) {
    case NodeKind::literal:
      if (std::signbit(e->value)) {
        out += "(-" + format_double(-e->value) + ")";
      } else {
        out += format_double(e->value);
      }
      return;
    case NodeKind::variable:
      out += e->var == 0 ? std::string("t") : "x" + std::to_string(e->var);
      return;
    case NodeKind::neg:
      out += '-';
      print_wrapped(e->lhs, level(e->lhs) < 3, out);
      return;
    case NodeKind::call:
      out += func_name(e->func);
      out += '(';
      print(e->lhs, out);
      out += ')';
      return;
    case NodeKind::pow:
      print_wrapped(e->lhs, level(e->lhs) < 5, out);
      out += '^';
      print_wrapped(e->rhs, level(e->rhs) < 3, out);
      return;
    default: {
      const int me = level(e);
      const char* op = e->kind == NodeKind::add   ? " + "
                       : e->kind == NodeKind::sub ? " - "
                       : e->kind == NodeKind::mul ? "*"
                                                  : "/";
      print_wrapped(e->lhs, level(e->lhs) < me, out);
      out += op;
      print_wrapped(e->rhs, level(e->rhs) <= me, out);
      return;
    }
  }
}

bool is_integer(double v) { return std::isfinite(v) && std::nearbyint(v) == v && std::fabs(v) < 1e15; }

double powi(double base, long n) {
  if (n < 0) return 1.0 / powi(base, -n);
  double r = 1.0;
  auto k = static_cast<unsigned long>(n);
  while (k) {
    if (k & 1UL) r *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return r;
}

double value_of(double v) { return v; }
double value_of(const Jet& v) { return v.value(); }

template <class T>
struct Evaluator {
  std::span<const T> env;

  T operator()(const Expr& e) const {
    switch (e->kind) {
      case NodeKind::literal:
        return constant(e->value);
      case NodeKind::variable:
        if (e->var >= env.size()) throw EvaluationError("unbound variable in expression");
        return env[e->var];
      case NodeKind::neg:
        return -(*this)(e->lhs);
      case NodeKind::add:
        return (*this)(e->lhs) + (*this)(e->rhs);
      case NodeKind::sub:
        return (*this)(e->lhs) - (*this)(e->rhs);
      case NodeKind::mul:
        return (*this)(e->lhs) * (*this)(e->rhs);
      case NodeKind::div: {
        T den = (*this)(e->rhs);
        if (value_of(den) == 0.0) throw DomainError("division by zero", e->offset);
        return (*this)(e->lhs) / den;
      }
      case NodeKind::pow:
        return power(e);
      case NodeKind::call:
        return apply(e);
    }
    throw EvaluationError("corrupt expression node");
  }

  T constant(double c) const {
    if constexpr (std::is_same_v<T, double>) {
      return c;
    } else {
      return Jet(env.front().layout(), c);
    }
  }

  T power(const Expr& e) const {
    T base = (*this)(e->lhs);
    const double b = value_of(base);
    const bool const_exponent = !depends_on_any(e->rhs);
    if constexpr (std::is_same_v<T, double>) {
      const double ex = (*this)(e->rhs);
      if (is_integer(ex)) {
        if (ex < 0 && b == 0.0) throw DomainError("zero raised to a negative power", e->offset);
        return powi(b, static_cast<long>(ex));
      }
      if (!(b > 0.0)) throw DomainError("non-integer power of a non-positive base", e->offset);
      return std::pow(b, ex);
    } else {
      if (const_exponent) {
        const double ex = eval(e->rhs, std::span<const double>{});
        if (is_integer(ex)) {
          if (ex < 0 && b == 0.0) throw DomainError("zero raised to a negative power", e->offset);
          return hypersde::powi(base, static_cast<long>(ex));
        }
        if (!(b > 0.0)) throw DomainError("non-integer power of a non-positive base", e->offset);
        return hypersde::pow(base, ex);
      }
      if (!(b > 0.0)) throw DomainError("variable power of a non-positive base", e->offset);
      return hypersde::exp((*this)(e->rhs) * hypersde::log(base));
    }
  }

  static bool depends_on_any(const Expr& e) {
    if (e->kind == NodeKind::variable) return true;
    return (e->lhs && depends_on_any(e->lhs)) || (e->rhs && depends_on_any(e->rhs));
  }

  T apply(const Expr& e) const {
    T u = (*this)(e->lhs);
    const double v = value_of(u);
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (e->func) {
      case Func::exp:
        return exp(u);
      case Func::ln:
        if (!(v > 0.0)) throw DomainError("ln of a non-positive argument", e->offset);
        return log(u);
      case Func::sin:
        return sin(u);
      case Func::cos:
        return cos(u);
      case Func::sqrt:
        if (v < 0.0) throw DomainError("sqrt of a negative argument", e->offset);
        if constexpr (!std::is_same_v<T, double>) {
          if (v == 0.0 && u.layout()->order() > 0) throw DomainError("sqrt is not differentiable at 0", e->offset);
        }
        return sqrt(u);
    }
    throw EvaluationError("corrupt call node");
  }
};

}  // namespace

Expr parse(std::string_view text, const ParseOptions& options) { return Parser(text, options).run(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::literal: return a->value == b->value || (std::isnan(a->value) && std::isnan(b->value));
    case NodeKind::variable: return a->var == b->var;
    case NodeKind::call: return a->func == b->func && equal(a->lhs, b->lhs);
    case NodeKind::neg: return equal(a->lhs, b->lhs);
    default: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

std::size_t max_variable(const Expr& e) {
  if (!e) return 0;
  if (e->kind == NodeKind::variable) return e->var;
  return std::max(max_variable(e->lhs), max_variable(e->rhs));
}

bool depends_on(const Expr& e, std::size_t var) {
  if (!e) return false;
  if (e->kind == NodeKind::variable) return e->var == var;
  return depends_on(e->lhs, var) || depends_on(e->rhs, var);
}

Expr literal(double c) {
  Node n;
  n.kind = NodeKind::literal;
  n.value = c;
  return make(std::move(n));
}

Expr variable(std::size_t var) {
  Node n;
  n.kind = NodeKind::variable;
  n.var = var;
  return make(std::move(n));
}

Expr neg(Expr a) {
  Node n;
  n.kind = NodeKind::neg;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Expr add(Expr a, Expr b) { return binary(NodeKind::add, std::move(a), std::move(b), 0); }
Expr sub(Expr a, Expr b) { return binary(NodeKind::sub, std::move(a), std::move(b), 0); }
Expr mul(Expr a, Expr b) { return binary(NodeKind::mul, std::move(a), std::move(b), 0); }
Expr div(Expr a, Expr b) { return binary(NodeKind::div, std::move(a), std::move(b), 0); }
Expr pow(Expr a, Expr b) { return binary(NodeKind::pow, std::move(a), std::move(b), 0); }

Expr call(Func f, Expr a) {
  Node n;
  n.kind = NodeKind::call;
  n.func = f;
  n.lhs = std::move(a);
  return make(std::move(n));
}

bool is_zero_literal(const Expr& e) { return e && e->kind == NodeKind::literal && e->value == 0.0; }

double eval(const Expr& e, std::span<const double> env) { return Evaluator<double>{env}(e); }

Jet eval_jet(const Expr& e, std::span<const Jet> env) {
  if (env.empty()) throw EvaluationError("jet evaluation needs at least one bound variable");
  return Evaluator<Jet>{env}(e);
}

Jet eval_jet(const Expr& e, std::span<const double> env, std::span<const std::size_t> vars, std::size_t order) {
  const auto layout = JetLayout::get(vars.size(), order);
  std::vector<Jet> jets;
  jets.reserve(env.size());
  for (double v : env) jets.emplace_back(layout, v);
  for (std::size_t a = 0; a < vars.size(); ++a) {
    if (vars[a] >= env.size()) throw EvaluationError("differentiation variable out of range");
    jets[vars[a]] = Jet::variable(layout, env[vars[a]], a);
  }
  if (jets.empty()) jets.emplace_back(layout, 0.0);
  return eval_jet(e, jets);
}

Taylor2 eval_taylor2(const Expr& e, std::span<const double> env, std::span<const std::size_t> vars) {
  const Jet j = eval_jet(e, env, vars, 2);
  Taylor2 r;
  r.value = j.value();
  r.vars.assign(vars.begin(), vars.end());
  const std::size_t k = vars.size();
  r.gradient.resize(k);
  r.hessian.resize(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    r.gradient[a] = j.d(a);
    for (std::size_t b = 0; b < k; ++b) r.hessian[a * k + b] = j.d2(a, b);
  }
  return r;
}

std::function<double(double, std::span<const double>)> to_function(Expr e) {
  return [e = std::move(e)](double t, std::span<const double> x) {
    thread_local std::vector<double> env;
    env.resize(x.size() + 1);
    env[0] = t;
    std::copy(x.begin(), x.end(), env.begin() + 1);
    return eval(e, env);
  };
}

}  // namespace hypersde::expr
