#include "btq/symbols.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace btq {

double Symbol::sup_on(const QuadratureRule& grid) const {
  double m = 0;
  for (cplx z : grid.nodes) m = std::max(m, std::abs(eval(z)));
  return m;
}

namespace {

class ConstantSymbol final : public Symbol {
public:
  explicit ConstantSymbol(double v) : v_(v) {}
  std::string name() const override {
    std::ostringstream os;
    os << v_;
    return os.str();
  }
  Jet jet(cplx, int order) const override { return Jet::constant(2, order, v_); }
  bool is_real() const override { return true; }

private:
  double v_;
};

class SphereSymbol final : public Symbol {
public:
  explicit SphereSymbol(int axis) : axis_(axis) {
    if (axis < 1 || axis > 3) fail(ErrorKind::config, "sphere symbol axis must be 1, 2 or 3");
  }
  std::string name() const override { return "x" + std::to_string(axis_); }
  Jet jet(cplx z0, int order) const override {
    Jet z = Jet::variable(2, order, 0, z0);
    Jet zb = Jet::variable(2, order, 1, std::conj(z0));
    Jet denom = inverse(z * zb + 1.0);
    switch (axis_) {
      case 1: return (z + zb) * denom;
      case 2: return (z - zb) * cplx(0, -1) * denom;
      default: return (1.0 - z * zb) * denom;
    }
  }
  bool is_real() const override { return true; }

private:
  int axis_;
};

class PolySymbol final : public Symbol {
public:
  explicit PolySymbol(std::vector<PolyTerm> terms) : terms_(std::move(terms)) {}
  std::string name() const override {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      if (!first) os << (t.coefficient >= 0 ? " + " : " - ");
      double c = first ? t.coefficient : std::abs(t.coefficient);
      os << c;
      if (t.z_power > 0) os << "*z^" << t.z_power;
      if (t.zbar_power > 0) os << "*zbar^" << t.zbar_power;
      first = false;
    }
    return first ? "0" : os.str();
  }
  Jet jet(cplx z0, int order) const override {
    Jet z = Jet::variable(2, order, 0, z0);
    Jet zb = Jet::variable(2, order, 1, std::conj(z0));
    Jet r(2, order);
    for (const auto& t : terms_) {
      Jet term = Jet::constant(2, order, t.coefficient);
      for (int i = 0; i < t.z_power; ++i) term = term * z;
      for (int i = 0; i < t.zbar_power; ++i) term = term * zb;
      r = r + term;
    }
    return r;
  }
  bool is_real() const override {
    // real iff symmetric under (a,b) -> (b,a)
    for (const auto& t : terms_) {
      double partner = 0;
      for (const auto& s : terms_)
        if (s.z_power == t.zbar_power && s.zbar_power == t.z_power) partner += s.coefficient;
      double self = 0;
      for (const auto& s : terms_)
        if (s.z_power == t.z_power && s.zbar_power == t.zbar_power) self += s.coefficient;
      if (std::abs(partner - self) > 1e-14 * (std::abs(self) + 1)) return false;
    }
    return true;
  }

private:
  std::vector<PolyTerm> terms_;
};

class ProductSymbol final : public Symbol {
public:
  ProductSymbol(SymbolPtr f, SymbolPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  std::string name() const override { return f_->name() + "*" + g_->name(); }
  Jet jet(cplx z, int order) const override { return f_->jet(z, order) * g_->jet(z, order); }
  bool is_real() const override { return f_->is_real() && g_->is_real(); }

private:
  SymbolPtr f_, g_;
};

class PoissonSymbol final : public Symbol {
public:
  PoissonSymbol(KahlerModel model, SymbolPtr f, SymbolPtr g)
      : model_(std::move(model)), f_(std::move(f)), g_(std::move(g)) {}
  std::string name() const override { return "{" + f_->name() + "," + g_->name() + "}"; }
  Jet jet(cplx z, int order) const override {
    Jet fj = f_->jet(z, order + 1);
    Jet gj = g_->jet(z, order + 1);
    Jet omega = omega11_jet(model_, z, order);
    Jet num = fj.derivative(0) * gj.derivative(1) - gj.derivative(0) * fj.derivative(1);
    return cplx(0, 1) / (2.0 * std::numbers::pi) * num.truncated(order) * inverse(omega);
  }
  bool is_real() const override { return f_->is_real() && g_->is_real(); }

private:
  KahlerModel model_;
  SymbolPtr f_, g_;
};

// --- polynomial text parser ---------------------------------------------------

struct Lexer {
  std::string s;
  size_t i = 0;
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
};

PolyTerm parse_term(Lexer& lx, double sign) {
  PolyTerm term{sign, 0, 0};
  bool saw_factor = false;
  bool expect_factor = true;
  while (true) {
    lx.skip();
    if (lx.i >= lx.s.size()) break;
    char c = lx.s[lx.i];
    if (c == '+' || c == '-') break;
    if (c == '*') {
      ++lx.i;
      expect_factor = true;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = 0;
      double v = std::stod(lx.s.substr(lx.i), &end);
      term.coefficient *= v;
      lx.i += end;
      saw_factor = true;
      expect_factor = false;
      continue;
    }
    if (lx.s.compare(lx.i, 4, "zbar") == 0 || c == 'z') {
      int* slot = (lx.s.compare(lx.i, 4, "zbar") == 0) ? &term.zbar_power : &term.z_power;
      lx.i += (slot == &term.zbar_power) ? 4 : 1;
      int power = 1;
      lx.skip();
      if (lx.i < lx.s.size() && lx.s[lx.i] == '^') {
        ++lx.i;
        lx.skip();
        size_t end = 0;
        power = std::stoi(lx.s.substr(lx.i), &end);
        if (power < 0) fail(ErrorKind::config, "symbol: negative power");
        lx.i += end;
      }
      *slot += power;
      saw_factor = true;
      expect_factor = false;
      continue;
    }
    fail(ErrorKind::config, std::string("symbol: unexpected character '") + c + "' in polynomial");
  }
  if (!saw_factor || expect_factor) fail(ErrorKind::config, "symbol: empty term in polynomial");
  return term;
}

SymbolPtr parse_polynomial(const std::string& text) {
  Lexer lx{text};
  std::vector<PolyTerm> terms;
  double sign = 1;
  if (lx.peek() == '-') {
    sign = -1;
    ++lx.i;
  } else if (lx.peek() == '+') {
    ++lx.i;
  }
  while (!lx.done()) {
    terms.push_back(parse_term(lx, sign));
    if (lx.done()) break;
    char c = lx.peek();
    if (c == '+') {
      sign = 1;
      ++lx.i;
    } else if (c == '-') {
      sign = -1;
      ++lx.i;
    } else {
      fail(ErrorKind::config, std::string("symbol: expected '+' or '-', found '") + c + "'");
    }
  }
  if (terms.empty()) fail(ErrorKind::config, "symbol: empty polynomial");
  return polynomial_symbol(std::move(terms));
}

SymbolPtr catalog_lookup(const std::string& token) {
  if (token == "1") return constant_symbol(1.0);
  if (token == "0") return constant_symbol(0.0);
  if (token == "x1") return sphere_symbol(1);
  if (token == "x2") return sphere_symbol(2);
  if (token == "x3") return sphere_symbol(3);
  return nullptr;
}

} // namespace

SymbolPtr constant_symbol(double value) { return std::make_shared<ConstantSymbol>(value); }
SymbolPtr sphere_symbol(int axis) { return std::make_shared<SphereSymbol>(axis); }
SymbolPtr polynomial_symbol(std::vector<PolyTerm> terms) { return std::make_shared<PolySymbol>(std::move(terms)); }
SymbolPtr product_symbol(SymbolPtr f, SymbolPtr g) {
  return std::make_shared<ProductSymbol>(std::move(f), std::move(g));
}
SymbolPtr poisson_bracket_symbol(const KahlerModel& model, SymbolPtr f, SymbolPtr g) {
  return std::make_shared<PoissonSymbol>(model, std::move(f), std::move(g));
}

SymbolPtr parse_symbol(const std::string& text) {
  // catalog names and '*'-products of catalog names take precedence
  std::vector<std::string> factors;
  std::string cur;
  bool catalog_ok = true;
  for (char c : text + "*") {
    if (c == '*') {
      while (!cur.empty() && cur.front() == ' ') cur.erase(cur.begin());
      while (!cur.empty() && cur.back() == ' ') cur.pop_back();
      factors.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  SymbolPtr acc;
  for (const auto& f : factors) {
    SymbolPtr s = catalog_lookup(f);
    if (!s) {
      catalog_ok = false;
      break;
    }
    acc = acc ? product_symbol(acc, s) : s;
  }
  if (catalog_ok && acc) return acc;
  return parse_polynomial(text);
}

std::vector<CatalogEntry> symbol_catalog() {
  return {
      {"1", "constant 1"},
      {"x1", "2 Re z / (1+|z|^2)"},
      {"x2", "2 Im z / (1+|z|^2)"},
      {"x3", "(1-|z|^2)/(1+|z|^2)"},
      {"<a>*<b>", "product of catalog symbols, e.g. x3*x1"},
      {"polynomial", "real coefficients in z, zbar, e.g. 1 + 0.5*z*zbar - z^2"},
  };
}

} // namespace btq
