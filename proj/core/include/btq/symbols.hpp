#ifndef BTQ_SYMBOLS_HPP
#define BTQ_SYMBOLS_HPP

#include <memory>
#include <string>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/jets.hpp"

namespace btq {

// A classical observable on the chart: closed-form evaluation plus jets of any
// order, so the same object feeds quadrature grids and coefficient formulas.
class Symbol {
public:
  virtual ~Symbol() = default;
  virtual std::string name() const = 0;
  virtual Jet jet(cplx z, int order) const = 0;
  virtual bool is_real() const = 0;
  cplx eval(cplx z) const { return jet(z, 0).value(); }

  double sup_on(const QuadratureRule& grid) const;
};

using SymbolPtr = std::shared_ptr<const Symbol>;

SymbolPtr constant_symbol(double value);
// Sphere coordinates pulled back to the chart:
//   x1 = 2 Re z / (1+|z|^2), x2 = 2 Im z / (1+|z|^2), x3 = (1-|z|^2)/(1+|z|^2)
SymbolPtr sphere_symbol(int axis);
// Real-coefficient polynomial in z and zbar: sum c_i z^{a_i} zbar^{b_i}.
struct PolyTerm {
  double coefficient;
  int z_power;
  int zbar_power;
};
SymbolPtr polynomial_symbol(std::vector<PolyTerm> terms);
SymbolPtr product_symbol(SymbolPtr f, SymbolPtr g);
// Poisson bracket {f,g} on (M, 2 pi omega), realized pointwise through jets.
SymbolPtr poisson_bracket_symbol(const KahlerModel& model, SymbolPtr f, SymbolPtr g);

// Parses a catalog name ("1", "x1", "x2", "x3", products like "x3*x1") or a
// real-coefficient polynomial in z and zbar (e.g. "1 + 0.5*z*zbar - z^2").
// Throws ErrorKind::config naming the offending token.
SymbolPtr parse_symbol(const std::string& text);

struct CatalogEntry {
  std::string name;
  std::string chart_formula;
};
std::vector<CatalogEntry> symbol_catalog();

} // namespace btq

#endif
