#ifndef BTQ_JETS_HPP
#define BTQ_JETS_HPP

#include <complex>
#include <span>
#include <vector>

#include "btq/error.hpp"

namespace btq {

using cplx = std::complex<double>;

// Truncated multivariate Taylor expansion around a base point: the nested-dual
// ("hyper-dual") number generalized to arbitrary order.  Closed-form expressions
// evaluated over Jet arguments yield all mixed partial derivatives at once, with
// no truncation error for polynomial and composed elementary functions.
//
// Variables are abstract slots; for chart functions on a one-dimensional model
// the convention is slot 0 = z, slot 1 = zbar (see pair_conjugate()).
class Jet {
public:
  static constexpr int kMaxOrder = 16;

  Jet() = default;
  Jet(int vars, int order); // zero jet

  static Jet constant(int vars, int order, cplx value);
  static Jet variable(int vars, int order, int slot, cplx base);

  int vars() const { return vars_; }
  int order() const { return order_; }
  int terms() const { return static_cast<int>(coeff_.size()); }

  cplx value() const { return coeff_.empty() ? cplx(0) : coeff_[0]; }
  // Taylor coefficient of the monomial with the given exponents.
  cplx coeff(std::span<const int> powers) const;
  // Mixed partial derivative: coefficient times the factorials of the exponents.
  cplx partial(std::span<const int> powers) const;
  cplx coeff2(int p0, int p1) const;   // two-variable shorthand
  cplx partial2(int p0, int p1) const; // two-variable shorthand

  Jet operator-() const;
  Jet operator+(const Jet& rhs) const;
  Jet operator-(const Jet& rhs) const;
  Jet operator*(const Jet& rhs) const;
  Jet operator/(const Jet& rhs) const;
  Jet operator+(cplx s) const;
  Jet operator-(cplx s) const;
  Jet operator*(cplx s) const;
  Jet operator/(cplx s) const;
  friend Jet operator+(cplx s, const Jet& j) { return j + s; }
  friend Jet operator-(cplx s, const Jet& j) { return (-j) + s; }
  friend Jet operator*(cplx s, const Jet& j) { return j * s; }
  friend Jet operator/(cplx s, const Jet& j);

  Jet& operator+=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);

  // Formal derivative with respect to one slot.  The result is reliable only up
  // to order()-1; the returned jet keeps the same order with the top band zeroed.
  Jet derivative(int slot) const;
  Jet truncated(int new_order) const;
  // Substitutes args[i] for slot i (polynomial composition).  All args must share
  // vars/order; the base value of the outer jet's expansion must match: this
  // evaluates the stored polynomial literally.
  Jet evaluate(std::span<const Jet> args) const;
  // For the (z, zbar) slot convention: complex conjugate of the represented
  // function, i.e. conjugate coefficients with slots 0 and 1 swapped.
  Jet pair_conjugate() const;

  friend Jet exp(const Jet& u);
  friend Jet log(const Jet& u);
  friend Jet sqrt(const Jet& u);
  friend Jet pow_real(const Jet& u, double a);
  friend Jet inverse(const Jet& u);

  // Series of f applied to u given the derivatives f^(m)(u0), m = 0..order.
  static Jet apply_analytic(const Jet& u, std::span<const cplx> derivs_at_base);

private:
  int vars_ = 0;
  int order_ = 0;
  std::vector<cplx> coeff_; // dense, graded ordering from the shared index table

  friend struct JetTable;
  void require_compatible(const Jet& rhs) const;
};

} // namespace btq

#endif
