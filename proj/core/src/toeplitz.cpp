#include "btq/toeplitz.hpp"

#include <cmath>

namespace btq {

ToeplitzOperator assemble(const QuantumBasis& basis, const Symbol& f, int threads) {
  const double eps = basis.model.epsilon;
  const int k = basis.k;
  auto factor = [&](cplx z, int, int) -> cplx {
    cplx v = f.eval(z);
    if (eps != 0.0) {
      double t = std::norm(z);
      double psi = z.real() / ((1.0 + t) * (1.0 + t));
      v *= std::exp(-2.0 * k * eps * psi);
    }
    return v;
  };
  ComplexMatrix raw = dictionary_bilinear(basis, factor, threads);
  ComplexMatrix m = basis.coeffs.adjoint() * raw * basis.coeffs;

  ToeplitzOperator op;
  op.basis = &basis;
  op.symbol_name = f.name();
  op.k = basis.k;
  op.q = basis.q;
  if (f.is_real()) {
    double scale = std::max(m.max_abs(), 1e-300);
    if (m.hermiticity_defect() > 1e-10 * scale)
      fail(ErrorKind::quadrature_resolution,
           "assemble: Hermiticity defect above tolerance; quadrature rule under-resolved for this symbol");
    for (int i = 0; i < m.rows; ++i) {
      for (int j = i; j < m.cols; ++j) {
        cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
        m(i, j) = v;
        m(j, i) = std::conj(v);
      }
      m(i, i) = cplx(m(i, i).real(), 0);
    }
  }
  op.matrix = std::move(m);
  return op;
}

ToeplitzOperator compose(const ToeplitzOperator& a, const ToeplitzOperator& b) {
  if (a.basis != b.basis)
    fail(ErrorKind::basis_mismatch, "compose: operators live on different bases");
  ToeplitzOperator op;
  op.basis = a.basis;
  op.symbol_name = "(" + a.symbol_name + ")o(" + b.symbol_name + ")";
  op.k = a.k;
  op.q = a.q;
  op.matrix = a.matrix * b.matrix;
  return op;
}

cplx kernel_value(const ToeplitzOperator& op, cplx x, cplx y) {
  const QuantumBasis& basis = *op.basis;
  // sandwich the dictionary frame: K(x,y) = u(x)^T (C M C^*) conj(u(y))
  ComplexMatrix cm = basis.coeffs * op.matrix * basis.coeffs.adjoint();
  std::vector<cplx> ux(basis.dictionary.size()), uy(basis.dictionary.size());
  for (size_t i = 0; i < basis.dictionary.size(); ++i) {
    ux[i] = basis.dictionary_value(static_cast<int>(i), x);
    uy[i] = basis.dictionary_value(static_cast<int>(i), y);
  }
  cplx acc = 0;
  for (size_t a = 0; a < ux.size(); ++a) {
    if (ux[a] == cplx(0)) continue;
    for (size_t b = 0; b < uy.size(); ++b)
      acc += ux[a] * cm(static_cast<int>(a), static_cast<int>(b)) * std::conj(uy[b]);
  }
  return acc;
}

KernelSample kernel_eval(const ToeplitzOperator& op, cplx x, cplx y, const PhaseModel& pm) {
  KernelSample s;
  s.x = x;
  s.y = y;
  s.dist = std::abs(x - y);
  s.raw = kernel_value(op, x, y);
  cplx ps = psi(pm, x, y);
  s.phase_normalized = std::exp(-cplx(0, 1) * double(op.k) * ps) * s.raw;
  return s;
}

double trace(const ToeplitzOperator& op) {
  std::vector<double> diag(op.matrix.rows);
  for (int i = 0; i < op.matrix.rows; ++i) diag[i] = op.matrix(i, i).real();
  return pairwise_sum(std::span<const double>(diag));
}

double weighted_trace(const QuantumBasis& basis, const Symbol& f) {
  const ComplexMatrix& gv = basis.grid_values();
  const std::size_t n = basis.grid.size();
  std::vector<double> terms(n);
  for (std::size_t p = 0; p < n; ++p) {
    double density = 0;
    for (int j = 0; j < basis.dimension(); ++j) density += std::norm(gv(j, static_cast<int>(p)));
    terms[p] = basis.grid.weights[p] * f.eval(basis.grid.nodes[p]).real() * density;
  }
  return pairwise_sum(std::span<const double>(terms));
}

} // namespace btq
