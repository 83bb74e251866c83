#ifndef BTQ_TOEPLITZ_HPP
#define BTQ_TOEPLITZ_HPP

#include <string>

#include "btq/phase.hpp"
#include "btq/quantum.hpp"

namespace btq {

// Compression P f P of pointwise multiplication to the quantum space, as a
// matrix in the orthonormal basis.  Holds a reference to the basis it was
// assembled on; the basis must outlive the operator.
struct ToeplitzOperator {
  const QuantumBasis* basis = nullptr;
  std::string symbol_name;
  ComplexMatrix matrix;
  int k = 0;
  int q = 0;

  int dimension() const { return matrix.rows; }
};

ToeplitzOperator assemble(const QuantumBasis& basis, const Symbol& f, int threads = 0);

// Matrix product of two operators on the same basis (the finite-dimensional
// realization of T_f o T_g).
ToeplitzOperator compose(const ToeplitzOperator& a, const ToeplitzOperator& b);

struct KernelSample {
  cplx x, y;
  cplx raw;
  cplx phase_normalized; // e^{-ik Psi(x,y)} raw
  double dist = 0;       // chart distance |x - y|
};

// Localized Schwartz kernel of the operator at arbitrary chart points;
// off-grid points re-evaluate the dictionary sections directly.
cplx kernel_value(const ToeplitzOperator& op, cplx x, cplx y);
KernelSample kernel_eval(const ToeplitzOperator& op, cplx x, cplx y, const PhaseModel& pm);

double trace(const ToeplitzOperator& op);
// integral of f times the projector diagonal; agrees with trace(T_f) by cyclicity
double weighted_trace(const QuantumBasis& basis, const Symbol& f);

} // namespace btq

#endif
