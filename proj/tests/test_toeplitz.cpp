#include <doctest.h>

#include <cmath>
#include <numbers>

#include "btq/toeplitz.hpp"

using namespace btq;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("the unit symbol compresses to the identity") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), 8);
  ToeplitzOperator op = assemble(basis, *constant_symbol(1.0));
  CHECK((op.matrix - ComplexMatrix::identity(basis.dimension())).max_abs() < 1e-11);
}

TEST_CASE("height symbol on the round model is the spin matrix") {
  const int k = 8;
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), k);
  ToeplitzOperator op = assemble(basis, *sphere_symbol(3));
  for (int m = 0; m <= k; ++m) {
    double expected = double(k - 2 * m) / (k + 2);
    CHECK(op.matrix(m, m).real() == doctest::Approx(expected).epsilon(1e-11));
    for (int l = 0; l <= k; ++l)
      if (l != m) CHECK(std::abs(op.matrix(m, l)) < 1e-11);
  }
}

TEST_CASE("nonnegative symbols give positive semidefinite operators") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs, 0.1), 10);
  SymbolPtr f = product_symbol(sphere_symbol(3), sphere_symbol(3)); // x3^2 >= 0
  ToeplitzOperator op = assemble(basis, *f);
  EigResult e = hermitian_eig(op.matrix);
  CHECK(e.eigenvalues.front() >= -1e-9);
}

TEST_CASE("composing with the identity is the identity of composition") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), 8);
  ToeplitzOperator tf = assemble(basis, *sphere_symbol(3));
  ToeplitzOperator id = assemble(basis, *constant_symbol(1.0));
  ToeplitzOperator prod = compose(tf, id);
  CHECK((prod.matrix - tf.matrix).max_abs() < 1e-11);
}

TEST_CASE("composition defect decays like 1/k") {
  SymbolPtr f = sphere_symbol(3);
  SymbolPtr g = sphere_symbol(1);
  SymbolPtr fg = product_symbol(f, g);
  double defect[2];
  int idx = 0;
  for (int k : {16, 32}) {
    QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), k);
    ToeplitzOperator tf = assemble(basis, *f);
    ToeplitzOperator tg = assemble(basis, *g);
    ToeplitzOperator tfg = assemble(basis, *fg);
    defect[idx++] = operator_norm(compose(tf, tg).matrix - tfg.matrix);
  }
  double ratio = defect[1] / defect[0];
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.65);
}

TEST_CASE("operators from different bases refuse to compose") {
  QuantumBasis b1 = build_basis(make_model(ModelKind::cp1_fs), 6);
  QuantumBasis b2 = build_basis(make_model(ModelKind::cp1_fs), 8);
  ToeplitzOperator t1 = assemble(b1, *constant_symbol(1.0));
  ToeplitzOperator t2 = assemble(b2, *constant_symbol(1.0));
  CHECK_THROWS_AS(compose(t1, t2), Error);
}

TEST_CASE("kernel diagonal of the projector matches the round density") {
  const int k = 12;
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), k);
  ToeplitzOperator id = assemble(basis, *constant_symbol(1.0));
  cplx v = kernel_value(id, cplx(0.2, -0.1), cplx(0.2, -0.1));
  CHECK(v.real() == doctest::Approx((k + 1) / (2 * pi)).epsilon(1e-9));
  CHECK(std::abs(v.imag()) < 1e-12);
}

TEST_CASE("kernels of real symbols are Hermitian") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs, 0.1), 10);
  ToeplitzOperator op = assemble(basis, *sphere_symbol(1));
  cplx x(0.15, 0.05), y(-0.2, 0.1);
  CHECK(std::abs(kernel_value(op, x, y) - std::conj(kernel_value(op, y, x))) < 1e-10);
}

TEST_CASE("the phase carries the off-diagonal decay") {
  const int k = 32;
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), k);
  ToeplitzOperator id = assemble(basis, *constant_symbol(1.0));
  KFrame frame = recenter(make_model(ModelKind::cp1_fs), 0, 8);
  PhaseModel pm = frame.phase_model();
  double raw_min = 1e300, raw_max = 0, norm_min = 1e300, norm_max = 0;
  for (double d : {0.0, 0.05, 0.1, 0.15, 0.2}) {
    KernelSample s = kernel_eval(id, 0, cplx(d, 0), pm);
    raw_min = std::min(raw_min, std::abs(s.raw));
    raw_max = std::max(raw_max, std::abs(s.raw));
    norm_min = std::min(norm_min, std::abs(s.phase_normalized));
    norm_max = std::max(norm_max, std::abs(s.phase_normalized));
    if (d == 0.0) CHECK(std::abs(s.phase_normalized - s.raw) < 1e-12);
  }
  CHECK(norm_max / norm_min <= 1.30);                   // symbol variation stays within 30%
  CHECK(raw_max / raw_min >= std::exp(32 * 0.5 * 0.04 * 0.8)); // Gaussian factor over d <= 0.2
}

TEST_CASE("trace identities on the round model") {
  const int k = 10;
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs), k);
  ToeplitzOperator id = assemble(basis, *constant_symbol(1.0));
  CHECK(trace(id) == doctest::Approx(k + 1).epsilon(1e-12));
  ToeplitzOperator t3 = assemble(basis, *sphere_symbol(3));
  CHECK(std::abs(trace(t3)) < 1e-10);
}

TEST_CASE("trace equals the weighted trace for a generic symbol") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs, 0.1), 12);
  SymbolPtr f = polynomial_symbol({{0.3, 0, 0}, {0.25, 1, 1}, {0.1, 1, 0}, {0.1, 0, 1}});
  ToeplitzOperator op = assemble(basis, *f);
  double tr = trace(op);
  double wt = weighted_trace(basis, *f);
  CHECK(std::abs(tr - wt) <= 1e-8 * std::max(1.0, std::abs(tr)));
}

TEST_CASE("operator norm is bounded by the sup of the symbol") {
  QuantumBasis basis = build_basis(make_model(ModelKind::cp1_fs, 0.1), 12);
  for (auto f : {sphere_symbol(1), sphere_symbol(3), product_symbol(sphere_symbol(3), sphere_symbol(1))}) {
    ToeplitzOperator op = assemble(basis, *f);
    CHECK(operator_norm(op.matrix) <= f->sup_on(basis.grid) + 1e-8);
  }
}

TEST_CASE("under-resolved angular rules are rejected, not silently symmetrized") {
  QuantumBasis basis;
  BasisOptions opts;
  opts.n_angular = 10; // k = 8 needs far more angular nodes for x1
  bool threw = false;
  try {
    basis = build_basis(make_model(ModelKind::cp1_fs), 8, opts);
    ToeplitzOperator op = assemble(basis, *sphere_symbol(1));
    (void)op;
  } catch (const Error& e) {
    threw = true;
    CHECK((e.kind() == ErrorKind::quadrature_resolution || e.kind() == ErrorKind::convention_violation));
  }
  CHECK(threw);
}
