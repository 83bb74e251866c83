#include <benchmark/benchmark.h>

#include "btq/experiments.hpp"

using namespace btq;

namespace {

void BM_JetProductOrder8(benchmark::State& state) {
  Jet z = Jet::variable(2, 8, 0, cplx(0.3, 0.1));
  Jet zb = Jet::variable(2, 8, 1, cplx(0.3, -0.1));
  Jet a = exp(z * zb) * inverse(1.0 + z * zb);
  for (auto _ : state) {
    Jet b = a * a;
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_JetProductOrder8);

void BM_HermitianEig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cplx v(std::sin(0.7 * i + j), (i == j) ? 0.0 : std::cos(1.3 * i - j));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  for (auto _ : state) {
    EigResult e = hermitian_eig(a);
    benchmark::DoNotOptimize(e.eigenvalues.back());
  }
}
BENCHMARK(BM_HermitianEig)->Arg(32)->Arg(64)->Arg(128);

void BM_BuildBasis(benchmark::State& state) {
  KahlerModel model = make_model(ModelKind::cp1_fs, 0.1);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    QuantumBasis basis = build_basis(model, k);
    benchmark::DoNotOptimize(basis.dimension());
  }
}
BENCHMARK(BM_BuildBasis)->Arg(16)->Arg(48)->Arg(96);

void BM_ToeplitzAssemble(benchmark::State& state) {
  KahlerModel model = make_model(ModelKind::cp1_fs, 0.1);
  const int k = static_cast<int>(state.range(0));
  QuantumBasis basis = build_basis(model, k);
  SymbolPtr f = sphere_symbol(3);
  for (auto _ : state) {
    ToeplitzOperator op = assemble(basis, *f);
    benchmark::DoNotOptimize(op.matrix.max_abs());
  }
}
BENCHMARK(BM_ToeplitzAssemble)->Arg(16)->Arg(48)->Arg(96);

void BM_CurvatureReport(benchmark::State& state) {
  KahlerModel model = make_model(ModelKind::cp1_fs, 0.1);
  for (auto _ : state) {
    CurvatureReport rep = curvature_report(model, cplx(0.3, -0.2));
    benchmark::DoNotOptimize(rep.r);
  }
}
BENCHMARK(BM_CurvatureReport);

void BM_ExpansionExperiment(benchmark::State& state) {
  KahlerModel model = make_model(ModelKind::cp1_fs);
  for (auto _ : state) {
    auto rep = fit_diagonal_expansion(model, constant_symbol(1.0), {cplx(0.2, 0.1)}, {8, 12, 16, 24}, 1);
    benchmark::DoNotOptimize(rep.fits.front().coefficients[0]);
  }
}
BENCHMARK(BM_ExpansionExperiment);

} // namespace

BENCHMARK_MAIN();
