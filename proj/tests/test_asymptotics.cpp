#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "btq/asymptotics.hpp"
#include "btq/phase.hpp"

using namespace btq;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<Jet> real_vars(int dim, int order) {
  std::vector<Jet> v;
  for (int i = 0; i < dim; ++i) v.push_back(Jet::variable(dim, order, i, cplx(0)));
  return v;
}
} // namespace

TEST_CASE("stationary phase reproduces the Gaussian integral exactly") {
  auto v = real_vars(2, 4);
  StationaryPhaseProblem p;
  p.dim = 2;
  p.phase = cplx(0, 1) * (v[0] * v[0] + v[1] * v[1]);
  p.amplitude = Jet::constant(2, 4, 1.0);
  StationaryPhaseResult r = stationary_phase_terms(p, 7.5, 1);
  CHECK(std::abs(r.value - pi / 7.5) < 1e-14);
}

TEST_CASE("quadratic phases integrate polynomial amplitudes exactly") {
  auto v = real_vars(2, 8);
  StationaryPhaseProblem p;
  p.dim = 2;
  p.phase = cplx(0, 1) * (2.0 * v[0] * v[0] + 0.5 * v[1] * v[1]);
  p.amplitude = 1.0 + 3.0 * v[0] * v[0] + v[0] * v[1] + v[1] * v[1] * v[1] * v[1];
  auto mom = [&](double a, int m) {
    if (m % 2 == 1) return 0.0;
    double g = std::sqrt(pi / a);
    for (int i = 1; i <= m / 2; ++i) g *= (2.0 * i - 1.0) / (2.0 * a);
    return g;
  };
  for (double k : {5.0, 11.0}) {
    StationaryPhaseResult r = stationary_phase_terms(p, k, 4);
    double exact = mom(2 * k, 0) * mom(0.5 * k, 0) + 3 * mom(2 * k, 2) * mom(0.5 * k, 0) +
                   mom(2 * k, 0) * mom(0.5 * k, 4);
    CHECK(std::abs(r.value - exact) <= 1e-12 * std::abs(exact));
  }
}

TEST_CASE("quartic phase term values follow the known series coefficients") {
  // F = i|x|^2 + i x1^4: L_j = (-1)^j Gamma(2j + 1/2) / (j! Gamma(1/2))
  auto v = real_vars(2, 12);
  StationaryPhaseProblem p;
  p.dim = 2;
  p.phase = cplx(0, 1) * (v[0] * v[0] + v[1] * v[1]) + cplx(0, 1) * (v[0] * v[0] * v[0] * v[0]);
  p.amplitude = Jet::constant(2, 12, 1.0);
  StationaryPhaseResult r = stationary_phase_terms(p, 20.0, 3);
  CHECK(std::abs(r.terms[0] - cplx(1)) < 1e-13);
  CHECK(std::abs(r.terms[1] - cplx(-0.75)) < 1e-13);
  CHECK(std::abs(r.terms[2] - cplx(105.0 / 32)) < 1e-12);
}

TEST_CASE("stationary phase names the required jet order when starved") {
  auto v = real_vars(2, 4);
  StationaryPhaseProblem p;
  p.dim = 2;
  p.phase = cplx(0, 1) * (v[0] * v[0] + v[1] * v[1]) + cplx(0, 1) * (v[0] * v[0] * v[0] * v[0]);
  p.amplitude = Jet::constant(2, 4, 1.0);
  try {
    stationary_phase_terms(p, 10.0, 3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_order);
    CHECK(std::string(e.what()).find("order >= 8") != std::string::npos);
  }
}

TEST_CASE("stationary phase enforces a critical point") {
  auto v = real_vars(2, 4);
  StationaryPhaseProblem p;
  p.dim = 2;
  p.phase = cplx(0, 1) * (v[0] * v[0] + v[1] * v[1]) + 0.3 * v[0];
  p.amplitude = Jet::constant(2, 4, 1.0);
  CHECK_THROWS_AS(stationary_phase_terms(p, 10.0, 1), Error);
}

TEST_CASE("b0 is the density of states at every depth") {
  KahlerModel m = make_model(ModelKind::cp1_fs, 0.1);
  SymbolPtr f = sphere_symbol(1);
  for (cplx x : {cplx(0.2, 0.1), cplx(-0.3, 0.25)}) {
    CoefficientSet c = closed_form_coefficients(m, *f, x, 0);
    CurvatureReport rep = curvature_report(m, x);
    cplx expect = f->eval(x) * std::abs(rep.det_rdot) / (2 * pi);
    CHECK(std::abs(c.b0 - expect) < 1e-12);
  }
}

TEST_CASE("round-model Bergman coefficients: b1 = 1/2pi, b2 = 0") {
  KahlerModel m = make_model(ModelKind::cp1_fs);
  CoefficientSet c = closed_form_coefficients(m, *constant_symbol(1.0), cplx(0.3, -0.4), 2);
  CHECK(std::abs(c.b1 - cplx(1 / (2 * pi))) < 1e-12);
  CHECK(std::abs(c.b2) < 1e-10);
}

TEST_CASE("round-model height-symbol coefficients against the exact spin expansion") {
  // T_{x3} diagonal is x3 k(k+1)/((k+2) 2pi): b1 = -x3/2pi, b2 = 2 x3/2pi
  KahlerModel m = make_model(ModelKind::cp1_fs);
  SymbolPtr f = sphere_symbol(3);
  for (cplx x : {cplx(0.2, 0.0), cplx(-0.1, 0.35)}) {
    CoefficientSet c = closed_form_coefficients(m, *f, x, 2);
    double x3 = f->eval(x).real();
    CHECK(std::abs(c.b1 - cplx(-x3 / (2 * pi))) < 1e-11);
    CHECK(std::abs(c.b2 - cplx(x3 / pi)) < 1e-10);
  }
}

TEST_CASE("flat model has no subleading coefficients") {
  KahlerModel m = make_model(ModelKind::bargmann);
  CoefficientSet c = closed_form_coefficients(m, *constant_symbol(1.0), cplx(0.4, 0.2), 2);
  CHECK(std::abs(c.b1) < 1e-13);
  CHECK(std::abs(c.b2) < 1e-13);
}

TEST_CASE("composition coefficients reduce when one factor is constant") {
  KahlerModel m = make_model(ModelKind::cp1_fs, 0.1);
  SymbolPtr f = sphere_symbol(3);
  cplx x(0.2, -0.15);
  CoefficientSet single = closed_form_coefficients(m, *f, x, 2);
  CoefficientSet comp = composition_coefficients(m, *f, *constant_symbol(1.0), x, 2);
  CHECK(std::abs(comp.b0 - single.b0) < 1e-12);
  CHECK(std::abs(comp.b1 - single.b1) < 1e-12);
  CHECK(std::abs(comp.b2 - single.b2) < 1e-10);
}

TEST_CASE("composition against the exact flat-model ladder algebra") {
  // On the Bargmann space: T_x T_x with x = Re z has kernel diagonal (k x^2 + 1/4)/2pi,
  // so b_{x,x,0} = x^2/2pi, b_{x,x,1} = 1/(8 pi).  The z/zbar pair composes with
  // b_{z,zbar,1} = 0 and b_{zbar,z,1} = 1/(2 pi).
  KahlerModel m = make_model(ModelKind::bargmann);
  cplx p(0.3, -0.2);
  SymbolPtr x = polynomial_symbol({{0.5, 1, 0}, {0.5, 0, 1}});
  CoefficientSet cxx = composition_coefficients(m, *x, *x, p, 1);
  CHECK(std::abs(cxx.b0 - cplx(p.real() * p.real() / (2 * pi))) < 1e-12);
  CHECK(std::abs(cxx.b1 - cplx(1.0 / (8 * pi))) < 1e-12);

  SymbolPtr zsym = polynomial_symbol({{1.0, 1, 0}});
  SymbolPtr zbsym = polynomial_symbol({{1.0, 0, 1}});
  CoefficientSet czzb = composition_coefficients(m, *zsym, *zbsym, p, 1);
  CHECK(std::abs(czzb.b1) < 1e-12);
  CoefficientSet czbz = composition_coefficients(m, *zbsym, *zsym, p, 1);
  CHECK(std::abs(czbz.b1 - cplx(1.0 / (2 * pi))) < 1e-12);
}

TEST_CASE("star product basics") {
  KahlerModel m = make_model(ModelKind::cp1_fs);
  SymbolPtr f = sphere_symbol(3);
  SymbolPtr g = sphere_symbol(1);
  cplx x(0.2, 0.3);
  StarProduct sp = star_product(m, f, g, x, 2);
  CHECK(std::abs(sp.c0 - f->eval(x) * g->eval(x)) < 1e-14);
  StarProduct with_one = star_product(m, f, constant_symbol(1.0), x, 1);
  CHECK(std::abs(with_one.c1) < 1e-13);
  // direct formula: C1(f,g) = -(1/2pi) h^{11} f_z g_zbar
  CurvatureReport rep = curvature_report(m, x);
  Jet fj = f->jet(x, 2), gj = g->jet(x, 2);
  cplx direct = -1.0 / (2 * pi) / rep.omega_coeffs.real() * fj.partial2(1, 0) * gj.partial2(0, 1);
  CHECK(std::abs(sp.c1 - direct) < 1e-11);
}

TEST_CASE("antisymmetric part of C1 is the Poisson bracket") {
  KahlerModel m = make_model(ModelKind::cp1_fs, 0.1);
  SymbolPtr f = sphere_symbol(3);
  SymbolPtr g = sphere_symbol(1);
  SymbolPtr br = poisson_bracket_symbol(m, f, g);
  for (cplx x : {cplx(0.1, 0.2), cplx(-0.25, 0.05), cplx(0.3, -0.3), cplx(0.0, 0.0), cplx(-0.1, -0.2)}) {
    StarProduct fg = star_product(m, f, g, x, 1);
    StarProduct gf = star_product(m, g, f, x, 1);
    CHECK(std::abs(fg.c1 - gf.c1 - cplx(0, 1) * br->eval(x)) < 1e-6);
  }
}

TEST_CASE("recursion with exact round-model inputs reproduces the density") {
  KFrame frame = recenter(make_model(ModelKind::cp1_fs), 0, 8);
  RecursionInput in;
  in.lambda = frame.lambda;
  in.det_rdot = frame.det_rdot;
  in.phi1 = frame.phi1;
  in.v_theta = frame.v_theta;
  in.f = frame.pull_symbol(*constant_symbol(1.0), 8);
  in.bergman0 = Jet::constant(2, 6, 1.0 / (2 * pi));
  in.bergman1 = Jet::constant(2, 6, 1.0 / (2 * pi));
  in.bergman2 = Jet(2, 6);
  CoefficientSet rec = coefficient_recursion(in, 2);
  CHECK(std::abs(rec.b0 - cplx(1 / (2 * pi))) < 1e-13);
  CHECK(std::abs(rec.b1 - cplx(1 / (2 * pi))) < 1e-12);
  CHECK(std::abs(rec.b2) < 1e-12);
}

TEST_CASE("recursion matches a synthetic quadrature oracle with off-diagonal data") {
  // hand-built S_k = e^{ik Psi} (b0 k + b1) with anti-holomorphic first-order structure
  const double lam = 0.5;
  const double c22 = -0.10;
  const cplx v1(0.15, 0.1);
  const double v11 = -0.8;
  const cplx beta1(-0.04, 0.007);
  const cplx b0c(0.132, 0.0), b1c(0.21, 0.0), gamma1(0.05, -0.03);

  auto phi = [&](cplx z) { return lam * std::norm(z) + c22 * std::norm(z) * std::norm(z); };
  auto measure = [&](double k) {
    int n = 700;
    double span = std::min(0.8, 7.0 / std::sqrt(k * lam));
    double h = 2.0 * span / n;
    std::vector<cplx> terms;
    terms.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx z(-span + (i + 0.5) * h, -span + (j + 0.5) * h);
        double f_phase = 2 * phi(z); // ik(Psi(0,z)+Psi(z,0)) = -2k phi
        cplx b_left = (b0c + beta1 * std::conj(z)) * k + (b1c + gamma1 * std::conj(z));
        cplx b_right = (b0c + std::conj(beta1) * z) * k + (b1c + std::conj(gamma1) * z);
        double fsym = 1.0 + 0.5 * 2 * z.real() + 0.3 * std::norm(z);
        double vth = 1.0 + 2.0 * (v1 * z).real() + v11 * std::norm(z);
        terms.push_back(std::exp(-k * f_phase) * b_left * b_right * fsym * vth * 2.0 * h * h);
      }
    return pairwise_sum(std::span<const cplx>(terms));
  };
  std::vector<double> ks = {100, 140, 200, 280, 400};
  std::vector<cplx> vals;
  for (double k : ks) vals.push_back(measure(k));
  LeastSquaresFit fit = least_squares_fit(ks, vals, std::vector<double>{1, 0, -1, -2});

  const int ord = 8;
  Jet z = Jet::variable(2, ord, 0, cplx(0));
  Jet zb = Jet::variable(2, ord, 1, cplx(0));
  RecursionInput in;
  in.lambda = lam;
  in.det_rdot = 2 * lam;
  in.phi1 = c22 * z * z * zb * zb;
  in.v_theta = 1.0 + v1 * z + std::conj(v1) * zb + v11 * z * zb;
  in.f = 1.0 + 0.5 * (z + zb) + 0.3 * z * zb;
  in.bergman0 = b0c + beta1 * zb;
  in.bergman1 = b1c + gamma1 * zb;
  in.bergman2 = Jet(2, ord);
  CoefficientSet rec = coefficient_recursion(in, 1);
  CHECK(std::abs(rec.b0 - fit.coefficients[0]) < 1e-6 * std::abs(fit.coefficients[0]));
  CHECK(std::abs(rec.b1 - fit.coefficients[1]) < 1e-4 * std::abs(fit.coefficients[1]));
}

TEST_CASE("coefficient formulas reject points outside M(0)") {
  KahlerModel m = make_model(ModelKind::landau_q1);
  CHECK_THROWS_AS(closed_form_coefficients(m, *constant_symbol(1.0), 0, 1), Error);
}
