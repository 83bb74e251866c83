#include <doctest.h>

#include <cmath>
#include <random>

#include "btq/phase.hpp"

using namespace btq;

namespace {

PhaseModel quadratic_model(double lambda) {
  PhaseModel pm;
  pm.center = 0;
  pm.lambda = {lambda};
  pm.phi_jets = Jet::variable(2, 8, 0, 0) * Jet::variable(2, 8, 1, 0) * lambda;
  pm.mode = PhaseModel::Mode::quadratic;
  return pm;
}

} // namespace

TEST_CASE("quadratic phase vanishes on the diagonal") {
  PhaseModel pm = quadratic_model(0.5);
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.05)}) CHECK(std::abs(psi_quadratic(pm, z, z)) < 1e-15);
}

TEST_CASE("quadratic phase at lambda = 1/2, z = 1, w = 0") {
  PhaseModel pm = quadratic_model(0.5);
  CHECK(std::abs(psi_quadratic(pm, 1, 0) - cplx(0, 0.5)) < 1e-15);
}

TEST_CASE("quadratic phase obeys the positivity bound on random pairs") {
  PhaseModel pm = quadratic_model(0.5);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(-0.3, 0.3);
  for (int i = 0; i < 100; ++i) {
    cplx z(unif(rng), unif(rng)), w(unif(rng), unif(rng));
    double bound = 0.25 * 0.5 * std::norm(z - w);
    CHECK(psi_quadratic(pm, z, w).imag() >= bound - 1e-15);
  }
}

TEST_CASE("flat-model weight polarizes exactly") {
  KFrame frame = recenter(make_model(ModelKind::bargmann), 0, 8);
  PhaseModel pm = frame.phase_model();
  for (auto [z, w] : {std::pair{cplx(0.2, 0.1), cplx(-0.1, 0.3)}, {cplx(0.4, 0), cplx(0, 0)}}) {
    cplx expected = cplx(0, 1) * (0.5 * std::norm(z) + 0.5 * std::norm(w) - z * std::conj(w));
    CHECK(std::abs(psi_polarized(pm, z, w, 8) - expected) < 1e-14);
  }
  // at w = 0 the phase reduces to i phi(z)
  cplx z(0.3, -0.2);
  CHECK(std::abs(psi_polarized(pm, z, 0, 8) - cplx(0, 1) * cplx(0.5 * std::norm(z))) < 1e-14);
}

TEST_CASE("polarized phase vanishes on the diagonal to high order") {
  KFrame frame = recenter(make_model(ModelKind::cp1_fs), 0, 8);
  PhaseModel pm = frame.phase_model();
  for (double r : {0.05, 0.1, 0.2}) {
    cplx z(r, 0.4 * r);
    double bound = 40.0 * std::pow(std::abs(z), 9.0); // remainder O(|z|^{N+1})
    CHECK(std::abs(psi_polarized(pm, z, z, 8)) <= bound + 1e-15);
  }
}

TEST_CASE("polarized phase has exact conjugate antisymmetry") {
  KFrame frame = recenter(make_model(ModelKind::cp1_fs, 0.1), cplx(0.2, -0.1), 8);
  PhaseModel pm = frame.phase_model();
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> unif(-0.2, 0.2);
  for (int i = 0; i < 20; ++i) {
    cplx z(unif(rng), unif(rng)), w(unif(rng), unif(rng));
    cplx lhs = psi_polarized(pm, z, w, 8);
    cplx rhs = -std::conj(psi_polarized(pm, w, z, 8));
    CHECK(std::abs(lhs - rhs) < 1e-12);
    cplx quad = psi_quadratic(pm, z, w);
    CHECK(std::abs(quad + std::conj(psi_quadratic(pm, w, z))) < 1e-15);
  }
}

TEST_CASE("polarized minus quadratic phase is third order") {
  KFrame frame = recenter(make_model(ModelKind::cp1_fs), 0, 8);
  PhaseModel pm = frame.phase_model();
  double prev_ratio = 0;
  for (double s : {0.2, 0.1, 0.05, 0.025}) {
    cplx z(s, 0.3 * s), w(-0.5 * s, 0.2 * s);
    double scale = std::pow(std::hypot(std::abs(z), std::abs(w)), 3.0);
    double ratio = std::abs(psi_polarized(pm, z, w, 8) - psi_quadratic(pm, z, w)) / scale;
    CHECK(ratio < 2.0);
    if (prev_ratio > 0) CHECK(ratio < 4 * prev_ratio); // bounded, no lower-order残 term
    prev_ratio = ratio;
  }
}

TEST_CASE("recentering reproduces the invariant curvature data") {
  KahlerModel model = make_model(ModelKind::cp1_fs, 0.1);
  for (cplx p : {cplx(0.25, 0.1), cplx(-0.15, 0.3)}) {
    KFrame frame = recenter(model, p, 8);
    CurvatureReport rep = curvature_report(model, p);
    CHECK(frame.det_rdot == doctest::Approx(rep.det_rdot).epsilon(1e-10));
    CHECK(std::abs(frame.to_chart(0) - p) < 1e-14);
    CHECK(std::abs(frame.phi.value()) < 1e-14);           // weight normalized at the center
    CHECK(std::abs(frame.phi.coeff2(2, 0)) < 1e-12);      // no pure terms
    CHECK(std::abs(frame.phi.coeff2(3, 1)) < 1e-12);      // no (a,1) mixed terms
    CHECK(frame.v_theta.value().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("recentered jets agree with direct evaluation through the chart map") {
  KahlerModel model = make_model(ModelKind::cp1_fs, 0.1);
  KFrame frame = recenter(model, cplx(0.25, 0.1), 8);
  auto eval_jet = [](const Jet& j, cplx z) {
    cplx acc = 0;
    for (int a = 0; a <= j.order(); ++a)
      for (int b = 0; a + b <= j.order(); ++b) {
        cplx c = j.coeff2(a, b), v = c;
        for (int i = 0; i < a; ++i) v *= z;
        for (int i = 0; i < b; ++i) v *= std::conj(z);
        acc += v;
      }
    return acc;
  };
  for (double r : {0.05, 0.1}) {
    cplx w(r, -0.5 * r);
    cplx zc = frame.to_chart(w);
    // twist value g(zeta(w))
    cplx zeta = 0;
    for (int a = 0; a <= 8; ++a) {
      cplx c = frame.chart_series.coeff2(a, 0), v = c;
      for (int i = 0; i < a; ++i) v *= w;
      zeta += v;
    }
    cplx g = eval_jet(frame.twist, zeta);
    double direct = model.weight(zc) + g.real();
    CHECK(std::abs(eval_jet(frame.phi, w).real() - direct) < 1e-8);

    double h = 1e-5;
    cplx dzdw = (frame.to_chart(w + h) - frame.to_chart(w - h)) / (2 * h);
    double vt_direct = model.theta(zc) * std::norm(dzdw);
    CHECK(std::abs(eval_jet(frame.v_theta, w).real() - vt_direct) < 1e-6);
  }
}

TEST_CASE("polarized mode is refused for negative curvature") {
  KFrame frame = recenter(make_model(ModelKind::landau_q1), 0, 8);
  CHECK(frame.lambda == doctest::Approx(-0.5));
  CHECK_THROWS_AS(frame.phase_model(PhaseModel::Mode::polarized), Error);
  PhaseModel pm = frame.phase_model(PhaseModel::Mode::quadratic);
  CHECK(std::abs(psi_quadratic(pm, cplx(0.1, 0), 0) - cplx(0, 0.5 * 0.01 /*|lam| |z|^2*/) -
                 cplx(0, -0.5) * cplx(0) /*drift at w=0*/) < 1e-12);
}
