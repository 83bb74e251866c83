#include "btq/phase.hpp"

#include <array>
#include <cmath>

namespace btq {

namespace {

cplx ipow(cplx z, int n) {
  cplx r = 1;
  cplx base = z;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

// evaluate the polynomial stored in a (z, zbar) jet at a concrete point
cplx eval_jet_poly(const Jet& j, cplx z, cplx zbar) {
  cplx acc = 0;
  for (int a = 0; a <= j.order(); ++a)
    for (int b = 0; b + a <= j.order(); ++b) {
      cplx c = j.coeff2(a, b);
      if (c == cplx(0)) continue;
      acc += c * ipow(z, a) * ipow(zbar, b);
    }
  return acc;
}

cplx eval_holomorphic_series(const Jet& j, cplx w) {
  cplx acc = 0;
  for (int a = 0; a <= j.order(); ++a) {
    cplx c = j.coeff2(a, 0);
    if (c == cplx(0)) continue;
    acc += c * ipow(w, a);
  }
  return acc;
}

} // namespace

cplx psi_quadratic(const PhaseModel& pm, cplx z, cplx w) {
  const double lam = pm.lambda.at(0);
  cplx diff = z - w;
  cplx drift = std::conj(z) * w - z * std::conj(w);
  return cplx(0, 1) * (std::abs(lam) * std::norm(diff)) + cplx(0, 1) * lam * drift;
}

cplx psi_polarized(const PhaseModel& pm, cplx z, cplx w, int order) {
  if (order > pm.taylor_order())
    fail(ErrorKind::unsupported_order,
         "psi_polarized: order " + std::to_string(order) + " exceeds stored jets (" +
             std::to_string(pm.taylor_order()) + ")");
  cplx phi_z = eval_jet_poly(pm.phi_jets, z, std::conj(z));
  cplx phi_w = eval_jet_poly(pm.phi_jets, w, std::conj(w));
  cplx polar = 0;
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) {
      cplx c = pm.phi_jets.coeff2(a, b);
      if (c == cplx(0)) continue;
      polar += c * ipow(z, a) * ipow(std::conj(w), b);
    }
  return cplx(0, 1) * (phi_z + phi_w) - cplx(0, 2) * polar;
}

cplx psi(const PhaseModel& pm, cplx z, cplx w) {
  if (pm.mode == PhaseModel::Mode::quadratic) return psi_quadratic(pm, z, w);
  return psi_polarized(pm, z, w, pm.taylor_order());
}

cplx KFrame::to_chart(cplx w) const {
  cplx zeta = eval_holomorphic_series(chart_series, w);
  if (model.kind == ModelKind::cp1_fs) return (zeta + center) / (1.0 - std::conj(center) * zeta);
  return center + zeta;
}

cplx KFrame::twist_phase(double k, cplx w) const {
  cplx zeta = eval_holomorphic_series(chart_series, w);
  cplx g = eval_jet_poly(twist, zeta, std::conj(zeta));
  return std::exp(cplx(0, 1) * k * g.imag());
}

Jet KFrame::pull_symbol(const Symbol& f, int order) const {
  const int ord = std::min(order, phi.order());
  Jet zeta = chart_series.truncated(ord);
  Jet zeta_bar = zeta.pair_conjugate();
  Jet delta, delta_bar;
  if (model.kind == ModelKind::cp1_fs) {
    Jet denom = 1.0 - std::conj(center) * zeta;
    Jet m = (zeta + center) * inverse(denom);
    delta = m - center;
    delta_bar = delta.pair_conjugate();
  } else {
    delta = zeta;
    delta_bar = zeta_bar;
  }
  Jet f_at_p = f.jet(center, ord);
  return f_at_p.evaluate(std::array<Jet, 2>{delta, delta_bar});
}

PhaseModel KFrame::phase_model(PhaseModel::Mode mode) const {
  PhaseModel pm;
  pm.center = center;
  pm.lambda = {lambda};
  pm.phi_jets = phi;
  pm.mode = mode;
  if (lambda == 0) fail(ErrorKind::geometry, "phase model requires nondegenerate curvature");
  if (mode == PhaseModel::Mode::polarized && lambda < 0)
    fail(ErrorKind::domain, "polarized phase is available only in the q=0 (positive) case");
  return pm;
}

KFrame recenter(const KahlerModel& model, cplx p, int order) {
  KFrame kf;
  kf.model = model;
  kf.center = p;
  const int ord = order;

  // Step 1: chart map and the pulled-back weight/theta jets in zeta
  Jet zeta = Jet::variable(2, ord, 0, cplx(0));
  Jet zeta_bar = Jet::variable(2, ord, 1, cplx(0));
  Jet phi_zeta, theta_zeta;
  if (model.kind == ModelKind::cp1_fs) {
    Jet denom = 1.0 - std::conj(p) * zeta;
    Jet m = (zeta + p) * inverse(denom);
    Jet m_bar = m.pair_conjugate();
    Jet delta = m - p;
    Jet delta_bar = m_bar - std::conj(p);
    Jet phi_at_p = model.weight_jet(p, ord);
    phi_zeta = phi_at_p.evaluate(std::array<Jet, 2>{delta, delta_bar});
    Jet theta_at_p = model.theta_jet(p, ord);
    Jet theta_pull = theta_at_p.evaluate(std::array<Jet, 2>{delta, delta_bar});
    Jet m_prime = m.derivative(0);
    theta_zeta = theta_pull * m_prime * m_prime.pair_conjugate();
  } else {
    Jet phi_at_p = model.weight_jet(p, ord);
    phi_zeta = phi_at_p.evaluate(std::array<Jet, 2>{zeta, zeta_bar});
    theta_zeta = model.theta_jet(p, ord).evaluate(std::array<Jet, 2>{zeta, zeta_bar});
  }

  // Step 2: frame twist kills the pure-holomorphic terms; the real constant
  // phi(p) appears once, the a >= 1 pure terms together with their conjugates
  Jet g(2, ord);
  for (int a = 0; a <= ord; ++a) {
    cplx c = phi_zeta.coeff2(a, 0);
    if (c == cplx(0)) continue;
    Jet mono = Jet::constant(2, ord, (a == 0) ? -c : -2.0 * c);
    for (int i = 0; i < a; ++i) mono = mono * zeta;
    g = g + mono;
  }
  Jet phi_twisted = phi_zeta + 0.5 * (g + g.pair_conjugate());
  kf.twist = g;

  // Step 3: holomorphic change zeta = S(w) removing the (a,1) mixed terms, a >= 2
  double lam_zeta = phi_twisted.coeff2(1, 1).real();
  if (lam_zeta == 0.0) fail(ErrorKind::geometry, "recenter: degenerate curvature at the point");
  Jet w_var = Jet::variable(2, ord, 0, cplx(0));
  Jet s = w_var; // S(w), pure-w series
  for (int a = 2; a < ord; ++a) {
    Jet cur = phi_twisted.evaluate(std::array<Jet, 2>{s, s.pair_conjugate()});
    cplx c = cur.coeff2(a, 1);
    if (c == cplx(0)) continue;
    Jet mono = Jet::constant(2, ord, -c / lam_zeta);
    for (int i = 0; i < a; ++i) mono = mono * w_var;
    s = s + mono;
  }

  // Step 4: real scaling so Theta(0) is Euclidean
  double theta0 = theta_zeta.value().real();
  if (theta0 <= 0) fail(ErrorKind::geometry, "recenter: Theta not positive at the point");
  double sigma = std::sqrt(theta0);
  if (sigma != 1.0) {
    Jet scaled(2, ord);
    for (int a = 0; a <= ord; ++a) {
      cplx c = s.coeff2(a, 0);
      if (c == cplx(0)) continue;
      Jet mono = Jet::constant(2, ord, c * std::pow(sigma, -double(a)));
      for (int i = 0; i < a; ++i) mono = mono * w_var;
      scaled = scaled + mono;
    }
    s = scaled;
  }
  kf.chart_series = s;

  // Step 5: final jets in the w coordinates
  Jet s_bar = s.pair_conjugate();
  kf.phi = phi_twisted.evaluate(std::array<Jet, 2>{s, s_bar});
  Jet s_prime = s.derivative(0);
  kf.v_theta = theta_zeta.evaluate(std::array<Jet, 2>{s, s_bar}) * s_prime * s_prime.pair_conjugate();
  kf.lambda = kf.phi.coeff2(1, 1).real();
  kf.det_rdot = 2.0 * kf.lambda;
  kf.phi1 = kf.phi - Jet::variable(2, ord, 0, cplx(0)) * Jet::variable(2, ord, 1, cplx(0)) * kf.lambda;
  return kf;
}

} // namespace btq
