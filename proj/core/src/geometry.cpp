#include "btq/geometry.hpp"

#include <cmath>
#include <numbers>

namespace btq {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string convention_summary() {
  return "weight:e^-2phi;RL:2ddbar_phi;mu:geneig(2ddbar_phi,Theta);omega:ddbar_phi/pi;"
         "laplacian:-2h^jk;r:lap_logVomega;rhat:lap_logVTheta;Ric:logVomega_jkbar;"
         "Rdet:logVTheta_jkbar;pair:a.conj(c).h.h;C1:-(1/2pi)<df|dgbar>;poisson:2pi_omega;"
         "detbranch:arg(-pi/2,pi/2]";
}

std::uint64_t convention_hash() {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : convention_summary()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::cp1_fs: return "cp1_fs";
    case ModelKind::bargmann: return "bargmann";
    case ModelKind::landau_q1: return "landau_q1";
    case ModelKind::degenerate_quartic: return "degenerate_quartic";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
  if (name == "cp1_fs") return ModelKind::cp1_fs;
  if (name == "bargmann") return ModelKind::bargmann;
  if (name == "landau_q1") return ModelKind::landau_q1;
  if (name == "degenerate_quartic") return ModelKind::degenerate_quartic;
  return std::nullopt;
}

Jet KahlerModel::weight_jet(cplx z0, int order) const {
  Jet z = Jet::variable(2, order, 0, z0);
  Jet zb = Jet::variable(2, order, 1, std::conj(z0));
  Jet t = z * zb;
  Jet phi(2, order);
  switch (kind) {
    case ModelKind::cp1_fs: phi = 0.5 * log(t + 1.0); break;
    case ModelKind::bargmann: phi = 0.5 * t; break;
    case ModelKind::landau_q1: phi = (-0.5) * t; break;
    case ModelKind::degenerate_quartic: phi = t * t; break;
  }
  if (epsilon != 0.0) {
    if (kind == ModelKind::landau_q1)
      fail(ErrorKind::domain, "perturbation is supported on the q=0 models only");
    Jet one_plus_t = t + 1.0;
    Jet psi = (z + zb) * 0.5 * inverse(one_plus_t * one_plus_t);
    phi = phi + epsilon * psi;
  }
  return phi;
}

Jet KahlerModel::theta_jet(cplx z0, int order) const {
  if (kind == ModelKind::cp1_fs) {
    Jet z = Jet::variable(2, order, 0, z0);
    Jet zb = Jet::variable(2, order, 1, std::conj(z0));
    Jet one_plus_t = z * zb + 1.0;
    return theta_scale * inverse(one_plus_t * one_plus_t);
  }
  return Jet::constant(2, order, theta_scale);
}

double KahlerModel::tail_exponent(double k, double radius) const {
  switch (kind) {
    case ModelKind::bargmann:
    case ModelKind::landau_q1: return k * radius * radius;
    case ModelKind::degenerate_quartic: return 2.0 * k * std::pow(radius, 4);
    case ModelKind::cp1_fs: break;
  }
  fail(ErrorKind::domain, "tail_exponent: compact model has no truncation disc");
}

double KahlerModel::reference_volume(double disc_radius) const {
  if (compact()) return 2.0 * kPi;
  return 2.0 * kPi * disc_radius * disc_radius * theta_scale;
}

std::string KahlerModel::describe() const {
  std::string s = to_string(kind);
  if (epsilon != 0.0) s += ":eps=" + std::to_string(epsilon);
  if (theta_scale != 1.0) s += ":thetax" + std::to_string(theta_scale);
  return s;
}

KahlerModel make_model(ModelKind kind, double epsilon) {
  KahlerModel m;
  m.kind = kind;
  m.epsilon = epsilon;
  return m;
}

double disc_radius(const KahlerModel& model, int k_min) {
  if (model.compact()) fail(ErrorKind::domain, "disc_radius: model is compact");
  // solve tail_exponent(k_min, R) = 14 ln 10 (monotone in R)
  double lo = 1e-3, hi = 64.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (model.tail_exponent(k_min, mid) < kDiscTailLog)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Jet omega11_jet(const KahlerModel& model, cplx z0, int order) {
  Jet phi = model.weight_jet(z0, order + 2);
  return phi.derivative(0).derivative(1).truncated(order) / kPi;
}

Jet laplacian_omega_jet(const KahlerModel& model, cplx z0, const Jet& f) {
  const int out_order = f.order() - 2;
  if (out_order < 0) fail(ErrorKind::unsupported_order, "laplacian_omega_jet: jet order too low");
  Jet omega = omega11_jet(model, z0, out_order);
  if (omega.value().real() <= 0)
    fail(ErrorKind::geometry, "laplacian_omega: omega degenerate or negative at the point");
  Jet fzzb = f.derivative(0).derivative(1).truncated(out_order);
  return (-2.0) * fzzb * inverse(omega);
}

double laplacian_omega(const KahlerModel& model, const Jet& f_jet, cplx x, int iterations) {
  if (iterations < 1 || iterations > 2) fail(ErrorKind::domain, "laplacian_omega: iterations must be 1 or 2");
  Jet cur = f_jet;
  for (int i = 0; i < iterations; ++i) cur = laplacian_omega_jet(model, x, cur);
  return cur.value().real();
}

namespace {

struct CurvaturePack {
  double mu = 0;       // generalized eigenvalue of (2 ddbar phi, Theta)
  double omega11 = 0;  // omega_{1,1}(x)
  double h11 = 0;      // inverse of omega11
  Jet log_v_omega;     // jets of log V_omega (order 4)
  Jet log_v_theta;     // jets of log V_Theta (order 4)
};

CurvaturePack curvature_pack(const KahlerModel& model, cplx x, int order) {
  Jet phi = model.weight_jet(x, order + 2);
  Jet theta = model.theta_jet(x, order + 2);
  if (theta.value().real() <= 0) fail(ErrorKind::geometry, "Theta not positive definite at the point");
  CurvaturePack p;
  Jet phizzb = phi.derivative(0).derivative(1).truncated(order);
  p.mu = 2.0 * phizzb.value().real() / theta.value().real();
  p.omega11 = phizzb.value().real() / kPi;
  p.h11 = (p.omega11 != 0) ? 1.0 / p.omega11 : 0.0;
  Jet v_omega = phizzb / kPi;
  if (v_omega.value().real() > 0) p.log_v_omega = log(v_omega);
  p.log_v_theta = log(theta.truncated(order));
  return p;
}

} // namespace

CurvatureReport curvature_report(const KahlerModel& model, cplx x) {
  CurvaturePack p = curvature_pack(model, x, 4);
  CurvatureReport rep;
  rep.point = x;
  rep.rdot_eigs = {p.mu};
  rep.det_rdot = p.mu;
  if (std::abs(p.mu) <= kDegeneracyThreshold) {
    rep.signature_class = -1;
    rep.signature_label = "degenerate";
  } else {
    rep.signature_class = (p.mu < 0) ? 1 : 0;
    rep.signature_label = "M(" + std::to_string(rep.signature_class) + ")";
  }
  rep.omega_coeffs = p.omega11;
  rep.r_det_theta = p.log_v_theta.partial2(1, 1);
  if (p.omega11 > 0) {
    rep.r = laplacian_omega(model, p.log_v_omega, x);
    rep.r_hat = laplacian_omega(model, p.log_v_theta, x);
    rep.ric_omega = p.log_v_omega.partial2(1, 1);
    // n = 1 frame reduction of |R^TM|^2: the single curvature entry is
    // (log V_omega)_{z zbar} / omega_11 against a unit frame vector.
    double entry = std::abs(rep.ric_omega) * p.h11;
    rep.rtm_norm_sq = entry * entry;
  }
  return rep;
}

cplx hermitian_pairing(const KahlerModel& model, const FormValue& a, const FormValue& b, cplx x) {
  if (a.p != b.p || a.q != b.q) fail(ErrorKind::domain, "hermitian_pairing: bidegree mismatch");
  CurvaturePack p = curvature_pack(model, x, 2);
  if (p.omega11 <= 0) fail(ErrorKind::geometry, "hermitian_pairing: omega degenerate at the point");
  if (a.p == 1 && a.q == 1) return a.coefficient * std::conj(b.coefficient) * p.h11 * p.h11;
  if ((a.p == 1 && a.q == 0) || (a.p == 0 && a.q == 1))
    return a.coefficient * std::conj(b.coefficient) * p.h11;
  if (a.p == 0 && a.q == 0) return a.coefficient * std::conj(b.coefficient);
  fail(ErrorKind::domain, "hermitian_pairing: unsupported bidegree");
}

cplx d10_covariant(const KahlerModel& model, const Jet& u_jet, cplx x) {
  // A = <dz|dz>_omega = 1/omega_11; curly-A = A^{-1} dA = -d log omega_11
  Jet omega = omega11_jet(model, x, 2);
  if (omega.value().real() <= 0) fail(ErrorKind::geometry, "d10_covariant: omega degenerate at the point");
  Jet alpha = -log(omega).derivative(0);
  return u_jet.derivative(0).value() + u_jet.value() * alpha.value();
}

} // namespace btq
