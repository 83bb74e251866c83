#ifndef BTQ_GEOMETRY_HPP
#define BTQ_GEOMETRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "btq/conventions.hpp"
#include "btq/jets.hpp"
#include "btq/numkit.hpp"

namespace btq {

enum class ModelKind { cp1_fs, bargmann, landau_q1, degenerate_quartic };

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

// A chart model: local weight phi (|s|^2 = e^{-2 phi}), base Hermitian form Theta,
// optional closed-form perturbation epsilon * psi added to phi.  All built-ins are
// one-dimensional charts; curvature and coefficient formulas are written against
// this chart data only.
struct KahlerModel {
  ModelKind kind = ModelKind::cp1_fs;
  double epsilon = 0.0;      // perturbation amplitude, psi = Re(z)/(1+|z|^2)^2
  double theta_scale = 1.0;  // replaces Theta by c Theta (scaling experiments)
  int chart_dim = 1;

  Jet weight_jet(cplx z0, int order) const; // phi
  Jet theta_jet(cplx z0, int order) const;  // Theta_{1,1}
  double weight(cplx z) const { return weight_jet(z, 0).value().real(); }
  double theta(cplx z) const { return theta_jet(z, 0).value().real(); }

  bool compact() const { return kind == ModelKind::cp1_fs; }
  bool flat_chart() const { return kind != ModelKind::cp1_fs; }
  // Exponent governing the localized basis envelope at radius R; the disc radius
  // rule solves tail_exponent(k, R) = 14 ln 10.
  double tail_exponent(double k, double radius) const;
  double reference_volume(double disc_radius) const; // 2 pi for CP^1, 2 pi R^2 for discs

  std::string describe() const;
};

KahlerModel make_model(ModelKind kind, double epsilon = 0.0);

// Disc truncation radius from the smallest ladder level (tail mass <= 1e-14 there).
double disc_radius(const KahlerModel& model, int k_min);

struct CurvatureReport {
  cplx point;
  std::vector<double> rdot_eigs; // mu_j, ascending
  double det_rdot = 0;
  int signature_class = -1; // j for M(j); -1 means degenerate
  std::string signature_label;
  double r = 0;     // Delta_omega log V_omega
  double r_hat = 0; // Delta_omega log V_Theta
  cplx ric_omega;   // (1,1) coefficient in the dz wedge dzbar basis
  cplx r_det_theta; // (1,1) coefficient
  double rtm_norm_sq = 0;
  cplx omega_coeffs; // omega_{1,1}
};

// Pointwise (p,q)-form value in the chart frame; n = 1 so a single coefficient.
struct FormValue {
  int p = 0;
  int q = 0;
  cplx coefficient;
};

// All curvature objects consumed by the coefficient formulas, from order-6 jets
// of phi and Theta.  Fails if Theta (or, where required, omega) is not positive.
CurvatureReport curvature_report(const KahlerModel& model, cplx x);

// Jet-level curvature helpers shared with the closed-form coefficients.
Jet omega11_jet(const KahlerModel& model, cplx z0, int order);
// Delta_omega applied to a jet of a scalar function; output order drops by 2.
Jet laplacian_omega_jet(const KahlerModel& model, cplx z0, const Jet& f);

double laplacian_omega(const KahlerModel& model, const Jet& f_jet, cplx x, int iterations = 1);

// Pointwise Hermitian pairing of two (1,1)-forms in the omega metric.
cplx hermitian_pairing(const KahlerModel& model, const FormValue& a, const FormValue& b, cplx x);

// (1,0) part of the Chern connection applied to a (1,0)-form with coefficient
// jet u (order >= 1): returns the dz (x) dz component at x.
cplx d10_covariant(const KahlerModel& model, const Jet& u_jet, cplx x);

} // namespace btq

#endif
