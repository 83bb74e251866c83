#ifndef BTQ_PHASE_HPP
#define BTQ_PHASE_HPP

#include <vector>

#include "btq/geometry.hpp"
#include "btq/symbols.hpp"

namespace btq {

// Phase function data at a recentered point, in K-coordinates: the weight is
// lambda |w|^2 plus a remainder with no pure or linear-mixed terms, and the base
// form is Euclidean at the center.
struct PhaseModel {
  enum class Mode { quadratic, polarized };

  cplx center;              // the point in the original chart
  std::vector<double> lambda; // K-coordinate weights (one entry for n = 1)
  Jet phi_jets;             // recentered weight jets at 0 (order N_T)
  Mode mode = Mode::polarized;

  int taylor_order() const { return phi_jets.order(); }
};

// Quadratic model phase: i sum |lambda_j||z_j - w_j|^2 + i sum lambda_j (zbar_j w_j - z_j wbar_j).
cplx psi_quadratic(const PhaseModel& pm, cplx z, cplx w);

// Polarized phase (q = 0 only): i(phi(z) + phi(w)) - 2i sum_{a+b<=N} c_ab z^a wbar^b,
// with phi evaluated from the stored jets.  Agrees with psi_quadratic to second order.
cplx psi_polarized(const PhaseModel& pm, cplx z, cplx w, int order);

cplx psi(const PhaseModel& pm, cplx z, cplx w);

// Holomorphic coordinate change and frame twist that put the model in K-coordinates
// at a point p: the chart map is Moebius for CP^1 (translation for the flat models);
// remaining pure terms of the weight go into a frame twist g (the kernel picks up
// e^{ik Im g}); mixed (a,1) terms are removed by a holomorphic change; a final real
// scaling makes Theta(0) Euclidean.  All series are produced by jet composition.
struct KFrame {
  KahlerModel model;
  cplx center;
  double lambda = 0;
  double det_rdot = 0; // 2 lambda in these coordinates
  Jet phi;             // recentered weight jets at 0
  Jet phi1;            // phi - lambda |w|^2
  Jet v_theta;         // recentered V_Theta jets
  Jet chart_series;    // zeta as a holomorphic series in w (pure-w jet)
  Jet twist;           // holomorphic twist g as a series in zeta

  cplx to_chart(cplx w) const;                 // original-chart point
  cplx twist_phase(double k, cplx w) const;    // e^{ik Im g}
  Jet pull_symbol(const Symbol& f, int order) const; // f in the new coordinates
  PhaseModel phase_model(PhaseModel::Mode mode = PhaseModel::Mode::polarized) const;
};

KFrame recenter(const KahlerModel& model, cplx p, int order = kDefaultTaylorOrder);

} // namespace btq

#endif
