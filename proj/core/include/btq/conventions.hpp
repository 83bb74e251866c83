#ifndef BTQ_CONVENTIONS_HPP
#define BTQ_CONVENTIONS_HPP

#include <cstdint>
#include <string>

namespace btq {

// Single home for every sign and normalization choice the modules share.
// Everything downstream (curvature, coefficients, star product, experiments)
// assumes exactly these conventions; the Bargmann ladder oracle and the
// Fubini-Study density pin each one numerically in the test suite.
//
//   weight            |s|^2 = e^{-2 phi};  R^L = 2 ddbar phi
//   curvature matrix  mu_j = generalized eigenvalues of (2 ddbar phi, Theta);
//                     in K-coordinates phi = sum lambda_j |z_j|^2 + ..., mu_j = 2 lambda_j
//   omega             omega_{j,k} = (1/pi) d^2 phi / dz_j dzbar_k
//   laplacian         Delta_omega = -2 sum h^{j,k} d^2/dz_j dzbar_k,  h^{j,k} = (omega^{-1})
//   scalar curvatures r = Delta_omega log V_omega,  rhat = Delta_omega log V_Theta
//   (1,1)-forms       stored as coefficient matrices in the dz_j wedge dzbar_k basis;
//                     Ric_omega = (log V_omega)_{j,kbar},  Rdet_Theta = (log V_Theta)_{j,kbar},
//                     dbar d f = -(f)_{j,kbar}
//   pairing           <a|c>_omega = sum a_{jk} conj(c_{st}) h^{j,s} h^{t,k};  <omega|omega> = n
//   gradient pairing  <df|dgbar>_omega = sum h^{j,k} f_{z_j} g_{zbar_k}
//   star product      C1(f,g) = -(1/2pi) <df|dgbar>_omega
//   Poisson bracket   on (M, 2 pi omega); n = 1: {f,g} = (i / (2 pi omega_11)) (f_z g_zbar - g_z f_zbar)
//   det^{-1/2} branch in the stationary phase prefactor: each eigenvalue square
//                     root taken with argument in (-pi/2, pi/2]

inline constexpr double kDegeneracyThreshold = 1e-8; // |mu| below this => M_deg
inline constexpr int kDefaultCutoffExponent = 8;     // spectral window [0, k^-N]
inline constexpr int kDefaultTaylorOrder = 8;        // phase/recursion jets
inline constexpr double kDiscTailLog = 32.236191301916641; // 14 ln 10: Gaussian tail <= 1e-14

std::string convention_summary();
std::uint64_t convention_hash(); // FNV-1a of the summary; stamped into reports

} // namespace btq

#endif
