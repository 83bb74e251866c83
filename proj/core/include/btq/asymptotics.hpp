#ifndef BTQ_ASYMPTOTICS_HPP
#define BTQ_ASYMPTOTICS_HPP

#include <string>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/symbols.hpp"

namespace btq {

// Oscillatory integral int e^{ikF(x)} u(x) V(x) dx over R^dim (Lebesgue measure),
// expanded at the critical point 0.  Preconditions: Im F >= 0, Im F(0) = 0,
// F'(0) = 0, det F''(0) != 0.
struct StationaryPhaseProblem {
  int dim = 2;
  Jet phase;     // F jets at 0, in `dim` real slots
  Jet amplitude; // u jets
  Jet density;   // V jets (set to the constant 1 jet if absent)
};

struct StationaryPhaseResult {
  cplx value = 0;              // prefactor * sum_{j<N} k^{-j} L_j
  cplx prefactor = 0;          // e^{ikF(0)} det(k F''(0) / 2 pi i)^{-1/2}
  std::vector<cplx> terms;     // L_j(u V), j = 0..N-1
};

StationaryPhaseResult stationary_phase_terms(const StationaryPhaseProblem& p, double k, int n_terms);

struct CoefficientSet {
  cplx point;
  cplx b0 = 0, b1 = 0, b2 = 0;
  int depth = 0;
  std::string provenance; // "closed_form" or "recursion"
};

// Kernel-diagonal coefficients of T_f in k^{n-j}: b0 plus the printed curvature
// formulas for b1 and b2 (q = 0, positive curvature).
CoefficientSet closed_form_coefficients(const KahlerModel& model, const Symbol& f, cplx x, int depth);

// Coefficients of the composite kernel T_f T_g on the diagonal.
CoefficientSet composition_coefficients(const KahlerModel& model, const Symbol& f, const Symbol& g, cplx x,
                                        int depth);

struct StarProduct {
  cplx c0 = 0, c1 = 0, c2 = 0;
  int order = 0;
};

// Bidifferential star-product coefficients extracted by matching the composite
// expansion order by order against single-symbol expansions.
StarProduct star_product(const KahlerModel& model, SymbolPtr f, SymbolPtr g, cplx x, int order);

// Inputs for the kernel-coefficient recursion at a K-coordinate center: jets of
// the weight remainder and density, plus the measured Bergman coefficient jets
// b_s(0, z) (b_s(z, 0) follows by conjugate symmetry).
struct RecursionInput {
  double lambda = 0;
  double det_rdot = 0; // 2 lambda for n = 1
  Jet phi1;            // order >= 2*(depth + max excess)
  Jet v_theta;
  Jet f;               // symbol jets in the recentered coordinates
  Jet bergman0, bergman1, bergman2; // measured; bergman2 only needed at depth 2
};

CoefficientSet coefficient_recursion(const RecursionInput& input, int depth);

} // namespace btq

#endif
