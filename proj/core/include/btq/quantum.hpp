#ifndef BTQ_QUANTUM_HPP
#define BTQ_QUANTUM_HPP

#include <functional>
#include <memory>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/numkit.hpp"
#include "btq/symbols.hpp"

namespace btq {

struct BasisOptions {
  int cutoff_exponent = kDefaultCutoffExponent; // N in the spectral window [0, k^-N]
  int k_min = 0;  // smallest ladder level; fixes the disc radius across a ladder (0 = this k)
  int n_radial = 0;
  int n_angular = 0; // quadrature overrides (0 = model defaults)
  int threads = 0;
};

// Generating family entry: the monomial core z^a zbar^b.  The model-dependent
// envelope (e^{-k phi} for q=0 sections, e^{k phi} for the q=1 lowest-band
// dictionary) is applied uniformly; see localized_value().
struct DictionaryElement {
  int z_power = 0;
  int zbar_power = 0;
  int harmonic() const { return z_power - zbar_power; }
};

// Orthonormal basis of the level-k quantum space on its quadrature grid.
// grid_values() rows are the localized basis sections (trivialization factor
// included) sampled at the nodes; computed on first use.
class QuantumBasis {
public:
  KahlerModel model;
  int k = 0;
  int q = 0;
  int cutoff_exponent = kDefaultCutoffExponent;
  double disc_R = 0; // 0 for the compact model
  QuadratureRule grid;
  std::vector<DictionaryElement> dictionary;
  ComplexMatrix coeffs; // dictionary x dimension; columns are the orthonormal combinations
  int dropped = 0;      // rank-deficient directions removed
  std::vector<double> q1_eigenvalues; // retained Rayleigh quotients (q = 1 only)

  int dimension() const { return coeffs.cols; }

  // localized value (with e^{-k phi}) of one dictionary element / basis function
  cplx dictionary_value(int i, cplx z) const;
  std::vector<cplx> basis_values(cplx z) const;
  double envelope_log(double rho) const; // log of the radial envelope

  const ComplexMatrix& density_matrix() const; // coeffs * coeffs^adjoint, cached
  const ComplexMatrix& grid_values() const;    // dimension x nodes, cached

private:
  mutable std::shared_ptr<ComplexMatrix> density_;
  mutable std::shared_ptr<ComplexMatrix> grid_values_;
};

// Bilinear form of the dictionary against a grid factor:
//   B_ij = sum_nodes w(node) conj(u_i) u_j factor(node)
// computed by angular moments per radial ring (exact regrouping of the node sum,
// pairwise summation throughout, deterministic under any thread count).
ComplexMatrix dictionary_bilinear(const QuantumBasis& basis,
                                  const std::function<cplx(cplx, int, int)>& factor, int threads = 0);

// q = 0 quantum space: holomorphic monomial sections under the weighted L^2
// product.  CP^1 uses degrees 0..k; the flat models truncate to the disc with
// the dictionary size set by the curvature flux through the disc.
QuantumBasis build_basis(const KahlerModel& model, int k, const BasisOptions& options = {});

// q = 1 spectral space of the Landau model: weak Kodaira form on the
// antiholomorphic-monomial dictionary, eigenvalue window [0, k^-N].
QuantumBasis spectral_space_q1(const KahlerModel& model, int k, const BasisOptions& options = {});

struct ProjectorValue {
  cplx value;                      // q=0 scalar, or the dzbar (x) dzbar component
  bool complementary_structural_zero = false; // q=1: the complementary block is absent by construction
};

// Localized spectral-projector kernel P(x, y).
ProjectorValue projector_kernel(const QuantumBasis& basis, cplx x, cplx y);

// Curvature flux through the truncation disc, (1/2pi) integral of |mu| dv.
double disc_flux(const KahlerModel& model, double radius);

} // namespace btq

#endif
