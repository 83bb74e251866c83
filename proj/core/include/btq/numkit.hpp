#ifndef BTQ_NUMKIT_HPP
#define BTQ_NUMKIT_HPP

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "btq/error.hpp"

namespace btq {

using cplx = std::complex<double>;

// Deterministic reduction: fixed pairwise association independent of thread count.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

// Static partition over [0, n); chunks are assigned in index order, results must
// be written to disjoint locations so the outcome is identical to a serial run.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& chunk_fn);

struct ComplexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> a; // row-major

  ComplexMatrix() = default;
  ComplexMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0)) {}
  cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  cplx operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static ComplexMatrix identity(int n);
  ComplexMatrix adjoint() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix scaled(cplx s) const;

  double max_abs() const;
  double frobenius() const;
  double hermiticity_defect() const; // max |A - A*| entrywise
  bool is_hermitian(double tol_rel = 1e-12) const;
};

// Largest singular value via the Hermitian spectrum of A*A.
double operator_norm(const ComplexMatrix& m);

struct EigResult {
  std::vector<double> eigenvalues; // ascending
  ComplexMatrix eigenvectors;      // columns; unitary
};

// Cyclic Jacobi for Hermitian matrices; deterministic sweep order, off-diagonal
// threshold 1e-13 relative to the largest entry.  Dimensions up to ~2000.
EigResult hermitian_eig(const ComplexMatrix& a);

struct OrthonormalizeResult {
  std::vector<std::vector<cplx>> vectors; // combinations of the inputs
  ComplexMatrix transform;                // input x kept: out_j = sum_i transform(i,j) in_i
  int rank = 0;
  int dropped = 0;
};

// Orthonormalizes the span of the input vectors with respect to the given Gram
// matrix.  Directions with Gram eigenvalue <= 1e-10 x max are dropped and counted.
OrthonormalizeResult gram_orthonormalize(const std::vector<std::vector<cplx>>& vectors,
                                         const ComplexMatrix& gram);
// Same computation when only the combination matrix is wanted.
OrthonormalizeResult gram_orthonormalize(const ComplexMatrix& gram);

struct LeastSquaresFit {
  std::vector<cplx> coefficients; // in exponent order
  double rms_residual = 0;
};

// Minimizes sum |value_i - sum_j c_j k_i^{p_j}|^2 by Householder QR.
LeastSquaresFit least_squares_fit(std::span<const double> k_values, std::span<const cplx> values,
                                  std::span<const double> exponents);

// General complex linear least squares: min ||A c - b||_2.
LeastSquaresFit linear_least_squares(const ComplexMatrix& design, std::span<const cplx> rhs);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Polar tensor-product quadrature for the chart models.  Nodes are ordered
// radial-major; node(ir, ia) = rho[ir] * exp(i theta_ia), theta_ia = 2 pi ia / n_angular.
// Weights carry the model volume form dv_M, so sum_j w_j F(z_j) ~ integral F dv_M.
struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  std::vector<double> radial_rho;
  std::vector<double> radial_weight; // radial factor; node weight = radial_weight[ir] * (2pi/n_angular)
  int n_angular = 0;
  std::string descriptor;

  int n_radial() const { return static_cast<int>(radial_rho.size()); }
  std::size_t size() const { return nodes.size(); }
  double angular_weight() const;
  cplx node(int ir, int ia) const { return nodes[static_cast<size_t>(ir) * n_angular + ia]; }
  double weight(int ir, int ia) const { return weights[static_cast<size_t>(ir) * n_angular + ia]; }

  double integrate(const std::function<double(cplx)>& f) const;
  cplx integrate_complex(const std::function<cplx(cplx)>& f) const;
};

// CP^1 Fubini-Study chart rule: Gauss-Legendre in the stereographic radial
// variable s = (1-|z|^2)/(1+|z|^2), trapezoid in angle.  Defaults: 2k+16 radial,
// 4k+16 angular nodes, exact for monomial integrals up to degree 2k.
QuadratureRule cp1_rule(int k, int n_radial = 0, int n_angular = 0);

// Disc rule for the flat-chart models: Gauss-Legendre in t = rho^2 on [0, R^2],
// trapezoid in angle.
QuadratureRule disc_rule(int k, double radius, int n_radial = 0, int n_angular = 0);

} // namespace btq

#endif
