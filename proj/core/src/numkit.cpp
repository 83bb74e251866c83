#include "btq/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace btq {

namespace {

template <typename T>
T pairwise_sum_impl(std::span<const T> v) {
  if (v.size() <= 16) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum_impl(v.subspan(0, half)) + pairwise_sum_impl(v.subspan(half));
}

} // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_sum_impl(v); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  std::size_t nt = std::min<std::size_t>(threads, n);
  if (nt <= 1 || n < 64) {
    chunk_fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] { chunk_fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols != rhs.rows) fail(ErrorKind::convention_violation, "matrix product shape mismatch");
  ComplexMatrix m(rows, rhs.cols);
  for (int i = 0; i < rows; ++i)
    for (int l = 0; l < cols; ++l) {
      cplx v = (*this)(i, l);
      if (v == cplx(0)) continue;
      for (int j = 0; j < rhs.cols; ++j) m(i, j) += v * rhs(l, j);
    }
  return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  if (rows != rhs.rows || cols != rhs.cols) fail(ErrorKind::convention_violation, "matrix difference shape mismatch");
  ComplexMatrix m = *this;
  for (size_t i = 0; i < a.size(); ++i) m.a[i] -= rhs.a[i];
  return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  if (rows != rhs.rows || cols != rhs.cols) fail(ErrorKind::convention_violation, "matrix sum shape mismatch");
  ComplexMatrix m = *this;
  for (size_t i = 0; i < a.size(); ++i) m.a[i] += rhs.a[i];
  return m;
}

ComplexMatrix ComplexMatrix::scaled(cplx s) const {
  ComplexMatrix m = *this;
  for (auto& x : m.a) x *= s;
  return m;
}

double ComplexMatrix::max_abs() const {
  double m = 0;
  for (const auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

double ComplexMatrix::frobenius() const {
  double s = 0;
  for (const auto& x : a) s += std::norm(x);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
  double d = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

bool ComplexMatrix::is_hermitian(double tol_rel) const {
  if (rows != cols) return false;
  double scale = std::max(max_abs(), 1e-300);
  return hermiticity_defect() <= tol_rel * scale;
}

double operator_norm(const ComplexMatrix& m) {
  ComplexMatrix g = m.adjoint() * m;
  // symmetrize away roundoff before the Hermitian solver
  for (int i = 0; i < g.rows; ++i)
    for (int j = i; j < g.cols; ++j) {
      cplx v = 0.5 * (g(i, j) + std::conj(g(j, i)));
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  EigResult e = hermitian_eig(g);
  double top = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
  return std::sqrt(std::max(0.0, top));
}

EigResult hermitian_eig(const ComplexMatrix& input) {
  if (input.rows != input.cols) fail(ErrorKind::convention_violation, "hermitian_eig: matrix not square");
  const int n = input.rows;
  double scale = std::max(input.max_abs(), 1e-300);
  if (input.hermiticity_defect() > 1e-12 * scale)
    fail(ErrorKind::convention_violation, "hermitian_eig: input exceeds Hermitian tolerance");

  ComplexMatrix a = input;
  // exact symmetrization so the rotations preserve Hermiticity bit-for-bit
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
    a(i, i) = cplx(a(i, i).real(), 0.0);
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double threshold = 1e-13 * scale;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a(p, q);
        double mag = std::abs(apq);
        if (mag <= threshold) continue;
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        cplx phase = apq / mag;
        double tau = (aqq - app) / (2.0 * mag);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        // columns/rows p,q rotated by J with J_pp=c, J_pq=s*phase, J_qp=-s*conj(phase), J_qq=c
        for (int i = 0; i < n; ++i) {
          cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * std::conj(phase) * aiq;
          a(i, q) = s * phase * aip + c * aiq;
        }
        for (int j = 0; j < n; ++j) {
          cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - s * phase * aqj;
          a(q, j) = s * std::conj(phase) * apj + c * aqj;
        }
        for (int i = 0; i < n; ++i) {
          cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * std::conj(phase) * viq;
          v(i, q) = s * phase * vip + c * viq;
        }
        a(p, q) = cplx(0);
        a(q, p) = cplx(0);
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);
      }
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = ComplexMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    r.eigenvalues[j] = a(src, src).real();
    // deterministic phase: largest-magnitude component made real positive
    int arg_max = 0;
    double best = -1;
    for (int i = 0; i < n; ++i) {
      double m = std::abs(v(i, src));
      if (m > best + 1e-15) {
        best = m;
        arg_max = i;
      }
    }
    cplx ph = v(arg_max, src);
    cplx fix = (std::abs(ph) > 0) ? std::abs(ph) / ph : cplx(1);
    for (int i = 0; i < n; ++i) r.eigenvectors(i, j) = v(i, src) * fix;
  }
  return r;
}

OrthonormalizeResult gram_orthonormalize(const ComplexMatrix& gram) {
  if (gram.rows != gram.cols) fail(ErrorKind::convention_violation, "gram_orthonormalize: Gram not square");
  const int n = gram.rows;
  OrthonormalizeResult res;
  if (n == 0) return res;
  EigResult e = hermitian_eig(gram);
  double lam_max = e.eigenvalues.back();
  if (lam_max <= 0) {
    res.dropped = n;
    res.transform = ComplexMatrix(n, 0);
    return res;
  }
  const double tol = 1e-10 * lam_max;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (e.eigenvalues[i] > tol) keep.push_back(i);
  res.rank = static_cast<int>(keep.size());
  res.dropped = n - res.rank;
  res.transform = ComplexMatrix(n, res.rank);
  for (int j = 0; j < res.rank; ++j) {
    int src = keep[j];
    double inv_sqrt = 1.0 / std::sqrt(e.eigenvalues[src]);
    for (int i = 0; i < n; ++i) res.transform(i, j) = e.eigenvectors(i, src) * inv_sqrt;
  }
  return res;
}

OrthonormalizeResult gram_orthonormalize(const std::vector<std::vector<cplx>>& vectors, const ComplexMatrix& gram) {
  if (static_cast<int>(vectors.size()) != gram.rows)
    fail(ErrorKind::convention_violation, "gram_orthonormalize: vector count does not match Gram");
  OrthonormalizeResult res = gram_orthonormalize(gram);
  if (vectors.empty()) return res;
  const size_t dim = vectors[0].size();
  res.vectors.assign(res.rank, std::vector<cplx>(dim, cplx(0)));
  for (int j = 0; j < res.rank; ++j)
    for (int i = 0; i < gram.rows; ++i) {
      cplx w = res.transform(i, j);
      if (w == cplx(0)) continue;
      for (size_t d = 0; d < dim; ++d) res.vectors[j][d] += w * vectors[i][d];
    }
  return res;
}

LeastSquaresFit linear_least_squares(const ComplexMatrix& design, std::span<const cplx> rhs) {
  const int m = design.rows;
  const int p = design.cols;
  if (static_cast<int>(rhs.size()) != m)
    fail(ErrorKind::convention_violation, "least squares: rhs size mismatch");
  if (m < p) fail(ErrorKind::underdetermined, "least squares: fewer samples than parameters");

  // Householder QR on [A | b]
  ComplexMatrix a = design;
  std::vector<cplx> b(rhs.begin(), rhs.end());
  for (int col = 0; col < p; ++col) {
    double norm_sq = 0;
    for (int i = col; i < m; ++i) norm_sq += std::norm(a(i, col));
    double alpha = std::sqrt(norm_sq);
    if (alpha == 0) fail(ErrorKind::underdetermined, "least squares: rank-deficient design matrix");
    cplx a0 = a(col, col);
    cplx phase = (std::abs(a0) > 0) ? a0 / std::abs(a0) : cplx(1);
    cplx v0 = a0 + phase * alpha;
    std::vector<cplx> v(m - col);
    v[0] = v0;
    for (int i = col + 1; i < m; ++i) v[i - col] = a(i, col);
    double vnorm_sq = 0;
    for (const auto& x : v) vnorm_sq += std::norm(x);
    if (vnorm_sq == 0) continue;
    for (int j = col; j < p; ++j) {
      cplx dot = 0;
      for (int i = col; i < m; ++i) dot += std::conj(v[i - col]) * a(i, j);
      cplx f = 2.0 * dot / vnorm_sq;
      for (int i = col; i < m; ++i) a(i, j) -= f * v[i - col];
    }
    cplx dot = 0;
    for (int i = col; i < m; ++i) dot += std::conj(v[i - col]) * b[i];
    cplx f = 2.0 * dot / vnorm_sq;
    for (int i = col; i < m; ++i) b[i] -= f * v[i - col];
  }

  LeastSquaresFit fit;
  fit.coefficients.assign(p, cplx(0));
  for (int i = p - 1; i >= 0; --i) {
    cplx s = b[i];
    for (int j = i + 1; j < p; ++j) s -= a(i, j) * fit.coefficients[j];
    if (a(i, i) == cplx(0)) fail(ErrorKind::underdetermined, "least squares: singular triangular factor");
    fit.coefficients[i] = s / a(i, i);
  }
  double rss = 0;
  for (int i = p; i < m; ++i) rss += std::norm(b[i]);
  fit.rms_residual = std::sqrt(rss / m);
  return fit;
}

LeastSquaresFit least_squares_fit(std::span<const double> k_values, std::span<const cplx> values,
                                  std::span<const double> exponents) {
  const int m = static_cast<int>(k_values.size());
  const int p = static_cast<int>(exponents.size());
  if (static_cast<int>(values.size()) != m)
    fail(ErrorKind::convention_violation, "least_squares_fit: sample size mismatch");
  if (m < p) fail(ErrorKind::underdetermined, "least_squares_fit: need at least as many samples as exponents");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (k_values[i] == k_values[j]) fail(ErrorKind::domain, "least_squares_fit: k values must be distinct");
  ComplexMatrix design(m, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) design(i, j) = std::pow(k_values[i], exponents[j]);
  return linear_least_squares(design, values);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0);
  weights.assign(n, 0);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1 = 0, dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double QuadratureRule::angular_weight() const { return 2.0 * std::numbers::pi / n_angular; }

double QuadratureRule::integrate(const std::function<double(cplx)>& f) const {
  std::vector<double> terms(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
  return pairwise_sum(terms);
}

cplx QuadratureRule::integrate_complex(const std::function<cplx(cplx)>& f) const {
  std::vector<cplx> terms(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
  return pairwise_sum(std::span<const cplx>(terms));
}

namespace {

QuadratureRule tensor_rule(std::vector<double> rho, std::vector<double> radial_weight, int n_angular,
                           std::string descriptor) {
  QuadratureRule rule;
  rule.radial_rho = std::move(rho);
  rule.radial_weight = std::move(radial_weight);
  rule.n_angular = n_angular;
  rule.descriptor = std::move(descriptor);
  const double pi = std::numbers::pi;
  const double aw = 2.0 * pi / n_angular;
  rule.nodes.resize(rule.radial_rho.size() * n_angular);
  rule.weights.resize(rule.nodes.size());
  for (size_t ir = 0; ir < rule.radial_rho.size(); ++ir) {
    for (int ia = 0; ia < n_angular; ++ia) {
      double th = 2.0 * pi * ia / n_angular;
      rule.nodes[ir * n_angular + ia] = std::polar(rule.radial_rho[ir], th);
      rule.weights[ir * n_angular + ia] = rule.radial_weight[ir] * aw;
    }
  }
  return rule;
}

} // namespace

QuadratureRule cp1_rule(int k, int n_radial, int n_angular) {
  if (n_radial <= 0) n_radial = 2 * k + 16;
  if (n_angular <= 0) n_angular = 4 * k + 16;
  std::vector<double> s, w;
  gauss_legendre(n_radial, s, w);
  std::vector<double> rho(n_radial), rw(n_radial);
  for (int i = 0; i < n_radial; ++i) {
    double t = (1.0 - s[i]) / (1.0 + s[i]); // |z|^2
    rho[i] = std::sqrt(t);
    rw[i] = 0.5 * w[i]; // dv = (1/2) ds dtheta in the stereographic variable
  }
  return tensor_rule(std::move(rho), std::move(rw), n_angular,
                     "cp1:gl" + std::to_string(n_radial) + "xtrap" + std::to_string(n_angular));
}

QuadratureRule disc_rule(int k, double radius, int n_radial, int n_angular) {
  if (radius <= 0) fail(ErrorKind::domain, "disc_rule: radius must be positive");
  if (n_radial <= 0) n_radial = 2 * k + 16;
  if (n_angular <= 0) n_angular = 4 * k + 16;
  std::vector<double> x, w;
  gauss_legendre(n_radial, x, w);
  const double t_max = radius * radius;
  std::vector<double> rho(n_radial), rw(n_radial);
  for (int i = 0; i < n_radial; ++i) {
    double t = 0.5 * t_max * (x[i] + 1.0); // |z|^2 on [0, R^2]
    rho[i] = std::sqrt(t);
    rw[i] = 0.5 * t_max * w[i]; // dv = 2 dx dy = dt dtheta, GL maps with dt = (R^2/2) dx
  }
  return tensor_rule(std::move(rho), std::move(rw), n_angular,
                     "disc:R" + std::to_string(radius) + ":gl" + std::to_string(n_radial) + "xtrap" +
                         std::to_string(n_angular));
}

} // namespace btq
