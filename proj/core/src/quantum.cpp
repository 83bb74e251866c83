#include "btq/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btq {

namespace {

constexpr double kPi = std::numbers::pi;

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

// log of the unperturbed radial weight phi_0(rho)
double phi0_radial(const KahlerModel& model, double rho) {
  double t = rho * rho;
  switch (model.kind) {
    case ModelKind::cp1_fs: return 0.5 * std::log1p(t);
    case ModelKind::bargmann: return 0.5 * t;
    case ModelKind::landau_q1: return -0.5 * t;
    case ModelKind::degenerate_quartic: return t * t;
  }
  return 0;
}

double psi_value(cplx z) {
  double t = std::norm(z);
  return z.real() / ((1.0 + t) * (1.0 + t));
}

struct SeparableSet {
  std::vector<int> harmonic;
  std::vector<std::vector<double>> radial; // [element][ring]
};

SeparableSet separable_values(const QuantumBasis& basis, const std::vector<DictionaryElement>& dict) {
  const auto& grid = basis.grid;
  SeparableSet s;
  s.harmonic.reserve(dict.size());
  s.radial.assign(dict.size(), std::vector<double>(grid.n_radial(), 0.0));
  for (size_t i = 0; i < dict.size(); ++i) {
    int a = dict[i].z_power;
    int b = dict[i].zbar_power;
    s.harmonic.push_back(a - b);
    for (int ir = 0; ir < grid.n_radial(); ++ir) {
      double rho = grid.radial_rho[ir];
      double lg = basis.envelope_log(rho);
      if (a + b > 0) lg += (a + b) * std::log(rho);
      s.radial[i][ir] = std::exp(lg);
    }
  }
  return s;
}

ComplexMatrix bilinear_from_separable(const QuadratureRule& grid, const SeparableSet& A, const SeparableSet& B,
                                      const std::function<cplx(cplx, int, int)>& factor, int threads) {
  const int nr = grid.n_radial();
  const int na = grid.n_angular;
  int hmin = 0, hmax = 0;
  for (int h : A.harmonic) {
    hmin = std::min(hmin, -h);
    hmax = std::max(hmax, -h);
  }
  int bmin = 0, bmax = 0;
  for (int h : B.harmonic) {
    bmin = std::min(bmin, h);
    bmax = std::max(bmax, h);
  }
  const int dmin = hmin + bmin, dmax = hmax + bmax;
  const int drange = dmax - dmin + 1;
  if (drange >= na)
    fail(ErrorKind::quadrature_resolution,
         "angular rule too coarse for the dictionary harmonics (aliasing)");

  // moments m[ir][delta] = (2pi/na) sum_ia factor(node) e^{i delta theta}
  std::vector<std::vector<cplx>> moments(nr, std::vector<cplx>(drange));
  const double aw = grid.angular_weight();
  parallel_for(nr, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<cplx> cur(na);
    std::vector<cplx> unit(na);
    for (int ia = 0; ia < na; ++ia) unit[ia] = std::polar(1.0, 2.0 * kPi * ia / na);
    for (std::size_t ir = lo; ir < hi; ++ir) {
      for (int ia = 0; ia < na; ++ia) {
        double th = 2.0 * kPi * ia / na;
        cur[ia] = factor(grid.node(static_cast<int>(ir), ia), static_cast<int>(ir), ia) *
                  std::polar(1.0, dmin * th);
      }
      for (int d = dmin; d <= dmax; ++d) {
        moments[ir][d - dmin] = aw * pairwise_sum(std::span<const cplx>(cur));
        for (int ia = 0; ia < na; ++ia) cur[ia] *= unit[ia];
      }
    }
  });

  const int ra = static_cast<int>(A.harmonic.size());
  const int rb = static_cast<int>(B.harmonic.size());
  ComplexMatrix out(ra, rb);
  parallel_for(ra, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<cplx> terms(nr);
    for (std::size_t i = lo; i < hi; ++i) {
      for (int j = 0; j < rb; ++j) {
        int d = B.harmonic[j] - A.harmonic[i];
        for (int ir = 0; ir < nr; ++ir)
          terms[ir] = grid.radial_weight[ir] * A.radial[i][ir] * B.radial[j][ir] * moments[ir][d - dmin];
        out(static_cast<int>(i), j) = pairwise_sum(std::span<const cplx>(terms));
      }
    }
  });
  return out;
}

std::function<cplx(cplx, int, int)> weight_factor_eps(double eps, int k,
                                                      const SymbolPtr& symbol = nullptr) {
  return [eps, k, symbol](cplx z, int, int) -> cplx {
    cplx v = 1.0;
    if (eps != 0.0) v = std::exp(-2.0 * k * eps * psi_value(z));
    if (symbol) v *= symbol->eval(z);
    return v;
  };
}

std::function<cplx(cplx, int, int)> weight_factor(const KahlerModel& model, int k,
                                                  const SymbolPtr& symbol = nullptr) {
  return weight_factor_eps(model.epsilon, k, symbol);
}

// rank-tolerant orthonormalization of a Gram matrix after diagonal prescaling;
// the prescaling keeps the 1e-10 tolerance meaningful across the huge dynamic
// range of monomial norms
ComplexMatrix orthonormalize_gram(const ComplexMatrix& gram, int& dropped) {
  const int d = gram.rows;
  std::vector<double> scale(d);
  for (int i = 0; i < d; ++i) {
    double g = gram(i, i).real();
    if (g <= 0) fail(ErrorKind::quadrature_resolution, "Gram diagonal not positive; rule under-resolved");
    scale[i] = 1.0 / std::sqrt(g);
  }
  ComplexMatrix corr(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) corr(i, j) = gram(i, j) * scale[i] * scale[j];
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      cplx v = 0.5 * (corr(i, j) + std::conj(corr(j, i)));
      corr(i, j) = v;
      corr(j, i) = std::conj(v);
    }
  OrthonormalizeResult on = gram_orthonormalize(corr);
  dropped = on.dropped;
  ComplexMatrix out(d, on.rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < on.rank; ++j) out(i, j) = scale[i] * on.transform(i, j);
  return out;
}

// order the orthonormal combinations by their dominant dictionary element so
// near-diagonal Grams keep the natural monomial ordering
void order_by_dominant_row(ComplexMatrix& coeffs) {
  const int d = coeffs.rows, r = coeffs.cols;
  std::vector<int> order(r), dominant(r, 0);
  for (int j = 0; j < r; ++j) {
    order[j] = j;
    double best = -1;
    for (int i = 0; i < d; ++i) {
      double m = std::abs(coeffs(i, j));
      if (m > best + 1e-12) {
        best = m;
        dominant[j] = i;
      }
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dominant[a] < dominant[b]; });
  ComplexMatrix sorted(d, r);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) sorted(i, j) = coeffs(i, order[j]);
  coeffs = std::move(sorted);
}

// The perturbed inner product differs from the unperturbed one by e^{-2 k eps psi},
// whose compressed condition number grows like e^{2 k |eps| range(psi)}.  Splitting
// the perturbation into stages keeps every single Gram well conditioned, so no
// genuine section is lost to the rank tolerance.
void orthonormalize_staged(QuantumBasis& basis, int threads) {
  const double psi_range = 0.651; // 2 max |psi| on the chart
  const int k = basis.k;
  const double eps = basis.model.epsilon;
  int stages = 1;
  if (eps != 0.0) stages = std::max(1, static_cast<int>(std::ceil(2.0 * k * std::abs(eps) * psi_range / 16.0)));
  basis.dropped = 0;
  ComplexMatrix c;
  for (int s = 1; s <= stages; ++s) {
    double eps_s = eps * s / stages;
    ComplexMatrix gram;
    {
      SeparableSet sep = separable_values(basis, basis.dictionary);
      gram = bilinear_from_separable(basis.grid, sep, sep, weight_factor_eps(eps_s, k), threads);
    }
    if (c.rows != 0) gram = c.adjoint() * gram * c;
    int dropped = 0;
    ComplexMatrix b = orthonormalize_gram(gram, dropped);
    basis.dropped += dropped;
    c = (c.rows == 0) ? std::move(b) : c * b;
  }
  order_by_dominant_row(c);
  basis.coeffs = std::move(c);
}

} // namespace

double QuantumBasis::envelope_log(double rho) const {
  double phi0 = phi0_radial(model, rho);
  return (q == 0) ? -double(k) * phi0 : double(k) * phi0;
}

cplx QuantumBasis::dictionary_value(int i, cplx z) const {
  const auto& e = dictionary[i];
  double phi = model.weight(z);
  // q=0: holomorphic core, localized value z^a e^{-k phi}.
  // q=1: core z^a zbar^m e^{2k phi} dzbar, so the localized value carries e^{+k phi}.
  double env_exp = (q == 0) ? -double(k) * phi : double(k) * phi;
  cplx v = std::exp(env_exp);
  if (e.z_power > 0) v *= ipow(z, e.z_power);
  if (e.zbar_power > 0) v *= ipow(std::conj(z), e.zbar_power);
  return v;
}

std::vector<cplx> QuantumBasis::basis_values(cplx z) const {
  std::vector<cplx> u(dictionary.size());
  for (size_t i = 0; i < dictionary.size(); ++i) u[i] = dictionary_value(static_cast<int>(i), z);
  std::vector<cplx> b(dimension(), cplx(0));
  for (int j = 0; j < dimension(); ++j) {
    cplx acc = 0;
    for (size_t i = 0; i < dictionary.size(); ++i) acc += u[i] * coeffs(static_cast<int>(i), j);
    b[j] = acc;
  }
  return b;
}

const ComplexMatrix& QuantumBasis::density_matrix() const {
  if (!density_) {
    auto d = std::make_shared<ComplexMatrix>(coeffs * coeffs.adjoint());
    density_ = std::move(d);
  }
  return *density_;
}

const ComplexMatrix& QuantumBasis::grid_values() const {
  if (!grid_values_) {
    auto gv = std::make_shared<ComplexMatrix>(dimension(), static_cast<int>(grid.size()));
    const int nr = grid.n_radial();
    const int na = grid.n_angular;
    parallel_for(nr, 0, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t ir = lo; ir < hi; ++ir)
        for (int ia = 0; ia < na; ++ia) {
          cplx z = grid.node(static_cast<int>(ir), ia);
          std::vector<cplx> b = basis_values(z);
          for (int j = 0; j < dimension(); ++j) (*gv)(j, static_cast<int>(ir) * na + ia) = b[j];
        }
    });
    grid_values_ = std::move(gv);
  }
  return *grid_values_;
}

ComplexMatrix dictionary_bilinear(const QuantumBasis& basis, const std::function<cplx(cplx, int, int)>& factor,
                                  int threads) {
  SeparableSet s = separable_values(basis, basis.dictionary);
  return bilinear_from_separable(basis.grid, s, s, factor, threads);
}

double disc_flux(const KahlerModel& model, double radius) {
  // radial models: flux = 2 theta_scale int_0^R |mu(rho)| rho drho
  std::vector<double> x, w;
  gauss_legendre(96, x, w);
  std::vector<double> terms(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double rho = 0.5 * radius * (x[i] + 1.0);
    KahlerModel unperturbed = model;
    unperturbed.epsilon = 0.0;
    CurvatureReport rep = curvature_report(unperturbed, cplx(rho, 0));
    terms[i] = std::abs(rep.det_rdot) * rho * (0.5 * radius * w[i]) * 2.0 * model.theta_scale;
  }
  return pairwise_sum(std::span<const double>(terms));
}

QuantumBasis build_basis(const KahlerModel& model, int k, const BasisOptions& options) {
  if (k < 1) fail(ErrorKind::domain, "build_basis: k must be >= 1");
  if (model.kind == ModelKind::landau_q1)
    fail(ErrorKind::domain, "build_basis handles q=0 models; use spectral_space_q1 for the Landau model");
  QuantumBasis basis;
  basis.model = model;
  basis.k = k;
  basis.q = 0;
  basis.cutoff_exponent = options.cutoff_exponent;

  int dict_size = 0;
  if (model.compact()) {
    basis.grid = cp1_rule(k, options.n_radial, options.n_angular);
    dict_size = k + 1;
  } else {
    int k_min = options.k_min > 0 ? options.k_min : k;
    basis.disc_R = disc_radius(model, k_min);
    double flux = disc_flux(model, basis.disc_R);
    dict_size = std::max(1, static_cast<int>(std::lround(k * flux)));
    int nr = options.n_radial > 0 ? options.n_radial : std::max(2 * k + 16, dict_size + 64);
    int na = options.n_angular > 0 ? options.n_angular : std::max(4 * k + 16, 2 * dict_size + 24);
    basis.grid = disc_rule(k, basis.disc_R, nr, na);
  }
  basis.dictionary.reserve(dict_size);
  for (int m = 0; m < dict_size; ++m) basis.dictionary.push_back({m, 0});

  orthonormalize_staged(basis, options.threads);
  return basis;
}

QuantumBasis spectral_space_q1(const KahlerModel& model, int k, const BasisOptions& options) {
  if (model.kind != ModelKind::landau_q1)
    fail(ErrorKind::domain, "spectral_space_q1 requires the landau_q1 model");
  if (model.epsilon != 0.0) fail(ErrorKind::domain, "q=1 model does not support perturbations");
  QuantumBasis basis;
  basis.model = model;
  basis.k = k;
  basis.q = 1;
  basis.cutoff_exponent = options.cutoff_exponent;
  int k_min = options.k_min > 0 ? options.k_min : k;
  basis.disc_R = disc_radius(model, k_min);
  double flux = disc_flux(model, basis.disc_R);
  int d0 = std::max(1, static_cast<int>(std::lround(k * flux)));
  int d1 = std::min(d0, 12); // a few first-excited-band generators witness the spectral gap
  int nr = options.n_radial > 0 ? options.n_radial : std::max(2 * k + 16, d0 + 64);
  int na = options.n_angular > 0 ? options.n_angular : std::max(4 * k + 16, 2 * (d0 + 1) + 24);
  basis.grid = disc_rule(k, basis.disc_R, nr, na);

  // dictionary: zbar^m e^{2k phi} dzbar (harmonic when restricted to the plane)
  // plus z zbar^m e^{2k phi} dzbar probing the next Landau band
  for (int m = 0; m < d0; ++m) basis.dictionary.push_back({0, m});
  for (int m = 0; m < d1; ++m) basis.dictionary.push_back({1, m});

  QuantumBasis pre = basis;
  {
    ComplexMatrix gram = dictionary_bilinear(basis, weight_factor(model, k), options.threads);
    int dropped = 0;
    pre.coeffs = orthonormalize_gram(gram, dropped);
    pre.dropped = dropped;
  }

  // weak Kodaira form: dbar* (z^a zbar^m e^{2k phi} dzbar) = -a z^{a-1} zbar^m e^{2k phi}
  // (n = 1, so the dbar part of the form vanishes identically)
  SeparableSet derived;
  {
    const auto& grid = basis.grid;
    derived.harmonic.reserve(basis.dictionary.size());
    derived.radial.assign(basis.dictionary.size(), std::vector<double>(grid.n_radial(), 0.0));
    for (size_t i = 0; i < basis.dictionary.size(); ++i) {
      const auto& e = basis.dictionary[i];
      int a = e.z_power;
      derived.harmonic.push_back(a - 1 - e.zbar_power);
      if (a == 0) continue; // dbar* annihilates the antiholomorphic sector
      for (int ir = 0; ir < grid.n_radial(); ++ir) {
        double rho = grid.radial_rho[ir];
        double lg = basis.envelope_log(rho);
        int total = a - 1 + e.zbar_power;
        if (total > 0) lg += total * std::log(rho);
        derived.radial[i][ir] = double(a) * std::exp(lg);
      }
    }
  }
  ComplexMatrix qform = bilinear_from_separable(basis.grid, derived, derived, weight_factor(model, k),
                                                options.threads);
  ComplexMatrix q_on = pre.coeffs.adjoint() * qform * pre.coeffs;
  for (int i = 0; i < q_on.rows; ++i)
    for (int j = i; j < q_on.cols; ++j) {
      cplx v = 0.5 * (q_on(i, j) + std::conj(q_on(j, i)));
      q_on(i, j) = v;
      q_on(j, i) = std::conj(v);
    }
  EigResult eig = hermitian_eig(q_on);

  const double cutoff = std::pow(double(k), -double(options.cutoff_exponent));
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(eig.eigenvalues.size()); ++i)
    if (eig.eigenvalues[i] <= cutoff) keep.push_back(i);
  if (keep.empty())
    fail(ErrorKind::geometry, "spectral_space_q1: no eigenvalue below the k^-N cutoff; empty spectral space");

  ComplexMatrix w(q_on.rows, static_cast<int>(keep.size()));
  basis.q1_eigenvalues.clear();
  for (size_t j = 0; j < keep.size(); ++j) {
    basis.q1_eigenvalues.push_back(eig.eigenvalues[keep[j]]);
    for (int i = 0; i < q_on.rows; ++i) w(i, static_cast<int>(j)) = eig.eigenvectors(i, keep[j]);
  }
  basis.coeffs = pre.coeffs * w;
  basis.dropped = pre.dropped;
  return basis;
}

ProjectorValue projector_kernel(const QuantumBasis& basis, cplx x, cplx y) {
  const ComplexMatrix& d = basis.density_matrix();
  std::vector<cplx> ux(basis.dictionary.size()), uy(basis.dictionary.size());
  for (size_t i = 0; i < basis.dictionary.size(); ++i) {
    ux[i] = basis.dictionary_value(static_cast<int>(i), x);
    uy[i] = basis.dictionary_value(static_cast<int>(i), y);
  }
  cplx acc = 0;
  for (size_t a = 0; a < ux.size(); ++a) {
    if (ux[a] == cplx(0)) continue;
    for (size_t b = 0; b < uy.size(); ++b)
      acc += ux[a] * d(static_cast<int>(a), static_cast<int>(b)) * std::conj(uy[b]);
  }
  ProjectorValue pv;
  pv.value = acc;
  pv.complementary_structural_zero = (basis.q == 1);
  return pv;
}

} // namespace btq
