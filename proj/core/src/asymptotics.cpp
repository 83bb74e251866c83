#include "btq/asymptotics.hpp"

#include <array>
#include <climits>
#include <cmath>
#include <functional>
#include <numbers>

namespace btq {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<int> unit_exponents(int dim, int i, int j) {
  std::vector<int> e(dim, 0);
  e[i] += 1;
  e[j] += 1;
  return e;
}

// determinant of a small complex matrix by Gaussian elimination
cplx small_det(std::vector<std::vector<cplx>> m) {
  const int n = static_cast<int>(m.size());
  cplx det = 1;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    if (m[pivot][c] == cplx(0)) return 0;
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      cplx f = m[r][c] / m[c][c];
      for (int cc = c; cc < n; ++cc) m[r][cc] -= f * m[c][cc];
    }
  }
  return det;
}

std::vector<std::vector<cplx>> small_inverse(std::vector<std::vector<cplx>> m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<cplx>> inv(n, std::vector<cplx>(n, cplx(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    if (m[pivot][c] == cplx(0)) fail(ErrorKind::domain, "singular Hessian in stationary phase");
    std::swap(m[pivot], m[c]);
    std::swap(inv[pivot], inv[c]);
    cplx d = m[c][c];
    for (int cc = 0; cc < n; ++cc) {
      m[c][cc] /= d;
      inv[c][cc] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      cplx f = m[r][c];
      if (f == cplx(0)) continue;
      for (int cc = 0; cc < n; ++cc) {
        m[r][cc] -= f * m[c][cc];
        inv[r][cc] -= f * inv[c][cc];
      }
    }
  }
  return inv;
}

// det(M)^{-1/2} with the branch continued from M = I along (1-t) I + t M.
// The segment stays nonsingular for right-half-plane spectra; the Gaussian
// integral pins the resulting branch (square roots with argument in (-pi/2, pi/2]).
cplx det_inv_sqrt_continued(const std::vector<std::vector<cplx>>& m) {
  const int n = static_cast<int>(m.size());
  const int steps = 256;
  double arg_acc = 0;
  double prev_arg = 0;
  double log_abs_final = 0;
  for (int s = 1; s <= steps; ++s) {
    double t = double(s) / steps;
    std::vector<std::vector<cplx>> mt(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mt[i][j] = t * m[i][j] + ((i == j) ? cplx(1 - t) : cplx(0));
    cplx d = small_det(mt);
    if (d == cplx(0)) fail(ErrorKind::domain, "stationary phase: determinant homotopy hit zero");
    double a = std::arg(d);
    if (s == 1) {
      arg_acc = a;
    } else {
      double delta = a - prev_arg;
      while (delta > kPi) delta -= 2 * kPi;
      while (delta < -kPi) delta += 2 * kPi;
      arg_acc += delta;
    }
    prev_arg = a;
    if (s == steps) log_abs_final = std::log(std::abs(d));
  }
  return std::exp(cplx(-0.5 * log_abs_final, -0.5 * arg_acc));
}

} // namespace

StationaryPhaseResult stationary_phase_terms(const StationaryPhaseProblem& p, double k, int n_terms) {
  const int dim = p.dim;
  if (p.phase.vars() != dim || p.amplitude.vars() != dim)
    fail(ErrorKind::domain, "stationary phase: jet variable count does not match dim");
  if (n_terms < 1) fail(ErrorKind::domain, "stationary phase: need at least one term");

  int ord = std::min(p.phase.order(), p.amplitude.order());
  if (p.density.vars() == dim) ord = std::min(ord, p.density.order());
  if (ord < 2) fail(ErrorKind::unsupported_order, "stationary phase: jets of order >= 2 required");

  Jet phase = p.phase.truncated(ord);
  Jet amplitude = p.amplitude.truncated(ord);
  Jet density = p.density.vars() == dim ? p.density.truncated(ord) : Jet::constant(dim, ord, 1.0);

  const cplx f0 = phase.value();
  if (std::abs(f0.imag()) > 1e-12)
    fail(ErrorKind::domain, "stationary phase: Im F(0) must vanish");
  for (int i = 0; i < dim; ++i) {
    std::vector<int> e(dim, 0);
    e[i] = 1;
    if (std::abs(phase.partial(e)) > 1e-10)
      fail(ErrorKind::domain, "stationary phase: F'(0) must vanish");
  }

  std::vector<std::vector<cplx>> hess(dim, std::vector<cplx>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto e = unit_exponents(dim, i, j);
      hess[i][j] = phase.partial(e);
    }
  if (small_det(hess) == cplx(0)) fail(ErrorKind::domain, "stationary phase: det F''(0) = 0");
  auto hinv = small_inverse(hess);

  // h = F - F(0) - quadratic part
  Jet h = phase - f0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      Jet xi = Jet::variable(dim, ord, i, cplx(0));
      Jet xj = Jet::variable(dim, ord, j, cplx(0));
      h = h - 0.5 * hess[i][j] * xi * xj;
    }
  // vanishing order of h (>= 3 when F'(0)=0); terms with mu v > 2 nu are identically zero
  int h_vanishing = ord + 1;
  {
    std::vector<int> e(dim, 0);
    bool found = false;
    for (int deg = 0; deg <= ord && !found; ++deg) {
      std::function<void(int, int)> scan = [&](int slot, int remaining) {
        if (found) return;
        if (slot == dim - 1) {
          e[slot] = remaining;
          if (std::abs(h.coeff(e)) > 1e-14) found = true;
          return;
        }
        for (int v = 0; v <= remaining && !found; ++v) {
          e[slot] = v;
          scan(slot + 1, remaining - v);
        }
      };
      scan(0, deg);
      if (found) h_vanishing = deg;
    }
    if (!found) h_vanishing = INT_MAX / 4;
  }
  auto mu_cap = [&](int j) {
    int cap = 2 * j; // the 2 nu >= 3 mu rule with nu = j + mu
    if (h_vanishing > 2) cap = std::min(cap, (2 * j) / (h_vanishing - 2));
    return cap;
  };
  int required = 2;
  for (int j = 0; j < n_terms; ++j) required = std::max(required, 2 * (j + mu_cap(j)));
  if (ord < required)
    fail(ErrorKind::unsupported_order,
         "stationary phase: jets of order >= " + std::to_string(required) + " required for N = " +
             std::to_string(n_terms));

  // <F''(0)^{-1} D, D> with D = -i grad is the operator -sum hinv_ij d_i d_j
  auto apply_quad = [&](const Jet& u) {
    Jet out(dim, u.order());
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (hinv[i][j] == cplx(0)) continue;
        out = out + (-hinv[i][j]) * u.derivative(i).derivative(j);
      }
    return out;
  };

  Jet base = amplitude * density;

  StationaryPhaseResult res;
  res.terms.assign(n_terms, cplx(0));
  for (int j = 0; j < n_terms; ++j) {
    cplx lj = 0;
    for (int mu = 0; mu <= mu_cap(j); ++mu) { // 2 nu >= 3 mu with nu = j + mu
      int nu = j + mu;
      if (2 * nu < 3 * mu) continue;
      Jet integrand = base;
      for (int c = 0; c < mu; ++c) integrand = integrand * h;
      Jet d = integrand;
      for (int c = 0; c < nu; ++c) d = apply_quad(d);
      cplx i_pow = std::pow(cplx(0, 1), -double(j));
      lj += i_pow * std::pow(2.0, -double(nu)) * d.value() / (factorial(nu) * factorial(mu));
    }
    res.terms[j] = lj;
  }

  std::vector<std::vector<cplx>> scaled(dim, std::vector<cplx>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) scaled[i][j] = k * hess[i][j] / (2.0 * kPi * cplx(0, 1));
  res.prefactor = std::exp(cplx(0, 1) * k * f0) * det_inv_sqrt_continued(scaled);

  cplx sum = 0;
  for (int j = 0; j < n_terms; ++j) sum += res.terms[j] * std::pow(k, -double(j));
  res.value = res.prefactor * sum;
  return res;
}

namespace {

// curvature scalars and jets shared by the coefficient formulas
struct GeometryJets {
  double det_rdot = 0;
  double h11 = 0; // 1/omega_11
  double r = 0, r_hat = 0;
  double lap_r = 0, lap_r_hat = 0;
  cplx ric;  // (log V_omega)_{z zbar}
  cplx rdet; // (log V_Theta)_{z zbar}
  double ric_norm_sq = 0, rdet_norm_sq = 0, rtm_norm_sq = 0;
  cplx ric_rdet; // <Ric | Rdet>_omega
};

GeometryJets geometry_jets(const KahlerModel& model, cplx x) {
  GeometryJets g;
  CurvatureReport rep = curvature_report(model, x);
  if (rep.signature_class != 0)
    fail(ErrorKind::domain, "coefficient formulas require x in M(0) (positive curvature)");
  g.det_rdot = rep.det_rdot;
  g.h11 = 1.0 / rep.omega_coeffs.real();

  Jet omega = omega11_jet(model, x, 6);
  Jet log_v_omega = log(omega);
  Jet log_v_theta = log(model.theta_jet(x, 6));
  Jet r_jet = laplacian_omega_jet(model, x, log_v_omega);     // order 4
  Jet r_hat_jet = laplacian_omega_jet(model, x, log_v_theta); // order 4
  g.r = r_jet.value().real();
  g.r_hat = r_hat_jet.value().real();
  g.lap_r = laplacian_omega_jet(model, x, r_jet).value().real();
  g.lap_r_hat = laplacian_omega_jet(model, x, r_hat_jet).value().real();
  g.ric = log_v_omega.partial2(1, 1);
  g.rdet = log_v_theta.partial2(1, 1);
  g.ric_norm_sq = std::norm(g.ric) * g.h11 * g.h11;
  g.rdet_norm_sq = std::norm(g.rdet) * g.h11 * g.h11;
  g.rtm_norm_sq = g.ric_norm_sq; // n = 1 frame reduction: a single curvature entry
  g.ric_rdet = g.ric * std::conj(g.rdet) * g.h11 * g.h11;
  return g;
}

cplx pair11(const GeometryJets& g, cplx a, cplx b) { return a * std::conj(b) * g.h11 * g.h11; }

} // namespace

CoefficientSet closed_form_coefficients(const KahlerModel& model, const Symbol& f, cplx x, int depth) {
  if (depth < 0 || depth > 2) fail(ErrorKind::domain, "closed_form_coefficients: depth must be 0..2");
  GeometryJets g = geometry_jets(model, x);
  Jet fj = f.jet(x, 6);
  const cplx fval = fj.value();
  const double inv2pi = 1.0 / (2.0 * kPi);

  CoefficientSet out;
  out.point = x;
  out.depth = depth;
  out.provenance = "closed_form";
  out.b0 = inv2pi * fval * std::abs(g.det_rdot);
  if (depth >= 1) {
    Jet lap_f = laplacian_omega_jet(model, x, fj); // order 4
    out.b1 = inv2pi * g.det_rdot *
             (fval * (g.r_hat / (4 * kPi) - g.r / (8 * kPi)) - lap_f.value() / (4 * kPi));
    if (depth >= 2) {
      Jet lap2_f = laplacian_omega_jet(model, x, lap_f);
      cplx dbar_d_f = -fj.partial2(1, 1); // dbar d f in the dz wedge dzbar basis
      const double r = g.r, rh = g.r_hat;
      cplx curv_part = r * r / (128 * kPi * kPi) - r * rh / (32 * kPi * kPi) + rh * rh / (32 * kPi * kPi) -
                       g.lap_r_hat / (32 * kPi * kPi) - g.rdet_norm_sq / (8 * kPi * kPi) +
                       g.ric_rdet / (8 * kPi * kPi) + g.lap_r / (96 * kPi * kPi) -
                       g.ric_norm_sq / (24 * kPi * kPi) + g.rtm_norm_sq / (96 * kPi * kPi);
      cplx f_part = lap_f.value() * (-rh + 0.5 * r) / (16 * kPi * kPi) -
                    pair11(g, dbar_d_f, g.rdet) / (4 * kPi * kPi) +
                    pair11(g, dbar_d_f, g.ric) / (8 * kPi * kPi) + lap2_f.value() / (32 * kPi * kPi);
      out.b2 = inv2pi * g.det_rdot * (fval * curv_part + f_part);
    }
  }
  return out;
}

CoefficientSet composition_coefficients(const KahlerModel& model, const Symbol& f, const Symbol& g, cplx x,
                                        int depth) {
  if (depth < 0 || depth > 2) fail(ErrorKind::domain, "composition_coefficients: depth must be 0..2");
  GeometryJets gg = geometry_jets(model, x);
  SymbolPtr fg = product_symbol(std::shared_ptr<const Symbol>(&f, [](const Symbol*) {}),
                                std::shared_ptr<const Symbol>(&g, [](const Symbol*) {}));
  CoefficientSet prod = closed_form_coefficients(model, *fg, x, depth);

  Jet fj = f.jet(x, 6);
  Jet gj = g.jet(x, 6);
  const double inv2pi = 1.0 / (2.0 * kPi);

  CoefficientSet out;
  out.point = x;
  out.depth = depth;
  out.provenance = "closed_form";
  out.b0 = inv2pi * fj.value() * gj.value() * std::abs(gg.det_rdot);
  if (depth >= 1) {
    // <df | dgbar>_omega = h^{11} f_z g_zbar
    cplx grad_pair = gg.h11 * fj.partial2(1, 0) * gj.partial2(0, 1);
    out.b1 = prod.b1 + inv2pi * gg.det_rdot * (-grad_pair / (2 * kPi));
    if (depth >= 2) {
      Jet lap_f = laplacian_omega_jet(model, x, fj);
      Jet lap_g = laplacian_omega_jet(model, x, gj);
      // dbar g wedge df = -(f_z g_zbar) dz wedge dzbar
      cplx dbarg_df = -(fj.partial2(1, 0) * gj.partial2(0, 1));
      cplx dbar_d_f = -fj.partial2(1, 1);
      cplx dbar_d_gbar = -std::conj(gj.partial2(1, 1));
      cplx d10_f = d10_covariant(model, fj.derivative(0), x);
      cplx d10_gbar = d10_covariant(model, gj.pair_conjugate().derivative(0), x);
      cplx term = -pair11(gg, dbarg_df, gg.ric) / (4 * kPi * kPi) +
                  pair11(gg, dbarg_df, gg.rdet) / (4 * kPi * kPi) +
                  gg.h11 * lap_f.partial2(1, 0) * gj.partial2(0, 1) / (8 * kPi * kPi) +
                  gg.h11 * lap_g.partial2(0, 1) * fj.partial2(1, 0) / (8 * kPi * kPi) -
                  gg.h11 * gg.h11 * d10_f * std::conj(d10_gbar) / (8 * kPi * kPi) -
                  pair11(gg, dbar_d_f, dbar_d_gbar) / (4 * kPi * kPi) +
                  gg.h11 * fj.partial2(1, 0) * gj.partial2(0, 1) * (-gg.r_hat + 0.5 * gg.r) / (8 * kPi * kPi);
      out.b2 = prod.b2 + inv2pi * gg.det_rdot * term;
    }
  }
  return out;
}

namespace {

// C1(f,g) as a chart symbol: -(1/2pi) h^{11}(z) f_z g_zbar, realized through jets.
class C1Symbol final : public Symbol {
public:
  C1Symbol(KahlerModel model, SymbolPtr f, SymbolPtr g)
      : model_(std::move(model)), f_(std::move(f)), g_(std::move(g)) {}
  std::string name() const override { return "C1(" + f_->name() + "," + g_->name() + ")"; }
  Jet jet(cplx z, int order) const override {
    Jet fj = f_->jet(z, order + 1);
    Jet gj = g_->jet(z, order + 1);
    Jet omega = omega11_jet(model_, z, order);
    Jet num = (fj.derivative(0) * gj.derivative(1)).truncated(order);
    return num * inverse(omega) * (-1.0 / (2.0 * kPi));
  }
  bool is_real() const override { return false; }

private:
  KahlerModel model_;
  SymbolPtr f_, g_;
};

} // namespace

StarProduct star_product(const KahlerModel& model, SymbolPtr f, SymbolPtr g, cplx x, int order) {
  if (order < 0 || order > 2) fail(ErrorKind::domain, "star_product: order must be 0..2");
  GeometryJets gg = geometry_jets(model, x);
  const double abs_det = std::abs(gg.det_rdot);
  const double two_pi_n = 2.0 * kPi; // (2 pi)^n, n = 1

  StarProduct sp;
  sp.order = order;
  sp.c0 = f->eval(x) * g->eval(x);
  if (order == 0) return sp;

  SymbolPtr fg = product_symbol(f, g);
  CoefficientSet comp = composition_coefficients(model, *f, *g, x, order);
  CoefficientSet prod = closed_form_coefficients(model, *fg, x, order);
  // order matching: b_{f,g,1} = b_{C0,1} + b_{C1,0}
  sp.c1 = (comp.b1 - prod.b1) * two_pi_n / abs_det;
  if (order >= 2) {
    auto c1_symbol = std::make_shared<C1Symbol>(model, f, g);
    CoefficientSet c1_set = closed_form_coefficients(model, *c1_symbol, x, 1);
    // b_{f,g,2} = b_{C0,2} + b_{C1,1} + b_{C2,0}
    sp.c2 = (comp.b2 - prod.b2 - c1_set.b1) * two_pi_n / abs_det;
  }
  return sp;
}

namespace {

Jet extend_to_order(const Jet& j, int ord) {
  if (j.vars() == 0) return Jet(2, ord);
  if (j.order() == ord) return j;
  if (j.order() > ord) return j.truncated(ord);
  Jet out(2, ord);
  Jet z = Jet::variable(2, ord, 0, cplx(0));
  Jet zb = Jet::variable(2, ord, 1, cplx(0));
  for (int a = 0; a <= j.order(); ++a)
    for (int b = 0; a + b <= j.order(); ++b) {
      cplx c = j.coeff2(a, b);
      if (c == cplx(0)) continue;
      Jet mono = Jet::constant(2, ord, c);
      for (int i = 0; i < a; ++i) mono = mono * z;
      for (int i = 0; i < b; ++i) mono = mono * zb;
      out = out + mono;
    }
  return out;
}

} // namespace

CoefficientSet coefficient_recursion(const RecursionInput& input, int depth) {
  if (depth < 0 || depth > 2) fail(ErrorKind::domain, "coefficient_recursion: depth must be 0..2");
  if (input.lambda <= 0) fail(ErrorKind::domain, "coefficient_recursion: requires positive curvature (q=0)");
  const int ord = input.phi1.order();
  if (ord < 2 * (depth + 2))
    fail(ErrorKind::unsupported_order, "coefficient_recursion: jets of order >= " +
                                           std::to_string(2 * (depth + 2)) + " required");
  if (input.v_theta.vars() != 2 || input.f.vars() != 2 || input.bergman0.vars() != 2)
    fail(ErrorKind::domain, "coefficient_recursion: missing jets");

  std::array<Jet, 3> b_left = {extend_to_order(input.bergman0, ord), extend_to_order(input.bergman1, ord),
                               extend_to_order(input.bergman2, ord)};
  std::array<Jet, 3> b_right;
  for (int s = 0; s < 3; ++s) b_right[s] = b_left[s].pair_conjugate();
  Jet v_theta = extend_to_order(input.v_theta, ord);
  Jet f = extend_to_order(input.f, ord);

  auto delta0 = [&](const Jet& u) { return u.derivative(0).derivative(1) * (1.0 / input.lambda); };

  const double pref = 2.0 * kPi / input.det_rdot; // (2 pi)^n (det Rdot)^{-1}, n = 1

  std::array<cplx, 3> b_f = {0, 0, 0};
  for (int j = 0; j <= depth; ++j) {
    cplx acc = 0;
    for (int m = 0; m <= j; ++m) {
      for (int mu = 0; mu <= m; ++mu) { // 2 nu >= 4 mu with nu = m + mu means mu <= m
        int nu = m + mu;
        if (2 * nu < 4 * mu) continue;
        for (int s = 0; s + m <= j; ++s) {
          int t = j - m - s;
          Jet integrand = v_theta * f * b_left[s] * b_right[t];
          for (int c = 0; c < mu; ++c) integrand = integrand * input.phi1;
          Jet d = integrand;
          for (int c = 0; c < nu; ++c) d = delta0(d);
          double sign = (mu % 2 == 0) ? 1.0 : -1.0;
          acc += sign * std::pow(2.0, -double(m)) * d.value() / (factorial(nu) * factorial(mu));
        }
      }
    }
    b_f[static_cast<size_t>(j)] = pref * acc;
  }
  CoefficientSet out;
  out.depth = depth;
  out.provenance = "recursion";
  out.b0 = b_f[0];
  out.b1 = depth >= 1 ? b_f[1] : cplx(0);
  out.b2 = depth >= 2 ? b_f[2] : cplx(0);
  return out;
}

} // namespace btq
