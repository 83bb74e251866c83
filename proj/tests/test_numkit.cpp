#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "btq/numkit.hpp"

using namespace btq;

namespace {

ComplexMatrix random_hermitian(int n, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = normal(rng);
    for (int j = i + 1; j < n; ++j) {
      cplx v(normal(rng), normal(rng));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

double reconstruction_residual(const ComplexMatrix& a, const EigResult& e) {
  ComplexMatrix lam(a.rows, a.rows);
  for (int i = 0; i < a.rows; ++i) lam(i, i) = e.eigenvalues[i];
  ComplexMatrix resid = a * e.eigenvectors - e.eigenvectors * lam;
  return resid.frobenius();
}

double beta_integral(int m, int n) {
  // B(m, n) = Gamma(m) Gamma(n) / Gamma(m + n) for integer arguments
  return std::tgamma(double(m)) * std::tgamma(double(n)) / std::tgamma(double(m + n));
}

} // namespace

TEST_CASE("hermitian_eig on the identity") {
  EigResult e = hermitian_eig(ComplexMatrix::identity(3));
  for (double lam : e.eigenvalues) CHECK(lam == doctest::Approx(1.0).epsilon(1e-14));
  ComplexMatrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
  CHECK((gram - ComplexMatrix::identity(3)).frobenius() < 1e-12);
}

TEST_CASE("hermitian_eig sorts a diagonal matrix ascending") {
  ComplexMatrix a(3, 3);
  a(0, 0) = 3;
  a(1, 1) = -1;
  a(2, 2) = 2;
  EigResult e = hermitian_eig(a);
  CHECK(e.eigenvalues[0] == doctest::Approx(-1));
  CHECK(e.eigenvalues[1] == doctest::Approx(2));
  CHECK(e.eigenvalues[2] == doctest::Approx(3));
}

TEST_CASE("hermitian_eig reconstruction residual on random matrices") {
  std::mt19937 rng(2024);
  ComplexMatrix a8 = random_hermitian(8, rng);
  EigResult e8 = hermitian_eig(a8);
  CHECK(reconstruction_residual(a8, e8) <= 1e-10 * a8.frobenius());

  for (int n : {2, 5, 13, 20}) {
    ComplexMatrix a = random_hermitian(n, rng);
    EigResult e = hermitian_eig(a);
    CHECK(reconstruction_residual(a, e) <= 1e-10 * std::max(1.0, a.frobenius()));
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::identity(n)).frobenius() < 1e-10);
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 0.5;
  CHECK_THROWS_AS(hermitian_eig(a), Error);
  try {
    hermitian_eig(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::convention_violation);
  }
}

TEST_CASE("gram_orthonormalize rescales a diagonal Gram") {
  std::vector<std::vector<cplx>> vecs = {{1, 0}, {0, 1}};
  ComplexMatrix gram(2, 2);
  gram(0, 0) = 4;
  gram(1, 1) = 9;
  OrthonormalizeResult r = gram_orthonormalize(vecs, gram);
  REQUIRE(r.rank == 2);
  CHECK(std::abs(r.vectors[0][0] - cplx(0.5)) < 1e-14);
  CHECK(std::abs(r.vectors[1][1] - cplx(1.0 / 3)) < 1e-14);
}

TEST_CASE("gram_orthonormalize drops a dependent direction") {
  // two copies of the same unit vector
  ComplexMatrix gram(2, 2);
  gram(0, 0) = gram(0, 1) = gram(1, 0) = gram(1, 1) = 1;
  OrthonormalizeResult r = gram_orthonormalize(gram);
  CHECK(r.rank == 1);
  CHECK(r.dropped == 1);
}

TEST_CASE("gram_orthonormalize on empty input") {
  OrthonormalizeResult r = gram_orthonormalize(std::vector<std::vector<cplx>>{}, ComplexMatrix(0, 0));
  CHECK(r.rank == 0);
  CHECK(r.vectors.empty());
}

TEST_CASE("monomials on the round grid orthonormalize to Gram residual 1e-10") {
  const int k = 9;
  QuadratureRule rule = cp1_rule(k);
  const int count = 10;
  // Gram of z^m under the weight (1+|z|^2)^{ -k }
  ComplexMatrix gram(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) {
      cplx s = rule.integrate_complex([&](cplx z) {
        return std::pow(z, a) * std::pow(std::conj(z), b) * std::pow(1.0 + std::norm(z), -double(k));
      });
      gram(a, b) = s;
    }
  OrthonormalizeResult r = gram_orthonormalize(gram);
  REQUIRE(r.rank == count);
  // residual: B* G B = I
  ComplexMatrix check = r.transform.adjoint() * gram * r.transform;
  CHECK((check - ComplexMatrix::identity(count)).max_abs() < 1e-10);
}

TEST_CASE("least_squares_fit recovers a planted series exactly") {
  std::vector<double> ks = {4, 8, 16};
  std::vector<cplx> vals;
  for (double k : ks) vals.push_back(2 * k + 3);
  std::vector<double> exps = {1, 0};
  LeastSquaresFit fit = least_squares_fit(ks, vals, exps);
  CHECK(std::abs(fit.coefficients[0] - cplx(2)) < 1e-12);
  CHECK(std::abs(fit.coefficients[1] - cplx(3)) < 1e-12);
  CHECK(fit.rms_residual < 1e-12);
}

TEST_CASE("least_squares_fit absorbs an unmodeled tail into a small constant") {
  std::vector<double> ks = {8, 16, 32, 64};
  std::vector<cplx> vals;
  for (double k : ks) vals.push_back(k + 1.0 / k);
  LeastSquaresFit fit = least_squares_fit(ks, vals, std::vector<double>{1, 0});
  CHECK(std::abs(fit.coefficients[0] - cplx(1)) < 0.01);
  CHECK(std::abs(fit.coefficients[1]) <= 0.2);
}

TEST_CASE("least_squares_fit interpolates a single sample") {
  std::vector<double> ks = {5};
  std::vector<cplx> vals = {cplx(7)};
  LeastSquaresFit fit = least_squares_fit(ks, vals, std::vector<double>{2});
  CHECK(std::abs(fit.coefficients[0] * 25.0 - cplx(7)) < 1e-12);
}

TEST_CASE("least_squares_fit rejects underdetermined systems") {
  std::vector<double> ks = {4, 8};
  std::vector<cplx> vals = {1, 2};
  CHECK_THROWS_AS(least_squares_fit(ks, vals, std::vector<double>{2, 1, 0}), Error);
}

TEST_CASE("round-model quadrature integrates the volume to 2 pi") {
  for (int k : {4, 16, 48}) {
    QuadratureRule rule = cp1_rule(k);
    for (double w : rule.weights) CHECK(w > 0);
    double vol = rule.integrate([](cplx) { return 1.0; });
    CHECK(std::abs(vol - 2 * std::numbers::pi) <= 1e-8 * 2 * std::numbers::pi);
  }
}

TEST_CASE("round-model quadrature is exact against Beta integrals") {
  const int k = 12;
  QuadratureRule rule = cp1_rule(k);
  // integral z^a zbar^b (1+|z|^2)^{-m} dv = 2 pi delta_ab B(a+1, m+1-a), m+2 absorbed in dv
  for (auto [a, b, m] : {std::tuple{0, 0, 2}, {1, 1, 4}, {3, 3, 6}, {2, 1, 5}, {6, 6, 6}}) {
    cplx got = rule.integrate_complex([&](cplx z) {
      return std::pow(z, a) * std::pow(std::conj(z), b) * std::pow(1.0 + std::norm(z), -double(m));
    });
    cplx expected = 0;
    if (a == b) expected = 2 * std::numbers::pi * beta_integral(a + 1, m + 1 - a);
    CHECK(std::abs(got - expected) <= 1e-10 * (std::abs(expected) + 1));
  }
}

TEST_CASE("disc quadrature reproduces Gaussian norms") {
  const int k = 16;
  QuadratureRule rule = disc_rule(k, std::sqrt(32.24 / k));
  // integral |z|^{2m} e^{-k|z|^2} dv = 2 pi m! / k^{m+1} up to the 1e-14 tail
  for (int m : {0, 2, 5}) {
    double got = rule.integrate([&](cplx z) { return std::pow(std::norm(z), m) * std::exp(-k * std::norm(z)); });
    double expected = 2 * std::numbers::pi * std::tgamma(m + 1.0) / std::pow(double(k), m + 1);
    CHECK(std::abs(got - expected) <= 1e-8 * expected); // full-plane target; the disc tail is ~1e-14 of the total mass
  }
}

TEST_CASE("pairwise summation matches plain accumulation") {
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> xs(1000);
  double plain = 0;
  for (auto& x : xs) {
    x = normal(rng);
    plain += x;
  }
  CHECK(pairwise_sum(std::span<const double>(xs)) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("operator norm of a diagonal matrix") {
  ComplexMatrix a(2, 2);
  a(0, 0) = cplx(0, 3); // singular value 3
  a(1, 1) = 1;
  CHECK(operator_norm(a) == doctest::Approx(3.0).epsilon(1e-10));
}
