#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "quadsub/quadsub.hpp"

using namespace quadsub;

namespace {

QuadraticSymbol random_symbol(int n, std::mt19937& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat r(2 * n, 2 * n), s(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      r(i, j) = normal(rng);
      s(i, j) = normal(rng);
    }
  return QuadraticSymbol(n, r * r.transpose(), s + s.transpose());
}

QuadraticSymbol davies() {
  Mat q_re = Mat::Zero(2, 2), q_im = Mat::Zero(2, 2);
  q_re(1, 1) = 1.0;
  q_im(0, 0) = 1.0;
  return QuadraticSymbol(1, q_re, q_im);
}

}  // namespace

TEST_CASE("symplectic convention") {
  const Mat j = symplectic_matrix(2);
  CHECK((j.transpose() + j).norm() == 0.0);
  CHECK((j * j + Mat::Identity(4, 4)).norm() == 0.0);
  // sigma((x,xi),(y,eta)) = xi.y - x.eta
  Vec a(2), b(2);
  a << 1.0, 2.0;  // x = 1, xi = 2
  b << 3.0, 4.0;  // y = 3, eta = 4
  CHECK(sigma_of(a, b) == doctest::Approx(2.0 * 3.0 - 1.0 * 4.0).epsilon(1e-15));
}

TEST_CASE("symbol constructor symmetrizes and rejects indefinite real parts") {
  Mat q_re(2, 2), q_im(2, 2);
  q_re << 1.0, 0.5, 0.1, 1.0;  // asymmetric input
  q_im.setZero();
  QuadraticSymbol q(1, q_re, q_im);
  CHECK((q.q_re() - q.q_re().transpose()).norm() == 0.0);
  CHECK(q.q_re()(0, 1) == doctest::Approx(0.3));

  Mat bad = Mat::Zero(2, 2);
  bad(0, 0) = 1.0;
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(QuadraticSymbol(1, bad, q_im), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticSymbol(1, Mat::Zero(3, 3), Mat::Zero(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("hamilton map of the harmonic oscillator") {
  QuadraticSymbol q(1, Mat::Identity(2, 2), Mat::Zero(2, 2));
  const HamiltonMap f = hamilton_map(q);
  Mat expected(2, 2);
  expected << 0.0, 1.0, -1.0, 0.0;
  CHECK((f.re - expected).norm() == 0.0);
  CHECK(f.im.norm() == 0.0);
}

TEST_CASE("hamilton map of the rotated oscillator, polarization oracle") {
  const QuadraticSymbol q = davies();
  const HamiltonMap f = hamilton_map(q);
  Mat f_re(2, 2), f_im(2, 2);
  f_re << 0.0, 1.0, 0.0, 0.0;
  f_im << 0.0, 0.0, -1.0, 0.0;
  CHECK((f.re - f_re).norm() < 1e-15);
  CHECK((f.im - f_im).norm() < 1e-15);

  // sigma(e_j, F e_k) must reproduce the polarized symbol on basis pairs.
  const CMat fc = f.matrix();
  const CMat qc = q.q();
  const CMat jc = symplectic_matrix(1).cast<Complex>();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const Complex lhs = (CVec(CVec::Unit(2, j)).transpose() * jc * fc *
                           CVec(CVec::Unit(2, k)))(0);
      CHECK(std::abs(lhs - qc(j, k)) < 1e-12);
    }
}

TEST_CASE("hamilton map identity and skew-symmetry on random symbols") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + trial % 3;
    const QuadraticSymbol q = random_symbol(n, rng);
    const CMat fc = hamilton_map(q).matrix();
    const CMat jc = symplectic_matrix(n).cast<Complex>();
    const CMat qc = q.q();
    CHECK((jc * fc - qc).cwiseAbs().maxCoeff() < 1e-12);
    // sigma(FX, Y) + sigma(X, FY) = 0
    CHECK((fc.transpose() * jc + jc * fc).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("poisson derivative matches the gradient formula") {
  // f = x^2, g = xi^2 gives H_f g = -4 x xi.
  RealQuadForm f((Mat(2, 2) << 1, 0, 0, 0).finished());
  RealQuadForm g((Mat(2, 2) << 0, 0, 0, 1).finished());
  const RealQuadForm hg = poisson_derivative(g, f);
  Mat expected(2, 2);
  expected << 0.0, -2.0, -2.0, 0.0;
  CHECK((hg.matrix() - expected).norm() < 1e-15);

  // Oracle: H_f g(X) = grad_xi f . grad_x g - grad_x f . grad_xi g.
  std::mt19937 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const QuadraticSymbol q = random_symbol(2, rng);
  const RealQuadForm fr = q.real_part(), fi = q.imag_part();
  const RealQuadForm h = poisson_derivative(fr, fi);
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(4);
    for (int i = 0; i < 4; ++i) x(i) = normal(rng);
    const Vec grad_f = 2.0 * fi.matrix() * x;
    const Vec grad_g = 2.0 * fr.matrix() * x;
    const double direct = grad_f.tail(2).dot(grad_g.head(2)) -
                          grad_f.head(2).dot(grad_g.tail(2));
    CHECK(h.value(x) == doctest::Approx(direct).epsilon(1e-12));
  }

  CHECK(poisson_derivative(RealQuadForm(Mat::Zero(4, 4)), fi).matrix().norm() == 0.0);
  CHECK_THROWS_AS(poisson_derivative(g, RealQuadForm(Mat::Zero(4, 4))),
                  std::invalid_argument);
}

TEST_CASE("second Poisson derivative matches the flow Taylor coefficient") {
  const QuadraticSymbol q = davies();
  RealQuadForm g = q.real_part();
  const RealQuadForm f = q.imag_part();
  g = poisson_derivative(poisson_derivative(g, f), f);
  Vec x(2);
  x << 1.0, 0.0;
  CHECK(g.value(x) == doctest::Approx(8.0).epsilon(1e-14));

  // Re q along the flow of Im q from (1,0) is exactly 4 t^2.
  for (double t : {0.01, 0.1, 0.5}) {
    const Vec moved = hamiltonian_flow(f, t) * x;
    CHECK(q.real_part().value(moved) == doctest::Approx(4.0 * t * t).epsilon(1e-12));
  }
}

TEST_CASE("hamiltonian flow: shear, identity, rotation") {
  RealQuadForm f((Mat(2, 2) << 1, 0, 0, 0).finished());
  const double t = 0.37;
  Mat expected(2, 2);
  expected << 1.0, 0.0, -2.0 * t, 1.0;
  CHECK((hamiltonian_flow(f, t) - expected).norm() < 1e-14);

  RealQuadForm h(Mat::Identity(2, 2));
  CHECK((hamiltonian_flow(h, 0.0) - Mat::Identity(2, 2)).norm() == 0.0);

  // rotation by 2t, against the series oracle
  const Mat flow = hamiltonian_flow(h, t);
  Mat gen(2, 2);
  gen << 0.0, 2.0 * t, -2.0 * t, 0.0;
  CHECK((flow - oracles::expm_series(gen)).norm() < 1e-13);
  CHECK(flow(0, 0) == doctest::Approx(std::cos(2.0 * t)).epsilon(1e-14));
  CHECK(std::abs(flow.determinant() - 1.0) < 1e-10);
}

TEST_CASE("flow group property and symplecticity") {
  std::mt19937 rng(11);
  const QuadraticSymbol raw = random_symbol(2, rng);
  const RealQuadForm f(raw.q_im() / raw.q_im().norm());
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double s = uni(rng), t = uni(rng);
    const Mat lhs = hamiltonian_flow(f, s) * hamiltonian_flow(f, t);
    CHECK((lhs - hamiltonian_flow(f, s + t)).cwiseAbs().maxCoeff() < 1e-10);
  }
  const Mat j = symplectic_matrix(2);
  const Mat flow = hamiltonian_flow(f, 0.8);
  CHECK((flow.transpose() * j * flow - j).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("bargmann transform preserves sigma and maps reals onto the graph") {
  for (int n : {1, 2, 3}) {
    const CanonicalTransform k = bargmann_transform(n);
    CHECK(k.sigma_residual() < 1e-12);
    CHECK(bargmann_inverse(n).sigma_residual() < 1e-12);
    CHECK((bargmann_inverse(n).a * k.a - CMat::Identity(2 * n, 2 * n))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    std::mt19937 rng(17 + n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      CVec real_point(2 * n);
      for (int i = 0; i < 2 * n; ++i) real_point(i) = normal(rng);
      const CVec image = k.a * real_point;
      // xi = -i conj(x) on the image of R^{2n}
      const CVec x = image.head(n), xi = image.tail(n);
      CHECK((xi + Complex(0, 1) * x.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("phase weight equals |x|^2/2 by direct maximization") {
  std::mt19937 rng(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    CVec x(1);
    x(0) = Complex(normal(rng), normal(rng));
    double best = -1e300;
    for (int i = 0; i <= 4000; ++i) {
      CVec y(1);
      y(0) = -8.0 + 16.0 * i / 4000.0;
      best = std::max(best, -bargmann_phase(x, y).imag());
    }
    CHECK(best == doctest::Approx(phi0_value(x)).epsilon(1e-5));
  }
}

TEST_CASE("bargmann conjugation") {
  QuadraticSymbol zero(1, Mat::Zero(2, 2), Mat::Zero(2, 2));
  CHECK(conjugate_by_bargmann(zero).norm() == 0.0);

  // harmonic oscillator restricted to the graph is real and positive
  QuadraticSymbol harm(1, Mat::Identity(2, 2), Mat::Zero(2, 2));
  const CMat qt = conjugate_by_bargmann(harm);
  std::mt19937 rng(29);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    CVec z(2);
    const Complex x(normal(rng), normal(rng));
    z << x, -Complex(0, 1) * std::conj(x);
    const Complex value = symbol_value(qt, z);
    CHECK(std::abs(value.imag()) < 1e-12);
    CHECK(value.real() > 0.0);
  }

  // round trip through the canonical map reproduces the symbol on reals
  for (int n : {1, 2}) {
    const QuadraticSymbol q = random_symbol(n, rng);
    const CMat qtn = conjugate_by_bargmann(q);
    const CMat kt = bargmann_transform(n).a;
    for (int trial = 0; trial < 10; ++trial) {
      CVec real_point(2 * n);
      for (int i = 0; i < 2 * n; ++i) real_point(i) = normal(rng);
      const Complex via = symbol_value(qtn, CVec(kt * real_point));
      const Complex direct = q.value(real_point.real());
      CHECK(std::abs(via - direct) < 1e-12 * (1.0 + std::abs(direct)));
    }
  }
}
