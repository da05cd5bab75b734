#include "gerbelab/geometry.hpp"

#include "doctest.h"
#include "gerbelab/lie.hpp"
#include "oracles.hpp"

#include <cstdlib>
#include <random>

using namespace gerbelab;
using namespace gerbelab::geometry;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector random_point_in(const Chart& chart, std::mt19937_64& rng) {
  Vector u(chart.dim);
  for (int i = 0; i < chart.dim; ++i) {
    // stay away from the box edge so central differences apply
    std::uniform_real_distribution<double> dist(chart.box[i].first + 0.1,
                                                chart.box[i].second - 0.1);
    u[i] = dist(rng);
  }
  return u;
}

}  // namespace

TEST_CASE("gauss_legendre integrates monomials of degree 2n-1 exactly") {
  for (int n : {2, 5, 8}) {
    Rule1D rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0;
      for (int k = 0; k < n; ++k) sum += rule.weights[k] * std::pow(rule.nodes[k], p);
      double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      CHECK(sum == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("trapezoid-periodic rule kills nonzero Fourier modes") {
  QuadratureSpec quad{QuadRule::trapezoid_periodic, 16};
  Rule1D rule = axis_rule(quad, 0.0, kTwoPi);
  for (int m : {0, 1, 3, -5}) {
    Complex sum = 0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * std::polar(1.0, m * rule.nodes[k]);
    Complex exact = (m == 0) ? Complex(kTwoPi, 0) : Complex(0, 0);
    CHECK(std::abs(sum - exact) < 1e-12);
  }
}

TEST_CASE("partials: constant chart gives zero matrices") {
  Chart c = constant_chart(lie::pauli(1), 2, {{0, 1}, {0, 1}});
  auto d = partials(c, Vector::Constant(2, 0.5));
  REQUIRE(d.size() == 2);
  CHECK(d[0].norm() == 0.0);
  CHECK(d[1].norm() == 0.0);
}

TEST_CASE("partials: exp(u1 X) at the box corner via one-sided differences") {
  Matrix x = Complex(0, 1) * lie::pauli(3);
  Chart c;
  c.dim = 2;
  c.box = {{0, 1}, {0, 1}};
  c.eval = [x](const Vector& u) { return lie::exp_skew(u[0] * x); };
  auto d = partials(c, Vector::Zero(2));
  CHECK((d[0] - x).norm() < 1e-8);
  CHECK(d[1].norm() < 1e-10);
}

TEST_CASE("partials: analytic SU(2) derivatives agree with Richardson differences") {
  Chart analytic = su2_hyperspherical(true);
  Chart fd_h = su2_hyperspherical(false);
  Chart fd_h2 = su2_hyperspherical(false);
  fd_h.fd_step = 1e-4;
  fd_h2.fd_step = 5e-5;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Vector u = random_point_in(analytic, rng);
    auto exact = partials(analytic, u);
    auto rough = partials(fd_h, u);
    auto finer = partials(fd_h2, u);
    for (int i = 0; i < 3; ++i) {
      double e1 = (rough[i] - exact[i]).norm();
      double e2 = (finer[i] - exact[i]).norm();
      CHECK(e1 < 1e-6);
      // halving h shrinks the truncation error about fourfold
      if (e1 > 1e-11) CHECK(e2 < e1 * 0.4);
    }
  }
}

TEST_CASE("partials rejects points outside the box") {
  Chart c = constant_chart(Matrix::Identity(2, 2), 1, {{0, 1}});
  CHECK_THROWS_AS(partials(c, Vector::Constant(1, 2.0)), chart_error);
}

TEST_CASE("eval_form: antisymmetry and alternation of tr((g^-1 dg)^3)") {
  Chart su2 = su2_hyperspherical();
  FormWord word = make_word(WordKind::tr_mc_cubed);
  FormArgs args{{&su2}, nullptr};
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    Vector u = random_point_in(su2, rng);
    std::vector<Vector> t(3, Vector(3));
    for (auto& v : t)
      for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    Complex base = eval_form(word, args, u, t);
    Complex swapped = eval_form(word, args, u, {t[1], t[0], t[2]});
    CHECK(std::abs(base + swapped) < 1e-10 * (1 + std::abs(base)));
    Complex repeated = eval_form(word, args, u, {t[0], t[0], t[2]});
    CHECK(std::abs(repeated) < 1e-10 * (1 + std::abs(base)));
    // multilinearity in one slot
    Complex scaled = eval_form(word, args, u, {2.5 * t[0], t[1], t[2]});
    CHECK(std::abs(scaled - 2.5 * base) < 1e-10 * (1 + std::abs(base)));
  }
}

TEST_CASE("eval_form matches the hand-written permutation sum") {
  Chart su2 = su2_hyperspherical();
  FormWord word = make_word(WordKind::tr_mc_cubed);
  FormArgs args{{&su2}, nullptr};
  std::mt19937_64 rng(32);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 8; ++trial) {
    Vector u = random_point_in(su2, rng);
    std::vector<Vector> t(3, Vector(3));
    for (auto& v : t)
      for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    Complex lib = eval_form(word, args, u, t);
    Complex brute = oracle::mc_cubed_brute(su2, u, t[0], t[1], t[2]);
    CHECK(std::abs(lib - brute) < 1e-10 * (1 + std::abs(brute)));
  }
}

TEST_CASE("eval_form enforces the degree contract") {
  Chart su2 = su2_hyperspherical();
  FormWord word = make_word(WordKind::tr_mc_cubed);
  FormArgs args{{&su2}, nullptr};
  std::vector<Vector> two(2, Vector::Zero(3));
  CHECK_THROWS_AS(eval_form(word, args, vec3(1, 1, 1), two), std::invalid_argument);
}

TEST_CASE("integrate_form: constant map integrates to zero") {
  Chart c = constant_chart(lie::exp_skew(Complex(0, 1) * lie::pauli(2)), 3,
                           {{0, 1}, {0, 1}, {0, 1}});
  FormArgs args{{&c}, nullptr};
  auto result = integrate_form(make_word(WordKind::tr_mc_cubed), args, {QuadRule::gauss_legendre, 4});
  CHECK(std::abs(result.value) < 1e-12);
}

TEST_CASE("integrate_form: SU(2) volume via tr((g^-1 dg)^3)/12 and metric oracle") {
  Chart su2 = su2_hyperspherical();
  QuadratureSpec quad{QuadRule::gauss_legendre, 16};
  // two independent routes to vol(S^3) = 2 pi^2
  double metric = oracle::metric_volume(su2, quad);
  CHECK(metric == doctest::Approx(2 * kPi * kPi).epsilon(1e-7));
  FormArgs args{{&su2}, nullptr};
  auto form = integrate_form(make_word(WordKind::tr_mc_cubed), args, quad);
  CHECK(std::abs(form.value) / 12.0 == doctest::Approx(2 * kPi * kPi).epsilon(1e-7));
  CHECK(std::abs(form.value.imag()) < 1e-9);
}

TEST_CASE("integrate_form: SU(2) winding is +1 in this chart orientation") {
  // golden sign: axis order (psi, theta, phi) makes the integral positive
  Chart su2 = su2_hyperspherical();
  FormArgs args{{&su2}, nullptr};
  QuadratureSpec quad{QuadRule::gauss_legendre, 24};
  auto result = integrate_form(make_word(WordKind::tr_mc_cubed), args, quad);
  double winding = result.value.real() / (24 * kPi * kPi);
  CHECK(winding == doctest::Approx(1.0).epsilon(1e-3));
  // doubling the nodes moves the value by less than 10x the estimate
  QuadratureSpec fine{QuadRule::gauss_legendre, 48};
  auto refined = integrate_form(make_word(WordKind::tr_mc_cubed), args, fine);
  CHECK(std::abs(refined.value - result.value) < 10 * result.error_estimate);
}

TEST_CASE("integrate_form is invariant under orientation-preserving reparametrization") {
  Chart su2 = su2_hyperspherical();
  // smooth monotone bijection [0,pi] -> [0,pi] on the psi axis
  Chart warped;
  warped.dim = 3;
  warped.box = su2.box;
  warped.eval = [su2](const Vector& u) {
    Vector w = u;
    double s = u[0] / kPi;
    w[0] = kPi * (3 * s * s - 2 * s * s * s);
    return su2.eval(w);
  };
  warped.analytic_partials = [su2](const Vector& u) {
    Vector w = u;
    double s = u[0] / kPi;
    w[0] = kPi * (3 * s * s - 2 * s * s * s);
    auto d = su2.analytic_partials(w);
    d[0] *= 6 * s - 6 * s * s;  // chain rule through the warp
    return d;
  };
  QuadratureSpec quad{QuadRule::gauss_legendre, 20};
  FormArgs orig{{&su2}, nullptr};
  FormArgs rep{{&warped}, nullptr};
  auto a = integrate_form(make_word(WordKind::tr_mc_cubed), orig, quad);
  auto b = integrate_form(make_word(WordKind::tr_mc_cubed), rep, quad);
  CHECK(std::abs(a.value - b.value) < 1e-6 * std::abs(a.value));
}

TEST_CASE("integrate_form rejects degree/dimension mismatch") {
  Chart c = constant_chart(Matrix::Identity(2, 2), 2, {{0, 1}, {0, 1}});
  FormArgs args{{&c}, nullptr};
  CHECK_THROWS_AS(integrate_form(make_word(WordKind::tr_mc_cubed), args, {}),
                  std::invalid_argument);
}

TEST_CASE("tr(X dY) word reproduces the Fourier pairing on the circle") {
  Matrix a = 0.5 * lie::pauli(1);
  Matrix b = 0.5 * lie::pauli(3);
  QuadratureSpec quad{QuadRule::trapezoid_periodic, 32};
  for (int m : {0, 1, 2}) {
    for (int n : {-2, -1, 0, 1}) {
      Chart x = circle_fourier({{m, a}});
      Chart y = circle_fourier({{n, b}});
      FormArgs args{{&x, &y}, nullptr};
      auto integral = integrate_form(make_word(WordKind::tr_x_dy), args, quad);
      Complex expected = (m + n == 0)
                             ? Complex(0, kTwoPi * n) * (a * b).trace()
                             : Complex(0, 0);
      CHECK(std::abs(integral.value - expected) < 1e-12);
    }
  }
}

TEST_CASE("tr(g^-1 dg ^ dg' g'^-1) on commuting exponentials gives tr(XY)") {
  Matrix x = Complex(0, 0.8) * lie::pauli(1);
  Matrix y = Complex(0, -0.3) * lie::pauli(2);
  Chart g, gp;
  g.dim = gp.dim = 2;
  g.box = gp.box = {{0.0, 1.0}, {0.0, 1.0}};
  g.eval = [x](const Vector& u) { return lie::exp_skew(u[0] * x); };
  gp.eval = [y](const Vector& u) { return lie::exp_skew(u[1] * y); };
  FormArgs args{{&g, &gp}, nullptr};
  auto integral = integrate_form(make_word(WordKind::tr_left_right), args,
                                 {QuadRule::gauss_legendre, 8});
  CHECK(std::abs(integral.value - (x * y).trace()) < 1e-8);
}

TEST_CASE("tr(A ^ (dX dY - dY dX)) word: X = Y kills it, linear in A") {
  Chart x, y;
  x.dim = y.dim = 3;
  x.box = y.box = {{0, 1}, {0, 1}, {0, 1}};
  x.eval = [](const Vector& u) {
    return Matrix(Complex(0, u[0] * u[1]) * lie::pauli(1) +
                  Complex(0, u[2]) * lie::pauli(2));
  };
  y.eval = [](const Vector& u) {
    return Matrix(Complex(0, u[1] * u[2]) * lie::pauli(3) +
                  Complex(0, u[0] * u[0]) * lie::pauli(1));
  };
  OneFormField a;
  a.components = [](const Vector& u) {
    return std::vector<Matrix>{Complex(0, u[1]) * lie::pauli(2),
                               Complex(0, 1.0) * lie::pauli(3),
                               Complex(0, u[0] * u[2]) * lie::pauli(1)};
  };
  OneFormField a2;
  a2.components = [&a](const Vector& u) {
    auto c = a.components(u);
    for (auto& m : c) m *= 2.0;
    return c;
  };
  QuadratureSpec quad{QuadRule::gauss_legendre, 6};
  FormWord word = make_word(WordKind::tr_a_dxdy_comm);
  FormArgs same{{&x, &x}, &a};
  CHECK(std::abs(integrate_form(word, same, quad).value) < 1e-10);
  FormArgs base{{&x, &y}, &a};
  FormArgs doubled{{&x, &y}, &a2};
  Complex v1 = integrate_form(word, base, quad).value;
  Complex v2 = integrate_form(word, doubled, quad).value;
  CHECK(std::abs(v2 - 2.0 * v1) < 1e-12 * (1 + std::abs(v1)));
}

TEST_CASE("quadrature results are bit-identical across thread counts") {
  Chart su2 = su2_hyperspherical();
  FormArgs args{{&su2}, nullptr};
  QuadratureSpec quad{QuadRule::gauss_legendre, 10};
  setenv("GERBELAB_THREADS", "1", 1);
  Complex serial = integrate_form(make_word(WordKind::tr_mc_cubed), args, quad).value;
  setenv("GERBELAB_THREADS", "7", 1);
  Complex threaded = integrate_form(make_word(WordKind::tr_mc_cubed), args, quad).value;
  unsetenv("GERBELAB_THREADS");
  CHECK(serial.real() == threaded.real());
  CHECK(serial.imag() == threaded.imag());
}

TEST_CASE("su2 chart lands in SU(2)") {
  Chart su2 = su2_hyperspherical();
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    Matrix g = su2.eval(random_point_in(su2, rng));
    CHECK(lie::is_unitary(g, 1e-12));
    CHECK(std::abs(g.determinant() - 1.0) < 1e-12);
  }
}
