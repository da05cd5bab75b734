#include "gerbelab/cechdeligne.hpp"

#include "doctest.h"
#include "gerbelab/dirac.hpp"
#include "gerbelab/geometry.hpp"
#include "gerbelab/lie.hpp"

#include <memory>
#include <random>

using namespace gerbelab;
using namespace gerbelab::cechdeligne;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

/// Random circle-valued 1-cochain with smooth polynomial phases.
CircleCochain random_circle_pairs(int m, std::mt19937_64& rng, double scale) {
  auto phases = std::make_shared<std::vector<double>>();
  std::uniform_real_distribution<double> dist(-scale, scale);
  // phase_{ab}(u) = c0 + c1 u0 + c2 u1 u2, coefficients per pair
  for (int i = 0; i < m * m * 3; ++i) phases->push_back(dist(rng));
  CircleCochain h;
  h.level = 1;
  h.raw = [phases, m](const std::vector<int>& idx, const Vector& u) {
    const double* c = phases->data() + (idx[0] * m + idx[1]) * 3;
    double ph = c[0] + c[1] * u[0] + c[2] * u[1] * u[2];
    return std::polar(1.0, kTwoPi * ph);
  };
  return h;
}

}  // namespace

TEST_CASE("CircleCochain: permutation extension inverts on odd swaps") {
  CircleCochain f;
  f.level = 1;
  f.raw = [](const std::vector<int>& idx, const Vector&) {
    return std::polar(1.0, 0.3 + 0.1 * idx[0] + 0.7 * idx[1]);
  };
  Vector u = Vector::Zero(3);
  Complex fwd = f.eval({0, 2}, u);
  Complex bwd = f.eval({2, 0}, u);
  CHECK(std::abs(fwd * bwd - 1.0) < 1e-15);
  CHECK(std::abs(f.eval({2, 2}, u) - Complex(1, 0)) < 1e-15);  // degenerate
}

TEST_CASE("FormCochain: permutation extension flips signs") {
  FormCochain a;
  a.level = 1;
  a.form_degree = 1;
  a.raw = [](const std::vector<int>& idx, const Vector& u) {
    return std::vector<Complex>{Complex(idx[0] + u[0], 0), Complex(idx[1], 0),
                                Complex(0, 0)};
  };
  Vector u = vec3(0.4, 0, 0);
  auto fwd = a.eval({1, 3}, u);
  auto bwd = a.eval({3, 1}, u);
  for (std::size_t i = 0; i < fwd.size(); ++i) CHECK(std::abs(fwd[i] + bwd[i]) < 1e-15);
}

TEST_CASE("coboundary of a coboundary is trivial") {
  std::mt19937_64 rng(11);
  CircleCochain h = random_circle_pairs(6, rng, 0.5);
  CircleCochain ddh = coboundary(coboundary(h));
  Vector u = vec3(0.2, 0.8, 0.5);
  CHECK(std::abs(ddh.eval({0, 1, 2, 3}, u) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(ddh.eval({1, 2, 4, 5}, u) - Complex(1, 0)) < 1e-12);

  FormCochain a;
  a.level = 0;
  a.form_degree = 1;
  a.raw = [](const std::vector<int>& idx, const Vector& u) {
    return std::vector<Complex>{Complex(std::sin(u[0] + idx[0]), 0.2),
                                Complex(u[1] * idx[0], 0), Complex(0.3, u[2])};
  };
  FormCochain dda = coboundary(coboundary(a));
  for (const Complex& c : dda.eval({0, 2, 4}, u)) CHECK(std::abs(c) < 1e-13);
}

TEST_CASE("check_cocycle: trivial and coboundary cochains have tiny residual") {
  Cover cover = box_four_chart_cover();
  std::mt19937_64 rng(21);

  CircleCochain ones;
  ones.level = 2;
  ones.raw = [](const std::vector<int>&, const Vector&) { return Complex(1, 0); };
  CHECK(check_cocycle(ones, cover, 4, rng) == 0.0);

  CircleCochain h = random_circle_pairs(cover.size(), rng, 0.8);
  CHECK(check_cocycle(coboundary(h), cover, 4, rng) < 1e-12);

  // breaking the cocycle is detected
  CircleCochain broken = coboundary(h);
  auto inner = broken.raw;
  broken.raw = [inner](const std::vector<int>& idx, const Vector& u) {
    Complex v = inner(idx, u);
    if (idx[0] == 0 && idx[1] == 1 && idx[2] == 2) v *= std::polar(1.0, 0.05 * u[0]);
    return v;
  };
  CHECK(check_cocycle(broken, cover, 6, rng) > 1e-4);
}

TEST_CASE("check_cocycle on the dirac spectral-window cocycle over SU(2)") {
  geometry::Chart su2 = geometry::su2_hyperspherical();
  dirac::CoverSpec spec = dirac::CoverSpec::uniform(5);

  Cover cover;
  cover.box = su2.box;
  for (int j = 0; j < spec.size(); ++j)
    cover.members.push_back([&su2, &spec, j](const Vector& u) {
      return dirac::in_cover({su2.eval(u)}, j, spec);
    });

  CircleCochain f;
  f.level = 2;
  f.raw = [&su2, &spec](const std::vector<int>& idx, const Vector& u) {
    return dirac::gerbe_cocycle({su2.eval(u)}, spec.levels[idx[0]], spec.levels[idx[1]],
                                spec.levels[idx[2]]);
  };
  std::mt19937_64 rng(5);
  CHECK(check_cocycle(f, cover, 2, rng) < 1e-10);
}

TEST_CASE("bockstein: constant cochains telescope to zero") {
  Vector u = vec3(0.5, 0.5, 0.5);
  CircleCochain ones;
  ones.level = 2;
  ones.raw = [](const std::vector<int>&, const Vector&) { return Complex(1, 0); };
  auto r0 = bockstein(ones, {0, 1, 2, 3}, u);
  CHECK(r0.integer == 0);
  CHECK(r0.defect == 0.0);

  CircleCochain eye;
  eye.level = 2;
  eye.raw = [](const std::vector<int>&, const Vector&) { return Complex(0, 1); };
  auto ri = bockstein(eye, {0, 1, 2, 3}, u);
  CHECK(ri.integer == 0);
  CHECK(ri.defect < 1e-15);
}

TEST_CASE("bockstein: values on the branch cut are refused") {
  CircleCochain minus;
  minus.level = 2;
  minus.raw = [](const std::vector<int>&, const Vector&) { return Complex(-1, 0); };
  CHECK_THROWS_AS(bockstein(minus, {0, 1, 2, 3}, Vector::Zero(3)), branch_error);
}

TEST_CASE("bockstein quantization on valid synthetic cocycles") {
  Cover cover = box_four_chart_cover();
  std::mt19937_64 rng(31);
  DeligneData data = synthetic_deligne(cover, rng);
  int checked = 0;
  while (checked < 25) {
    Vector u = cover.sample_overlap({0, 1, 2, 3}, rng);
    try {
      auto r = bockstein(data.f, {0, 1, 2, 3}, u);
      CHECK(r.defect < 1e-6);
      ++checked;
    } catch (const branch_error&) {
      // a face value fell on the cut; resample
    }
  }
}

TEST_CASE("bockstein integer is unchanged by small gauge moves") {
  Cover cover = box_four_chart_cover();
  std::mt19937_64 rng(41);
  DeligneData data = synthetic_deligne(cover, rng);
  // gauge cochain with small phases: all logs stay branch-compatible,
  // so the pointwise integer (not just the class) is preserved
  CircleCochain lambda = random_circle_pairs(cover.size(), rng, 0.02);
  CircleCochain gauge = coboundary(lambda);
  CircleCochain moved;
  moved.level = 2;
  moved.raw = [&data, &gauge](const std::vector<int>& idx, const Vector& u) {
    return data.f.eval(idx, u) * gauge.eval(idx, u);
  };
  int checked = 0;
  while (checked < 10) {
    Vector u = cover.sample_overlap({0, 1, 2, 3}, rng);
    try {
      auto before = bockstein(data.f, {0, 1, 2, 3}, u);
      auto after = bockstein(moved, {0, 1, 2, 3}, u);
      CHECK(before.integer == after.integer);
      ++checked;
    } catch (const branch_error&) {
    }
  }
}

TEST_CASE("verify_deligne: zero data passes exactly") {
  Cover cover = box_four_chart_cover();
  DeligneData zero;
  zero.cover = &cover;
  zero.f.level = 2;
  zero.f.raw = [](const std::vector<int>&, const Vector&) { return Complex(1, 0); };
  zero.a.level = 1;
  zero.a.form_degree = 1;
  zero.a.raw = [](const std::vector<int>&, const Vector&) {
    return std::vector<Complex>(3, Complex(0, 0));
  };
  zero.curv.level = 0;
  zero.curv.form_degree = 2;
  zero.curv.raw = [](const std::vector<int>&, const Vector&) {
    return std::vector<Complex>(3, Complex(0, 0));
  };
  zero.omega = [](const Vector&) { return std::vector<Complex>{Complex(0, 0)}; };
  std::mt19937_64 rng(3);
  auto res = verify_deligne(zero, 2, rng);
  CHECK(res.curvature == 0.0);
  CHECK(res.transition == 0.0);
  CHECK(res.cocycle == 0.0);
}

TEST_CASE("verify_deligne: synthetic valid data passes, perturbed data fails linearly") {
  Cover cover = box_four_chart_cover();
  std::mt19937_64 rng(7);
  DeligneData data = synthetic_deligne(cover, rng);
  std::mt19937_64 sample_rng(100);
  auto res = verify_deligne(data, 3, sample_rng);
  CHECK(res.curvature < 1e-6);
  CHECK(res.transition < 1e-6);
  CHECK(res.cocycle < 1e-6);

  // perturb every A_ab by the same non-closed eps * u1 du0
  for (double eps : {1e-3, 2e-3}) {
    DeligneData bent = data;
    auto base = data.a.raw;
    bent.a.raw = [base, eps](const std::vector<int>& idx, const Vector& u) {
      auto comps = base(idx, u);
      comps[0] += eps * u[1];
      return comps;
    };
    std::mt19937_64 rng_a(55);  // same samples for both eps runs
    auto bent_res = verify_deligne(bent, 3, rng_a);
    // d(eps u1 du0) has the single component -eps d u0^du1
    CHECK(bent_res.transition == doctest::Approx(eps).epsilon(1e-3));
  }
}

TEST_CASE("monopole_demo: relation (1) and the equator integral") {
  std::mt19937_64 rng(13);
  for (int k : {-3, 0, 1, 5}) {
    MonopoleData data = monopole_demo(k);
    CHECK(data.relation_residual(30, rng) < 1e-6);
    CHECK(data.equator_integral() == doctest::Approx(static_cast<double>(k)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("monopole data moves through verify_deligne") {
  Cover cover = sphere_two_chart_cover();
  MonopoleData monopole = monopole_demo(2);
  DeligneData data = monopole_as_deligne(monopole, cover);
  std::mt19937_64 rng(17);
  auto res = verify_deligne(data, 10, rng);
  CHECK(res.curvature == 0.0);  // vacuous in two dimensions
  CHECK(res.transition < 1e-6);
  CHECK(res.cocycle == 0.0);  // no triple overlaps on a two-chart cover
}

TEST_CASE("sample_overlap raises sampler_error on empty overlaps") {
  Cover cover;
  cover.box = {{0.0, 1.0}};
  cover.members.push_back([](const Vector& u) { return u[0] < 0.3; });
  cover.members.push_back([](const Vector& u) { return u[0] > 0.7; });
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(cover.sample_overlap({0, 1}, rng, 200), sampler_error);
  CHECK_NOTHROW(cover.sample_overlap({0}, rng));
}
