#include "gerbelab/cechdeligne.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <numeric>

namespace gerbelab::cechdeligne {

namespace {

/// Sorts a tuple, returning +1/-1 for even/odd permutations and 0 when
/// an index repeats.
int sort_tuple(std::vector<int>& indices) {
  int sign = 1;
  for (std::size_t i = 0; i + 1 < indices.size(); ++i)
    for (std::size_t j = 0; j + 1 < indices.size() - i; ++j)
      if (indices[j] > indices[j + 1]) {
        std::swap(indices[j], indices[j + 1]);
        sign = -sign;
      }
  for (std::size_t i = 0; i + 1 < indices.size(); ++i)
    if (indices[i] == indices[i + 1]) return 0;
  return sign;
}

/// Lexicographic positions of the i<j (and i<j<k) component orderings.
int pair_pos(int i, int j, int dim) {
  int pos = 0;
  for (int a = 0; a < i; ++a) pos += dim - a - 1;
  return pos + (j - i - 1);
}

std::vector<std::array<int, 3>> triple_list(int dim) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k) out.push_back({i, j, k});
  return out;
}

}  // namespace

bool Cover::in_overlap(const std::vector<int>& indices, const Vector& u) const {
  for (int idx : indices) {
    if (idx < 0 || idx >= size()) throw std::out_of_range("Cover: bad index");
    if (!members[idx](u)) return false;
  }
  return true;
}

Vector Cover::sample_overlap(const std::vector<int>& indices, std::mt19937_64& rng,
                             int max_tries) const {
  const int dim = static_cast<int>(box.size());
  Vector u(dim);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    for (int i = 0; i < dim; ++i) {
      // keep an interior margin so finite differences stay in the box
      double lo = box[i].first, hi = box[i].second;
      double margin = 1e-3 * (hi - lo);
      std::uniform_real_distribution<double> dist(lo + margin, hi - margin);
      u[i] = dist(rng);
    }
    if (in_overlap(indices, u)) return u;
  }
  throw sampler_error("Cover: could not sample the requested overlap");
}

Complex CircleCochain::eval(std::vector<int> indices, const Vector& u) const {
  if (static_cast<int>(indices.size()) != level + 1)
    throw std::invalid_argument("CircleCochain: tuple length must be level + 1");
  int sign = sort_tuple(indices);
  if (sign == 0) return Complex(1, 0);  // degenerate tuple
  Complex value = raw(indices, u);
  return sign > 0 ? value : Complex(1, 0) / value;
}

std::vector<Complex> FormCochain::eval(std::vector<int> indices, const Vector& u) const {
  if (static_cast<int>(indices.size()) != level + 1)
    throw std::invalid_argument("FormCochain: tuple length must be level + 1");
  int sign = sort_tuple(indices);
  if (sign == 0) {
    std::vector<int> probe(indices.begin(), indices.end());
    std::iota(probe.begin(), probe.end(), 0);
    return std::vector<Complex>(raw(probe, u).size(), Complex(0, 0));
  }
  std::vector<Complex> value = raw(indices, u);
  if (sign < 0)
    for (auto& v : value) v = -v;
  return value;
}

CircleCochain coboundary(const CircleCochain& h) {
  CircleCochain out;
  out.level = h.level + 1;
  out.raw = [h](const std::vector<int>& indices, const Vector& u) {
    Complex prod(1, 0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      std::vector<int> face;
      for (std::size_t m = 0; m < indices.size(); ++m)
        if (m != k) face.push_back(indices[m]);
      Complex value = h.eval(face, u);
      prod = (k % 2 == 0) ? prod * value : prod / value;
    }
    return prod;
  };
  return out;
}

FormCochain coboundary(const FormCochain& h) {
  FormCochain out;
  out.level = h.level + 1;
  out.form_degree = h.form_degree;
  out.raw = [h](const std::vector<int>& indices, const Vector& u) {
    std::vector<Complex> sum;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      std::vector<int> face;
      for (std::size_t m = 0; m < indices.size(); ++m)
        if (m != k) face.push_back(indices[m]);
      std::vector<Complex> value = h.eval(face, u);
      if (sum.empty()) sum.assign(value.size(), Complex(0, 0));
      for (std::size_t c = 0; c < value.size(); ++c)
        sum[c] += (k % 2 == 0) ? value[c] : -value[c];
    }
    return sum;
  };
  return out;
}

double check_cocycle(const CircleCochain& f, const Cover& cover, int samples,
                     std::mt19937_64& rng) {
  if (f.level != 2) throw std::invalid_argument("check_cocycle: need a level-2 cochain");
  if (cover.size() < 4)
    throw std::invalid_argument("check_cocycle: cover has no quadruple overlaps");
  double worst = 0;
  for (int a = 0; a < cover.size(); ++a)
    for (int b = a + 1; b < cover.size(); ++b)
      for (int c = b + 1; c < cover.size(); ++c)
        for (int d = c + 1; d < cover.size(); ++d)
          for (int s = 0; s < samples; ++s) {
            Vector u = cover.sample_overlap({a, b, c, d}, rng);
            Complex product = f.eval({a, b, c}, u) / f.eval({a, b, d}, u) *
                              f.eval({a, c, d}, u) / f.eval({b, c, d}, u);
            worst = std::max(worst, std::abs(product - Complex(1, 0)));
          }
  return worst;
}

BocksteinResult bockstein(const CircleCochain& f, const std::vector<int>& indices,
                          const Vector& u) {
  if (f.level != 2) throw std::invalid_argument("bockstein: need a level-2 cochain");
  if (indices.size() != 4) throw std::invalid_argument("bockstein: need four indices");
  const int a = indices[0], b = indices[1], c = indices[2], d = indices[3];
  std::array<Complex, 4> values = {
      f.eval({a, b, c}, u), f.eval({a, b, d}, u), f.eval({a, c, d}, u),
      f.eval({b, c, d}, u)};
  double alternating = 0;
  int sign = 1;
  for (const Complex& v : values) {
    // distance (in angle) from the principal-branch cut at -1
    if (kPi - std::abs(std::arg(v)) < 1e-8)
      throw branch_error("bockstein: cochain value on the log branch cut");
    alternating += sign * std::log(v).imag();
    sign = -sign;
  }
  BocksteinResult result;
  result.value = alternating / kTwoPi;
  result.integer = std::lround(result.value);
  result.defect = std::abs(result.value - static_cast<double>(result.integer));
  return result;
}

namespace {

/// Central-difference partial of a scalar-list evaluator.
std::vector<Complex> fd_partial(
    const std::function<std::vector<Complex>(const Vector&)>& f, const Vector& u,
    int axis, double h) {
  Vector up = u, um = u;
  up[axis] += h;
  um[axis] -= h;
  std::vector<Complex> hi = f(up), lo = f(um);
  for (std::size_t c = 0; c < hi.size(); ++c) hi[c] = (hi[c] - lo[c]) / (2 * h);
  return hi;
}

}  // namespace

DeligneResiduals verify_deligne(const DeligneData& data, int samples,
                                std::mt19937_64& rng, double fd_step) {
  if (data.cover == nullptr) throw std::invalid_argument("verify_deligne: missing cover");
  const Cover& cover = *data.cover;
  const int dim = static_cast<int>(cover.box.size());
  const auto triples = triple_list(dim);
  DeligneResiduals res{0, 0, 0};

  // (i) dF_a = 2 pi i Omega on each single chart (vacuous below three
  // dimensions, where no 3-forms exist)
  for (int a = 0; !triples.empty() && a < cover.size(); ++a)
    for (int s = 0; s < samples; ++s) {
      Vector u = cover.sample_overlap({a}, rng);
      auto curv_at = [&](const Vector& x) { return data.curv.eval({a}, x); };
      std::vector<std::vector<Complex>> d_curv(dim);
      for (int i = 0; i < dim; ++i) d_curv[i] = fd_partial(curv_at, u, i, fd_step);
      std::vector<Complex> om = data.omega(u);
      for (std::size_t t = 0; t < triples.size(); ++t) {
        auto [i, j, k] = triples[t];
        Complex df = d_curv[i][pair_pos(j, k, dim)] - d_curv[j][pair_pos(i, k, dim)] +
                     d_curv[k][pair_pos(i, j, dim)];
        res.curvature = std::max(res.curvature,
                                 std::abs(df - Complex(0, kTwoPi) * om[t]));
      }
    }

  // (ii) F_a - F_b = dA_ab on pair overlaps
  for (int a = 0; a < cover.size(); ++a)
    for (int b = a + 1; b < cover.size(); ++b)
      for (int s = 0; s < samples; ++s) {
        Vector u = cover.sample_overlap({a, b}, rng);
        auto a_at = [&](const Vector& x) { return data.a.eval({a, b}, x); };
        std::vector<std::vector<Complex>> d_a(dim);
        for (int i = 0; i < dim; ++i) d_a[i] = fd_partial(a_at, u, i, fd_step);
        std::vector<Complex> fa = data.curv.eval({a}, u);
        std::vector<Complex> fb = data.curv.eval({b}, u);
        for (int i = 0; i < dim; ++i)
          for (int j = i + 1; j < dim; ++j) {
            Complex curl = d_a[i][j] - d_a[j][i];
            Complex diff = fa[pair_pos(i, j, dim)] - fb[pair_pos(i, j, dim)];
            res.transition = std::max(res.transition, std::abs(diff - curl));
          }
      }

  // (iii) A_ab - A_ag + A_bg = f^-1 df on triple overlaps
  for (int a = 0; a < cover.size(); ++a)
    for (int b = a + 1; b < cover.size(); ++b)
      for (int g = b + 1; g < cover.size(); ++g)
        for (int s = 0; s < samples; ++s) {
          Vector u = cover.sample_overlap({a, b, g}, rng);
          Complex f0 = data.f.eval({a, b, g}, u);
          auto f_at = [&](const Vector& x) {
            return std::vector<Complex>{data.f.eval({a, b, g}, x)};
          };
          std::vector<Complex> ab = data.a.eval({a, b}, u);
          std::vector<Complex> ag = data.a.eval({a, g}, u);
          std::vector<Complex> bg = data.a.eval({b, g}, u);
          for (int i = 0; i < dim; ++i) {
            Complex dlog = fd_partial(f_at, u, i, fd_step)[0] / f0;
            Complex delta = ab[i] - ag[i] + bg[i];
            res.cocycle = std::max(res.cocycle, std::abs(delta - dlog));
          }
        }
  return res;
}

double MonopoleData::relation_residual(int samples, std::mt19937_64& rng,
                                       double fd_step) const {
  // sample the equatorial band where both charts are defined
  std::uniform_real_distribution<double> theta_dist(kPi / 2 - 0.35, kPi / 2 + 0.35);
  std::uniform_real_distribution<double> phi_dist(0.01, kTwoPi - 0.01);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    Vector u(2);
    u << theta_dist(rng), phi_dist(rng);
    std::vector<Complex> an = a_north(u), as = a_south(u);
    Complex f0 = f_ns(u);
    auto f_at = [&](const Vector& x) { return std::vector<Complex>{f_ns(x)}; };
    for (int i = 0; i < 2; ++i) {
      Complex dlog = fd_partial(f_at, u, i, fd_step)[0] / f0;
      worst = std::max(worst, std::abs((an[i] - as[i]) - dlog));
    }
  }
  return worst;
}

double MonopoleData::equator_integral(int nodes) const {
  // trapezoid rule on the periodic phi circle at theta = pi/2
  const double h = kTwoPi / nodes;
  std::vector<Complex> terms(nodes);
  for (int s = 0; s < nodes; ++s) {
    Vector u(2);
    u << kPi / 2, s * h;
    terms[s] = h * (a_north(u)[1] - a_south(u)[1]);
  }
  Complex total = pairwise_sum(std::span<const Complex>(terms));
  return (total / Complex(0, kTwoPi)).real();
}

MonopoleData monopole_demo(int k) {
  MonopoleData data;
  data.k = k;
  data.box = {{0.0, kPi}, {0.0, kTwoPi}};
  const double half = 0.5 * k;
  data.a_north = [half](const Vector& u) {
    return std::vector<Complex>{Complex(0, 0), Complex(0, half * (1 - std::cos(u[0])))};
  };
  data.a_south = [half](const Vector& u) {
    return std::vector<Complex>{Complex(0, 0), Complex(0, -half * (1 + std::cos(u[0])))};
  };
  data.f_ns = [k](const Vector& u) { return std::polar(1.0, k * u[1]); };
  return data;
}

Cover sphere_two_chart_cover() {
  Cover cover;
  cover.box = {{0.0, kPi}, {0.0, kTwoPi}};
  cover.members.push_back([](const Vector& u) { return u[0] < kPi / 2 + 0.4; });
  cover.members.push_back([](const Vector& u) { return u[0] > kPi / 2 - 0.4; });
  return cover;
}

Cover box_four_chart_cover() {
  Cover cover;
  cover.box = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
  cover.members.push_back([](const Vector& u) { return u[0] < 0.7; });
  cover.members.push_back([](const Vector& u) { return u[0] > 0.3; });
  cover.members.push_back([](const Vector& u) { return u[1] < 0.7; });
  cover.members.push_back([](const Vector& u) { return u[1] > 0.3; });
  return cover;
}

namespace {

/// Quadratic polynomial in three variables with analytic gradient.
struct Poly2 {
  double c0 = 0;
  std::array<double, 3> c1{};
  std::array<std::array<double, 3>, 3> c2{};  // symmetric upper part used

  static Poly2 random(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Poly2 p;
    p.c0 = dist(rng);
    for (int i = 0; i < 3; ++i) p.c1[i] = dist(rng);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) p.c2[i][j] = dist(rng);
    return p;
  }

  double eval(const Vector& u) const {
    double v = c0;
    for (int i = 0; i < 3; ++i) v += c1[i] * u[i];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) v += c2[i][j] * u[i] * u[j];
    return v;
  }

  double deriv(const Vector& u, int axis) const {
    double v = c1[axis];
    for (int j = axis; j < 3; ++j) v += c2[axis][j] * u[j];
    for (int i = 0; i <= axis; ++i) v += c2[i][axis] * u[i];
    // the diagonal term was added twice on purpose: d(x^2)/dx = 2x
    return v;
  }
};

struct SyntheticPotentials {
  int m;                                  // cover size
  std::vector<Poly2> q;                   // pair potentials, index a*m+b (a<b)
  std::vector<std::array<Poly2, 3>> a1;   // per-chart 1-form components
  std::array<Poly2, 3> g2;                // global 2-form components (01, 02, 12)

  const Poly2& q_at(int a, int b) const { return q[a * m + b]; }
};

}  // namespace

DeligneData synthetic_deligne(const Cover& cover, std::mt19937_64& rng) {
  if (cover.box.size() != 3)
    throw std::invalid_argument("synthetic_deligne: needs a 3d box cover");
  auto pot = std::make_shared<SyntheticPotentials>();
  pot->m = cover.size();
  pot->q.resize(pot->m * pot->m);
  // modest q coefficients keep |d(phase)| small enough that the
  // finite-difference d log f stays well under the 1e-6 budget
  for (int a = 0; a < pot->m; ++a)
    for (int b = a + 1; b < pot->m; ++b)
      pot->q[a * pot->m + b] = Poly2::random(rng, 0.12);
  pot->a1.resize(pot->m);
  for (int a = 0; a < pot->m; ++a)
    for (int i = 0; i < 3; ++i) pot->a1[a][i] = Poly2::random(rng, 0.5);
  for (int i = 0; i < 3; ++i) pot->g2[i] = Poly2::random(rng, 0.5);

  DeligneData data;
  data.cover = &cover;
  // f_abg = exp(2 pi i (q_bg - q_ag + q_ab)): the coboundary of the
  // circle 1-cochain exp(2 pi i q)
  data.f.level = 2;
  data.f.raw = [pot](const std::vector<int>& idx, const Vector& u) {
    double phase = pot->q_at(idx[1], idx[2]).eval(u) - pot->q_at(idx[0], idx[2]).eval(u) +
                   pot->q_at(idx[0], idx[1]).eval(u);
    return std::polar(1.0, kTwoPi * phase);
  };
  // A_ab = 2 pi i dq_ab + a_b - a_a; the a-parts cancel in the
  // alternating sum, leaving exactly f^-1 df
  data.a.level = 1;
  data.a.form_degree = 1;
  data.a.raw = [pot](const std::vector<int>& idx, const Vector& u) {
    std::vector<Complex> comps(3);
    for (int i = 0; i < 3; ++i)
      comps[i] = Complex(0, kTwoPi * pot->q_at(idx[0], idx[1]).deriv(u, i)) +
                 Complex(pot->a1[idx[1]][i].eval(u) - pot->a1[idx[0]][i].eval(u), 0);
    return comps;
  };
  // F_a = -da_a + G, so F_a - F_b = d(A_ab) and dF_a = dG
  data.curv.level = 0;
  data.curv.form_degree = 2;
  data.curv.raw = [pot](const std::vector<int>& idx, const Vector& u) {
    const auto& a1 = pot->a1[idx[0]];
    auto curl = [&](int i, int j) { return a1[j].deriv(u, i) - a1[i].deriv(u, j); };
    return std::vector<Complex>{Complex(-curl(0, 1) + pot->g2[0].eval(u), 0),
                                Complex(-curl(0, 2) + pot->g2[1].eval(u), 0),
                                Complex(-curl(1, 2) + pot->g2[2].eval(u), 0)};
  };
  // Omega = dG / (2 pi i)
  data.omega = [pot](const Vector& u) {
    double dg = pot->g2[2].deriv(u, 0) - pot->g2[1].deriv(u, 1) + pot->g2[0].deriv(u, 2);
    return std::vector<Complex>{Complex(dg, 0) / Complex(0, kTwoPi)};
  };
  return data;
}

DeligneData monopole_as_deligne(const MonopoleData& monopole, const Cover& cover) {
  DeligneData data;
  data.cover = &cover;
  data.f.level = 2;
  data.f.raw = [](const std::vector<int>&, const Vector&) {
    // a two-chart cover has no triple overlaps
    return Complex(1, 0);
  };
  data.a.level = 1;
  data.a.form_degree = 1;
  MonopoleData m = monopole;
  data.a.raw = [m](const std::vector<int>&, const Vector& u) {
    std::vector<Complex> an = m.a_north(u), as = m.a_south(u);
    for (std::size_t i = 0; i < an.size(); ++i) an[i] -= as[i];
    return an;
  };
  data.curv.level = 0;
  data.curv.form_degree = 2;
  const double half = 0.5 * m.k;
  data.curv.raw = [half](const std::vector<int>&, const Vector& u) {
    // dA_N = dA_S = i (k/2) sin(theta) d theta ^ d phi
    return std::vector<Complex>{Complex(0, half * std::sin(u[0]))};
  };
  data.omega = [](const Vector&) { return std::vector<Complex>{}; };
  return data;
}

}  // namespace gerbelab::cechdeligne
