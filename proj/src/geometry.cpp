#include "gerbelab/geometry.hpp"

#include "gerbelab/lie.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace gerbelab::geometry {

bool Chart::contains(const Vector& u, double tol) const {
  if (u.size() != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (u[i] < box[i].first - tol || u[i] > box[i].second + tol) return false;
  return true;
}

std::vector<Matrix> partials(const Chart& chart, const Vector& u) {
  if (!chart.contains(u)) throw chart_error("partials: point outside chart box");
  if (chart.analytic_partials) return chart.analytic_partials(u);

  const double h = chart.fd_step;
  std::vector<Matrix> out(chart.dim);
  for (int i = 0; i < chart.dim; ++i) {
    const auto [lo, hi] = chart.box[i];
    Vector up = u, um = u;
    if (u[i] + h <= hi && u[i] - h >= lo) {
      up[i] += h;
      um[i] -= h;
      out[i] = (chart.eval(up) - chart.eval(um)) / (2.0 * h);
    } else if (u[i] + 2 * h <= hi) {
      // second-order forward difference at the lower edge
      Vector u2 = u;
      up[i] += h;
      u2[i] += 2 * h;
      out[i] = (-3.0 * chart.eval(u) + 4.0 * chart.eval(up) - chart.eval(u2)) / (2.0 * h);
    } else if (u[i] - 2 * h >= lo) {
      Vector u2 = u;
      um[i] -= h;
      u2[i] -= 2 * h;
      out[i] = (3.0 * chart.eval(u) - 4.0 * chart.eval(um) + chart.eval(u2)) / (2.0 * h);
    } else {
      throw chart_error("partials: box thinner than two finite-difference steps");
    }
  }
  return out;
}

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights
  // come from the first components of its eigenvectors.
  RealMatrix jacobi = RealMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(jacobi);
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()[k];
    double v = solver.eigenvectors()(0, k);
    rule.weights[k] = 2.0 * v * v;
  }
  return rule;
}

Rule1D axis_rule(const QuadratureSpec& quad, double lo, double hi) {
  if (quad.nodes_per_axis < 2)
    throw std::invalid_argument("axis_rule: need at least 2 nodes per axis");
  Rule1D rule;
  const int n = quad.nodes_per_axis;
  if (quad.rule == QuadRule::gauss_legendre) {
    Rule1D base = gauss_legendre(n);
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < n; ++k) {
      rule.nodes[k] = mid + half * base.nodes[k];
      rule.weights[k] = half * base.weights[k];
    }
  } else {
    // periodic trapezoid == shifted rectangle rule; the endpoint node
    // is identified with the start and therefore dropped
    const double h = (hi - lo) / n;
    rule.nodes.resize(n);
    rule.weights.assign(n, h);
    for (int k = 0; k < n; ++k) rule.nodes[k] = lo + k * h;
  }
  return rule;
}

FormWord make_word(WordKind kind) {
  switch (kind) {
    case WordKind::tr_x_dy:
      return {kind, 1, 2};
    case WordKind::tr_left_right:
      return {kind, 2, 2};
    case WordKind::tr_mc_cubed:
      return {kind, 3, 1};
    case WordKind::tr_a_dxdy_comm:
      return {kind, 3, 2};
    case WordKind::tr_mc_fifth:
      return {kind, 5, 1};
  }
  throw std::invalid_argument("make_word: unknown kind");
}

namespace {

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

/// slots[s][t] = (s-th 1-form factor) evaluated on the t-th tangent.
/// Returns sum over permutations sgn(s) tr(slot_1(t_s1) ... slot_k(t_sk)).
Complex wedge_trace(const std::vector<std::vector<Matrix>>& slots) {
  const int k = static_cast<int>(slots.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Complex> terms;
  do {
    Matrix prod = slots[0][perm[0]];
    for (int s = 1; s < k; ++s) prod = prod * slots[s][perm[s]];
    terms.push_back(static_cast<double>(permutation_sign(perm)) * prod.trace());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return pairwise_sum(std::span<const Complex>(terms));
}

/// Per-axis coefficient matrices of the word's 1-form slots at u, plus
/// the 0-form prefactor for tr_x_dy.
struct PointSlots {
  std::vector<std::vector<Matrix>> slot_coeffs;  // [slot][axis]
  Matrix prefactor;                              // tr_x_dy only
};

PointSlots compile_point(const FormWord& word, const FormArgs& args, const Vector& u) {
  if (static_cast<int>(args.maps.size()) != word.map_arity)
    throw std::invalid_argument("eval_form: wrong number of chart arguments");
  for (const Chart* c : args.maps)
    if (c == nullptr || c->dim != args.maps[0]->dim)
      throw std::invalid_argument("eval_form: charts must share one box");

  PointSlots out;
  const int dim = args.maps[0]->dim;
  auto left_log = [&](const Chart& c) {
    Matrix g = c.eval(u);
    Matrix ginv = g.inverse();
    std::vector<Matrix> coeffs = partials(c, u);
    for (auto& m : coeffs) m = ginv * m;
    return coeffs;
  };

  switch (word.kind) {
    case WordKind::tr_x_dy: {
      out.prefactor = args.maps[0]->eval(u);
      out.slot_coeffs.push_back(partials(*args.maps[1], u));
      break;
    }
    case WordKind::tr_left_right: {
      out.slot_coeffs.push_back(left_log(*args.maps[0]));
      Matrix gp = args.maps[1]->eval(u);
      Matrix gpinv = gp.inverse();
      std::vector<Matrix> right = partials(*args.maps[1], u);
      for (auto& m : right) m = m * gpinv;
      out.slot_coeffs.push_back(std::move(right));
      break;
    }
    case WordKind::tr_mc_cubed:
    case WordKind::tr_mc_fifth: {
      std::vector<Matrix> mc = left_log(*args.maps[0]);
      for (int s = 0; s < word.degree; ++s) out.slot_coeffs.push_back(mc);
      break;
    }
    case WordKind::tr_a_dxdy_comm: {
      if (args.one_form == nullptr)
        throw std::invalid_argument("eval_form: word needs a 1-form argument");
      out.slot_coeffs.push_back(args.one_form->components(u));
      if (static_cast<int>(out.slot_coeffs[0].size()) != dim)
        throw std::invalid_argument("eval_form: 1-form has wrong number of components");
      out.slot_coeffs.push_back(partials(*args.maps[0], u));  // dX
      out.slot_coeffs.push_back(partials(*args.maps[1], u));  // dY
      break;
    }
  }
  return out;
}

Complex eval_on_tangents(const FormWord& word, const PointSlots& point,
                         const std::vector<Vector>& tangents) {
  // Contract each slot's axis coefficients with each tangent.
  const int k = word.degree;
  auto contract = [&](const std::vector<Matrix>& coeffs, const Vector& t) {
    Matrix m = Matrix::Zero(coeffs[0].rows(), coeffs[0].cols());
    for (std::size_t i = 0; i < coeffs.size(); ++i) m += t[static_cast<int>(i)] * coeffs[i];
    return m;
  };

  if (word.kind == WordKind::tr_x_dy)
    return (point.prefactor * contract(point.slot_coeffs[0], tangents[0])).trace();

  std::vector<std::vector<Matrix>> slots(point.slot_coeffs.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    slots[s].reserve(k);
    for (int t = 0; t < k; ++t) slots[s].push_back(contract(point.slot_coeffs[s], tangents[t]));
  }
  if (word.kind == WordKind::tr_a_dxdy_comm) {
    // tr(A ^ dX ^ dY) - tr(A ^ dY ^ dX)
    Complex direct = wedge_trace(slots);
    std::swap(slots[1], slots[2]);
    return direct - wedge_trace(slots);
  }
  return wedge_trace(slots);
}

Complex integrate_once(const FormWord& word, const FormArgs& args,
                       const QuadratureSpec& quad) {
  const Chart& base = *args.maps[0];
  std::vector<Rule1D> rules;
  rules.reserve(base.dim);
  std::size_t total = 1;
  for (int i = 0; i < base.dim; ++i) {
    rules.push_back(axis_rule(quad, base.box[i].first, base.box[i].second));
    total *= rules[i].nodes.size();
  }
  std::vector<Vector> coord_tangents(base.dim, Vector::Zero(base.dim));
  for (int i = 0; i < base.dim; ++i) coord_tangents[i][i] = 1.0;

  std::vector<Complex> values(total);
  parallel_for(total, [&](std::size_t flat) {
    Vector u(base.dim);
    double weight = 1.0;
    std::size_t rem = flat;
    for (int i = base.dim - 1; i >= 0; --i) {
      const std::size_t n = rules[i].nodes.size();
      const std::size_t idx = rem % n;
      rem /= n;
      u[i] = rules[i].nodes[idx];
      weight *= rules[i].weights[idx];
    }
    PointSlots point = compile_point(word, args, u);
    values[flat] = weight * eval_on_tangents(word, point, coord_tangents);
  });
  return pairwise_sum(std::span<const Complex>(values));
}

}  // namespace

Complex eval_form(const FormWord& word, const FormArgs& args, const Vector& u,
                  const std::vector<Vector>& tangents) {
  if (static_cast<int>(tangents.size()) != word.degree)
    throw std::invalid_argument("eval_form: tangent count must equal the degree");
  for (const auto& t : tangents)
    if (t.size() != args.maps[0]->dim)
      throw std::invalid_argument("eval_form: tangent dimension mismatch");
  PointSlots point = compile_point(word, args, u);
  return eval_on_tangents(word, point, tangents);
}

FormIntegral integrate_form(const FormWord& word, const FormArgs& args,
                            const QuadratureSpec& quad) {
  if (args.maps.empty() || args.maps[0] == nullptr)
    throw std::invalid_argument("integrate_form: missing chart");
  if (word.degree != args.maps[0]->dim)
    throw std::invalid_argument("integrate_form: form degree must equal chart dimension");

  Complex fine = integrate_once(word, args, quad);
  QuadratureSpec coarse = quad;
  coarse.nodes_per_axis = std::max(2, quad.nodes_per_axis / 2);
  Complex rough = integrate_once(word, args, coarse);
  double estimate = std::max(std::abs(fine - rough), 1e-13 * (1.0 + std::abs(fine)));
  return {fine, estimate};
}

FormIntegral integrate_scalar(const std::function<Complex(const Vector&)>& f,
                              const std::vector<std::pair<double, double>>& box,
                              const QuadratureSpec& quad) {
  const int dim = static_cast<int>(box.size());
  auto run = [&](const QuadratureSpec& q) {
    std::vector<Rule1D> rules;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) {
      rules.push_back(axis_rule(q, box[i].first, box[i].second));
      total *= rules[i].nodes.size();
    }
    std::vector<Complex> values(total);
    parallel_for(total, [&](std::size_t flat) {
      Vector u(dim);
      double weight = 1.0;
      std::size_t rem = flat;
      for (int i = dim - 1; i >= 0; --i) {
        const std::size_t n = rules[i].nodes.size();
        const std::size_t idx = rem % n;
        rem /= n;
        u[i] = rules[i].nodes[idx];
        weight *= rules[i].weights[idx];
      }
      values[flat] = weight * f(u);
    });
    return pairwise_sum(std::span<const Complex>(values));
  };
  Complex fine = run(quad);
  QuadratureSpec coarse = quad;
  coarse.nodes_per_axis = std::max(2, quad.nodes_per_axis / 2);
  Complex rough = run(coarse);
  double estimate = std::max(std::abs(fine - rough), 1e-13 * (1.0 + std::abs(fine)));
  return {fine, estimate};
}

Chart su2_hyperspherical(bool analytic) {
  Chart chart;
  chart.dim = 3;
  chart.box = {{0.0, kPi}, {0.0, kPi}, {0.0, kTwoPi}};
  chart.eval = [](const Vector& u) {
    const double psi = u[0], th = u[1], ph = u[2];
    const double x0 = std::cos(psi);
    const double x1 = std::sin(psi) * std::cos(th);
    const double x2 = std::sin(psi) * std::sin(th) * std::cos(ph);
    const double x3 = std::sin(psi) * std::sin(th) * std::sin(ph);
    Matrix g(2, 2);
    const Complex i(0, 1);
    g << x0 + i * x3, x2 + i * x1, -x2 + i * x1, x0 - i * x3;
    return g;
  };
  if (analytic) {
    chart.analytic_partials = [](const Vector& u) {
      const double psi = u[0], th = u[1], ph = u[2];
      const Complex i(0, 1);
      auto assemble = [&i](double d0, double d1, double d2, double d3) {
        Matrix m(2, 2);
        m << d0 + i * d3, d2 + i * d1, -d2 + i * d1, d0 - i * d3;
        return m;
      };
      std::vector<Matrix> out;
      out.push_back(assemble(-std::sin(psi), std::cos(psi) * std::cos(th),
                             std::cos(psi) * std::sin(th) * std::cos(ph),
                             std::cos(psi) * std::sin(th) * std::sin(ph)));
      out.push_back(assemble(0.0, -std::sin(psi) * std::sin(th),
                             std::sin(psi) * std::cos(th) * std::cos(ph),
                             std::sin(psi) * std::cos(th) * std::sin(ph)));
      out.push_back(assemble(0.0, 0.0, -std::sin(psi) * std::sin(th) * std::sin(ph),
                             std::sin(psi) * std::sin(th) * std::cos(ph)));
      return out;
    };
  }
  return chart;
}

Chart constant_chart(const Matrix& value, int dim,
                     std::vector<std::pair<double, double>> box) {
  Chart chart;
  chart.dim = dim;
  chart.box = std::move(box);
  chart.eval = [value](const Vector&) { return value; };
  chart.analytic_partials = [value, dim](const Vector&) {
    return std::vector<Matrix>(dim, Matrix::Zero(value.rows(), value.cols()));
  };
  return chart;
}

Chart circle_fourier(const std::map<int, Matrix>& coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("circle_fourier: no coefficients");
  const auto rows = coeffs.begin()->second.rows();
  const auto cols = coeffs.begin()->second.cols();
  Chart chart;
  chart.dim = 1;
  chart.box = {{0.0, kTwoPi}};
  chart.eval = [coeffs, rows, cols](const Vector& u) {
    Matrix sum = Matrix::Zero(rows, cols);
    for (const auto& [m, a] : coeffs) sum += a * std::polar(1.0, m * u[0]);
    return sum;
  };
  chart.analytic_partials = [coeffs, rows, cols](const Vector& u) {
    Matrix sum = Matrix::Zero(rows, cols);
    for (const auto& [m, a] : coeffs)
      sum += Complex(0, m) * a * std::polar(1.0, m * u[0]);
    return std::vector<Matrix>{sum};
  };
  return chart;
}

}  // namespace gerbelab::geometry
