#pragma once

#include "gerbelab/numeric.hpp"

#include <map>
#include <utility>

namespace gerbelab::geometry {

/// Thrown when a chart cannot be evaluated or differentiated where asked.
struct chart_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix-valued map on a closed box in R^dim.  Doubles as a "group
/// chart" (g: box -> U(N)) and as a plain matrix field (X: box ->
/// gl(N)); the form evaluator does not care which.
struct Chart {
  int dim = 0;
  std::vector<std::pair<double, double>> box;  // per-axis [lo, hi]
  std::function<Matrix(const Vector&)> eval;
  /// Optional analytic derivative rule; when absent, central
  /// differences of step fd_step are used (one-sided at the box edge).
  std::function<std::vector<Matrix>(const Vector&)> analytic_partials;
  double fd_step = 1e-5;

  bool contains(const Vector& u, double tol = 1e-12) const;
};

/// d(eval)/du_i for each axis, analytic or finite-difference.
std::vector<Matrix> partials(const Chart& chart, const Vector& u);

enum class QuadRule { gauss_legendre, trapezoid_periodic };

struct QuadratureSpec {
  QuadRule rule = QuadRule::gauss_legendre;
  int nodes_per_axis = 8;
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
Rule1D gauss_legendre(int n);

/// The 1D rule mapped to [lo, hi].  trapezoid_periodic places n equal
/// nodes starting at lo and omits the duplicate endpoint.
Rule1D axis_rule(const QuadratureSpec& quad, double lo, double hi);

/// The closed set of integrand words used here:
///   tr_x_dy        tr(X dY)                          degree 1, maps {X, Y}
///   tr_left_right  tr(g^-1 dg ^ dg' g'^-1)           degree 2, maps {g, g'}
///   tr_mc_cubed    tr((g^-1 dg)^3)                   degree 3, maps {g}
///   tr_a_dxdy_comm tr(A ^ (dX^dY - dY^dX))           degree 3, maps {X, Y} + 1-form A
///   tr_mc_fifth    tr((g^-1 dg)^5)                   degree 5, maps {g}
enum class WordKind {
  tr_x_dy,
  tr_left_right,
  tr_mc_cubed,
  tr_a_dxdy_comm,
  tr_mc_fifth,
};

struct FormWord {
  WordKind kind;
  int degree;
  int map_arity;
};

FormWord make_word(WordKind kind);

/// Matrix-valued 1-form given by per-axis coefficient matrices.
struct OneFormField {
  std::function<std::vector<Matrix>(const Vector&)> components;
};

/// The map/field arguments a word consumes.  All charts must share one
/// box; maps[0] provides it.
struct FormArgs {
  std::vector<const Chart*> maps;
  const OneFormField* one_form = nullptr;
};

/// Value of the word's alternating form at u on the given tangent
/// vectors (determinant convention: sum over all k! permutations with
/// signs, no 1/k! factor).
Complex eval_form(const FormWord& word, const FormArgs& args, const Vector& u,
                  const std::vector<Vector>& tangents);

struct FormIntegral {
  Complex value;
  double error_estimate;  // |value - coarser-rule value|, floored
};

/// Pullback integral of the word over the box of args.maps[0], with
/// orientation given by the axis order.  Degree must equal the chart
/// dimension.
FormIntegral integrate_form(const FormWord& word, const FormArgs& args,
                            const QuadratureSpec& quad);

/// Plain tensor-product quadrature of a scalar function over a box.
FormIntegral integrate_scalar(const std::function<Complex(const Vector&)>& f,
                              const std::vector<std::pair<double, double>>& box,
                              const QuadratureSpec& quad);

// ---- chart factories -------------------------------------------------------

/// SU(2) as the unit S^3 in hyperspherical angles (psi, theta, phi) in
/// [0,pi] x [0,pi] x [0,2pi]; g = x0 + i(x1 s1 + x2 s2 + x3 s3).
Chart su2_hyperspherical(bool analytic = true);

Chart constant_chart(const Matrix& value, int dim,
                     std::vector<std::pair<double, double>> box);

/// Trigonometric loop theta |-> sum_m coeffs[m] e^{i m theta} on
/// [0, 2pi], with analytic derivative.
Chart circle_fourier(const std::map<int, Matrix>& coeffs);

}  // namespace gerbelab::geometry
