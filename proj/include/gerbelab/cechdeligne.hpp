#pragma once

#include "gerbelab/numeric.hpp"

#include <random>

namespace gerbelab::cechdeligne {

/// Finite open cover of a parameter box, given by membership
/// predicates plus a rejection sampler for tuple overlaps.
struct Cover {
  std::vector<std::pair<double, double>> box;
  std::vector<std::function<bool(const Vector&)>> members;

  int size() const { return static_cast<int>(members.size()); }
  bool in_overlap(const std::vector<int>& indices, const Vector& u) const;

  /// Uniform rejection sampling of a point lying in every listed set.
  /// Samples keep a small margin to the box edge so finite differences
  /// stay inside.  Throws sampler_error after max_tries failures.
  Vector sample_overlap(const std::vector<int>& indices, std::mt19937_64& rng,
                        int max_tries = 20000) const;
};

/// Circle-valued Cech p-cochain: raw evaluator on strictly increasing
/// index tuples of length p+1; other orderings extend multiplicatively
/// (odd permutations invert).
struct CircleCochain {
  int level = 0;
  std::function<Complex(const std::vector<int>&, const Vector&)> raw;

  Complex eval(std::vector<int> indices, const Vector& u) const;
};

/// Additive form-valued p-cochain.  The value at a point is the
/// component list of a degree-d form: d = 0 one entry, d = 1 one entry
/// per axis, d = 2 entries (i, j) with i < j in lexicographic order.
struct FormCochain {
  int level = 0;
  int form_degree = 0;
  std::function<std::vector<Complex>(const std::vector<int>&, const Vector&)> raw;

  std::vector<Complex> eval(std::vector<int> indices, const Vector& u) const;
};

/// Cech coboundary (multiplicative for circle cochains, additive for
/// form cochains).
CircleCochain coboundary(const CircleCochain& h);
FormCochain coboundary(const FormCochain& h);

/// Max of |f_abc f_abd^-1 f_acd f_bcd^-1 - 1| over sampled points of
/// sampled quadruple overlaps.
double check_cocycle(const CircleCochain& f, const Cover& cover, int samples,
                     std::mt19937_64& rng);

struct BocksteinResult {
  double value;    // (log f_abc - log f_abd + log f_acd - log f_bcd) / (2 pi i)
  long integer;    // nearest integer
  double defect;   // |value - integer|
};

/// Eq.-(5)-style integer extraction with the principal log branch (cut
/// along the negative real axis).  Values within 1e-8 of the cut raise
/// branch_error; callers should pick a different sample point.
BocksteinResult bockstein(const CircleCochain& f, const std::vector<int>& indices,
                          const Vector& u);

/// Gerbe Deligne data on a cover: triple-overlap circle functions,
/// pair 1-forms, per-chart 2-forms and a global 3-form.
struct DeligneData {
  const Cover* cover = nullptr;
  CircleCochain f;   // level 2
  FormCochain a;     // level 1, degree 1
  FormCochain curv;  // level 0, degree 2 (the F_alpha)
  std::function<std::vector<Complex>(const Vector&)> omega;  // 3-form components, i<j<k
};

/// Max residuals of the three relations, in the order
///   curvature:  dF_a - 2 pi i Omega
///   transition: (F_a - F_b) - dA_ab
///   cocycle:    (A_ab - A_ag + A_bg) - f^-1 df
/// evaluated at sampled points of the required overlaps; numerical d
/// via central differences of step fd_step.
struct DeligneResiduals {
  double curvature;
  double transition;
  double cocycle;
};

DeligneResiduals verify_deligne(const DeligneData& data, int samples,
                                std::mt19937_64& rng, double fd_step = 1e-5);

/// Charge-k monopole line bundle on the two-chart S^2 cover
/// (theta, phi) in [0, pi] x [0, 2 pi]: north/south potentials and the
/// equatorial transition function exp(i k phi).
struct MonopoleData {
  int k = 0;
  std::vector<std::pair<double, double>> box;  // the (theta, phi) chart
  // 1-form components (d theta, d phi) of the two potentials
  std::function<std::vector<Complex>(const Vector&)> a_north;
  std::function<std::vector<Complex>(const Vector&)> a_south;
  std::function<Complex(const Vector&)> f_ns;

  /// |(A_N - A_S) - f^-1 df| at a point of the overlap, max over the
  /// sampled equatorial band.
  double relation_residual(int samples, std::mt19937_64& rng, double fd_step = 1e-5) const;
  /// (1/2 pi i) of the equatorial integral of A_N - A_S; equals k.
  double equator_integral(int nodes = 64) const;
};

MonopoleData monopole_demo(int k);

/// The monopole data repackaged one degree up as (vacuous-f, A_ab,
/// F_a, Omega = 0) gerbe data on the two-chart cover, for
/// verify_deligne.
DeligneData monopole_as_deligne(const MonopoleData& monopole, const Cover& cover);

/// Two-chart cover of the (theta, phi) box with an equatorial band
/// overlap.
Cover sphere_two_chart_cover();

/// Four overlapping slabs covering the box [0,1]^3; every tuple
/// overlap (up to the full quadruple) is nonempty.
Cover box_four_chart_cover();

/// Random Deligne data on a 3d-box cover, built from polynomial
/// potentials so that all three relations of verify_deligne hold
/// exactly in exact arithmetic (numerically: to the accuracy of the
/// finite-difference d).
DeligneData synthetic_deligne(const Cover& cover, std::mt19937_64& rng);

}  // namespace gerbelab::cechdeligne
