#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gerbelab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Thrown when an operation's numerical resolution is insufficient
/// (e.g. a spectral-flow path sampled too coarsely).
struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a value sits too close to a logarithm branch cut or
/// a requested branch point lies in the spectrum.
struct branch_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when an overlap sampler cannot produce a point.
struct sampler_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic pairwise reduction; result is independent of how the
/// values were produced (serial or parallel) at fixed input order.
Complex pairwise_sum(std::span<const Complex> values);
double pairwise_sum(std::span<const double> values);

/// Thread cap: GERBELAB_THREADS if set, else hardware concurrency.
int thread_cap();

/// Runs body(i) for i in [0, n). Chunked over threads; every index is
/// written independently so outputs do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Distance between two reals on the circle R/Z.
inline double circle_distance_mod1(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0) w += kTwoPi;
  // fmod can return exactly 2*pi after the correction when phi is a
  // tiny negative number
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

inline double distance_to_nearest_integer(double x) {
  return std::abs(x - std::round(x));
}

}  // namespace gerbelab
