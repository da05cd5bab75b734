#include "gerbelab/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace gerbelab::lie {

namespace {

/// Fixes the free phase of an eigenvector column: the largest-modulus
/// component is made real and positive (ties broken by lowest index).
void normalize_column_phase(Eigen::Ref<CVector> col) {
  int best = 0;
  double best_mod = 0.0;
  for (int i = 0; i < col.size(); ++i) {
    double m = std::abs(col[i]);
    if (m > best_mod + 1e-14) {
      best_mod = m;
      best = i;
    }
  }
  if (best_mod == 0.0) return;
  Complex ph = col[best] / best_mod;
  col *= std::conj(ph);
}

}  // namespace

UnitCircleSpectrum eig_unitary(const Matrix& g, double cluster_width) {
  if (g.rows() != g.cols()) throw std::invalid_argument("eig_unitary: matrix not square");
  if (!is_unitary(g, 1e-8)) throw std::invalid_argument("eig_unitary: matrix not unitary");
  const int n = static_cast<int>(g.rows());

  Eigen::ComplexEigenSolver<Matrix> solver(g, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_unitary: eigensolver failed");

  std::vector<double> raw_phase(n);
  for (int k = 0; k < n; ++k)
    raw_phase[k] = wrap_angle(std::arg(solver.eigenvalues()[k]));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw_phase[a] != raw_phase[b]) return raw_phase[a] < raw_phase[b];
    return a < b;
  });

  // Group sorted phases into clusters of circular width < cluster_width;
  // the comparison wraps around 0 == 2*pi.
  std::vector<std::vector<int>> clusters;
  for (int idx : order) {
    if (!clusters.empty()) {
      double prev = raw_phase[clusters.back().back()];
      double d = std::min(std::abs(raw_phase[idx] - prev),
                          kTwoPi - std::abs(raw_phase[idx] - prev));
      if (d < cluster_width) {
        clusters.back().push_back(idx);
        continue;
      }
    }
    clusters.push_back({idx});
  }
  // Merge a cluster that wraps past 2*pi back into the first one.
  if (clusters.size() > 1) {
    double lo = raw_phase[clusters.front().front()];
    double hi = raw_phase[clusters.back().back()];
    if (kTwoPi - hi + lo < cluster_width) {
      auto& first = clusters.front();
      first.insert(first.begin(), clusters.back().begin(), clusters.back().end());
      clusters.pop_back();
    }
  }

  UnitCircleSpectrum out;
  out.phases.reserve(n);
  out.frames.resize(n, n);
  int col = 0;
  for (const auto& cluster : clusters) {
    const int m = static_cast<int>(cluster.size());
    // Representative phase: mean over the cluster, wrap-aware via the
    // phase of the summed eigenvalues.
    Complex accum = 0;
    for (int idx : cluster) accum += solver.eigenvalues()[idx] / std::abs(solver.eigenvalues()[idx]);
    double phase = wrap_angle(std::arg(accum));

    Matrix block(n, m);
    for (int j = 0; j < m; ++j) block.col(j) = solver.eigenvectors().col(cluster[j]);
    // Orthonormalize the (possibly ill-conditioned) degenerate block.
    Eigen::HouseholderQR<Matrix> qr(block);
    Matrix q = qr.householderQ() * Matrix::Identity(n, m);
    // Make the map deterministic: flip each column so that its overlap
    // with the corresponding raw column has positive real part, then
    // apply the phase convention.
    for (int j = 0; j < m; ++j) {
      Complex overlap = (q.col(j).adjoint() * block.col(j))(0, 0);
      if (std::abs(overlap) > 1e-14) q.col(j) *= overlap / std::abs(overlap);
      normalize_column_phase(q.col(j));
    }
    for (int j = 0; j < m; ++j) {
      out.phases.push_back(phase);
      out.frames.col(col++) = q.col(j);
    }
  }

  // Final sort: clusters were assembled in ascending order except for a
  // possible wrap merge, so re-sort columns by phase, stably.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return out.phases[a] < out.phases[b];
  });
  UnitCircleSpectrum sorted;
  sorted.phases.resize(n);
  sorted.frames.resize(n, n);
  for (int k = 0; k < n; ++k) {
    sorted.phases[k] = out.phases[perm[k]];
    sorted.frames.col(k) = out.frames.col(perm[k]);
  }

  // Reconstruction check guards against solver defectiveness.
  Matrix lam = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    lam(k, k) = std::polar(1.0, sorted.phases[k]);
  double resid = (g - sorted.frames * lam * sorted.frames.adjoint()).norm();
  if (resid > 1e-8 * std::max(1.0, g.norm()))
    throw std::runtime_error("eig_unitary: reconstruction residual too large");
  return sorted;
}

Matrix log_branch(const Matrix& g, Complex lambda, double guard) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-10)
    throw std::invalid_argument("log_branch: branch point off the unit circle");
  // The arc is (arg(lambda) - 2*pi, arg(lambda)) with the principal
  // argument, so e.g. lambda = -1 puts the spectrum of -iX in (-pi, pi).
  const double cut = std::arg(lambda);
  UnitCircleSpectrum es = eig_unitary(g);
  const int n = static_cast<int>(es.phases.size());
  Matrix d = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    // Distance from the eigenphase to the cut, on the circle.
    double delta = std::fmod(es.phases[k] - cut, kTwoPi);
    if (delta < 0) delta += kTwoPi;
    if (delta < guard || kTwoPi - delta < guard)
      throw branch_error("log_branch: eigenvalue at the branch point");
    // theta in (cut - 2*pi, cut): the open arc just below the cut.
    double theta = cut - kTwoPi + delta;
    d(k, k) = Complex(0.0, theta);
  }
  Matrix x = es.frames * d * es.frames.adjoint();
  // Enforce exact skew-hermiticity (the construction is skew up to
  // roundoff already).
  return 0.5 * (x - x.adjoint().eval());
}

Matrix exp_skew(const Matrix& x) {
  if (!is_skew_hermitian(x, 1e-8))
    throw std::invalid_argument("exp_skew: matrix not skew-hermitian");
  // i*X is hermitian; use the self-adjoint solver for stability.
  Matrix h = Complex(0, -1) * x;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("exp_skew: eigensolver failed");
  const int n = static_cast<int>(x.rows());
  Matrix d = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = std::polar(1.0, solver.eigenvalues()[k]);
  return solver.eigenvectors() * d * solver.eigenvectors().adjoint();
}

bool is_unitary(const Matrix& g, double tol) {
  if (g.rows() != g.cols()) return false;
  Matrix delta = g.adjoint() * g - Matrix::Identity(g.rows(), g.cols());
  return delta.norm() <= tol * std::max<double>(1.0, g.rows());
}

bool is_skew_hermitian(const Matrix& x, double tol) {
  if (x.rows() != x.cols()) return false;
  return (x + x.adjoint()).norm() <= tol * std::max(1.0, x.norm());
}

Matrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the diagonal phases so the distribution is Haar.
  for (int k = 0; k < n; ++k) {
    Complex rkk = r(k, k);
    if (std::abs(rkk) > 0) q.col(k) *= rkk / std::abs(rkk);
  }
  return q;
}

Matrix random_special_unitary(int n, std::mt19937_64& rng) {
  Matrix u = random_unitary(n, rng);
  Complex det = u.determinant();
  // Divide one nth root of the determinant into every column.
  Complex root = std::polar(1.0, std::arg(det) / n);
  return u / root;
}

Matrix random_skew_hermitian(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  return 0.5 * (a - a.adjoint().eval());
}

Matrix pauli(int k) {
  Matrix s(2, 2);
  switch (k) {
    case 1:
      s << 0, 1, 1, 0;
      break;
    case 2:
      s << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case 3:
      s << 1, 0, 0, -1;
      break;
    default:
      throw std::invalid_argument("pauli: index must be 1, 2 or 3");
  }
  return s;
}

}  // namespace gerbelab::lie
