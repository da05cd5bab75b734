#include "gerbelab/dirac.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace gerbelab::dirac {

void CoverSpec::validate() const {
  if (size() < 4) throw std::invalid_argument("CoverSpec: need at least 4 levels");
  for (int j = 0; j < size(); ++j) {
    if (levels[j] < 0.0 || levels[j] >= kTwoPi)
      throw std::invalid_argument("CoverSpec: levels must lie in [0, 2 pi)");
    if (j > 0 && levels[j] <= levels[j - 1])
      throw std::invalid_argument("CoverSpec: levels must increase strictly");
  }
  double total = 0;
  for (double mu : levels) total += mu;
  // product of the exp(i mu_j) must not be 1, i.e. the angle sum must
  // avoid 2 pi Z
  if (distance_to_nearest_integer(total / kTwoPi) < 1e-12)
    throw std::invalid_argument("CoverSpec: product of circle points equals 1");
}

CoverSpec CoverSpec::uniform(int m) {
  CoverSpec cover;
  cover.levels.resize(m);
  for (int j = 0; j < m; ++j) cover.levels[j] = (j + 0.3) * kTwoPi / m;
  // angle sum = 2 pi (m-1)/2 + 0.3 * 2 pi; adjust the offset if that
  // happens to be an integer multiple of 2 pi
  double total = 0;
  for (double mu : cover.levels) total += mu;
  if (distance_to_nearest_integer(total / kTwoPi) < 1e-6)
    for (double& mu : cover.levels) mu += 0.05 * kTwoPi / m;
  cover.validate();
  return cover;
}

std::vector<double> level_fractions(const HolonomyPoint& point) {
  auto es = lie::eig_unitary(point.g);
  std::vector<double> fracs(es.phases.size());
  for (std::size_t k = 0; k < es.phases.size(); ++k) fracs[k] = es.phases[k] / kTwoPi;
  std::sort(fracs.begin(), fracs.end());
  return fracs;
}

std::vector<double> spectrum(const HolonomyPoint& point, const SpectralWindow& window) {
  if (!(window.lo < window.hi))
    throw std::invalid_argument("spectrum: window must satisfy lo < hi");
  std::vector<double> out;
  for (double frac : level_fractions(point)) {
    // n + frac in [lo, hi]  <=>  n in [lo - frac, hi - frac]
    int n_lo = static_cast<int>(std::ceil(window.lo - frac));
    int n_hi = static_cast<int>(std::floor(window.hi - frac));
    for (int n = n_lo; n <= n_hi; ++n) out.push_back(n + frac);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double spectral_gap(const HolonomyPoint& point, double dirac_level) {
  double best = 0.5;
  for (double frac : level_fractions(point))
    best = std::min(best, circle_distance_mod1(dirac_level, frac));
  return best;
}

bool in_cover(const HolonomyPoint& point, int j, const CoverSpec& cover) {
  if (j < 0 || j >= cover.size()) throw std::out_of_range("in_cover: bad cover index");
  return spectral_gap(point, cover.dirac_level(j)) > kGapTolerance;
}

namespace {

/// Deterministic pivot-minor phase of a frame: greedily pick, per
/// column, the largest-modulus unused row of the stacked embedding and
/// take the phase of the resulting minor determinant.  A diagnostic
/// only; it never feeds back into other results.
Complex pivot_minor_phase(const std::vector<int>& modes, const Matrix& vectors) {
  const int rank = static_cast<int>(modes.size());
  if (rank == 0) return Complex(1, 0);
  const int n = static_cast<int>(vectors.rows());
  // stack rows as (mode, internal index) pairs present in the frame
  std::map<int, int> mode_rows;
  for (int mode : modes)
    if (!mode_rows.count(mode)) {
      int base = static_cast<int>(mode_rows.size()) * n;
      mode_rows[mode] = base;
    }
  Matrix stacked = Matrix::Zero(static_cast<int>(mode_rows.size()) * n, rank);
  for (int c = 0; c < rank; ++c)
    stacked.block(mode_rows[modes[c]], c, n, 1) = vectors.col(c);

  std::vector<int> pivots;
  std::vector<bool> used(stacked.rows(), false);
  for (int c = 0; c < rank; ++c) {
    int best = -1;
    double best_mod = -1;
    for (int r = 0; r < stacked.rows(); ++r) {
      if (used[r]) continue;
      double m = std::abs(stacked(r, c));
      if (m > best_mod + 1e-15) {
        best_mod = m;
        best = r;
      }
    }
    used[best] = true;
    pivots.push_back(best);
  }
  std::sort(pivots.begin(), pivots.end());
  Matrix minor(rank, rank);
  for (int r = 0; r < rank; ++r) minor.row(r) = stacked.row(pivots[r]);
  Complex det = minor.determinant();
  return std::abs(det) > 0 ? det / std::abs(det) : Complex(1, 0);
}

}  // namespace

WindowFrame window_frame(const HolonomyPoint& point, const SpectralWindow& window) {
  if (!(window.lo < window.hi))
    throw std::invalid_argument("window_frame: window must satisfy lo < hi");
  for (double end : {window.lo, window.hi})
    if (spectral_gap(point, end) <= kGapTolerance)
      throw window_error("window_frame: window endpoint lies on the spectrum");

  auto es = lie::eig_unitary(point.g);
  const int n = static_cast<int>(es.phases.size());
  // collect (eigenvalue, eig-column, fourier mode), then sort by value;
  // ties cannot occur across distinct fractions, and equal fractions
  // inherit the deterministic eig_unitary column order
  struct Entry {
    double value;
    int column;
    int mode;
  };
  std::vector<Entry> entries;
  for (int k = 0; k < n; ++k) {
    double frac = es.phases[k] / kTwoPi;
    int n_lo = static_cast<int>(std::ceil(window.lo - frac));
    int n_hi = static_cast<int>(std::floor(window.hi - frac));
    for (int m = n_lo; m <= n_hi; ++m) entries.push_back({m + frac, k, m});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.value < b.value; });

  WindowFrame frame;
  frame.vectors.resize(n, static_cast<int>(entries.size()));
  for (std::size_t c = 0; c < entries.size(); ++c) {
    frame.eigenvalues.push_back(entries[c].value);
    frame.fourier_modes.push_back(entries[c].mode);
    frame.vectors.col(static_cast<int>(c)) = es.frames.col(entries[c].column);
  }
  frame.det_line_phase = pivot_minor_phase(frame.fourier_modes, frame.vectors);
  return frame;
}

namespace {

/// Embeds frame columns of several windows over a common Fourier-mode
/// range and returns the dense column block.
Matrix embed_columns(const std::vector<const WindowFrame*>& frames,
                     const std::map<int, int>& mode_rows, int n) {
  int total = 0;
  for (const auto* f : frames) total += f->rank();
  Matrix out = Matrix::Zero(static_cast<int>(mode_rows.size()) * n, total);
  int col = 0;
  for (const auto* f : frames)
    for (int c = 0; c < f->rank(); ++c, ++col)
      out.block(mode_rows.at(f->fourier_modes[c]) * n, col, n, 1) = f->vectors.col(c);
  return out;
}

}  // namespace

Complex gerbe_cocycle(const HolonomyPoint& point, double mu_j, double mu_k, double mu_l) {
  std::array<double, 3> mus = {mu_j, mu_k, mu_l};
  for (double mu : mus)
    if (mu < 0.0 || mu >= kTwoPi)
      throw std::invalid_argument("gerbe_cocycle: cover levels are angles in [0, 2 pi)");
  if (mus[0] == mus[1] || mus[1] == mus[2] || mus[0] == mus[2])
    throw std::invalid_argument("gerbe_cocycle: levels must be distinct");

  // sort to a < b < c, remembering the permutation parity
  std::array<double, 3> sorted = mus;
  int sign = 1;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2 - i; ++j)
      if (sorted[j] > sorted[j + 1]) {
        std::swap(sorted[j], sorted[j + 1]);
        sign = -sign;
      }
  const double a = sorted[0] / kTwoPi, b = sorted[1] / kTwoPi, c = sorted[2] / kTwoPi;

  WindowFrame f_ab = window_frame(point, {a, b});
  WindowFrame f_bc = window_frame(point, {b, c});
  WindowFrame f_ac = window_frame(point, {a, c});
  if (f_ac.rank() != f_ab.rank() + f_bc.rank())
    throw std::logic_error("gerbe_cocycle: window rank additivity violated");

  Complex f(1, 0);
  if (f_ac.rank() > 0) {
    const int n = static_cast<int>(point.g.rows());
    std::map<int, int> mode_rows;
    for (const auto* fr : {&f_ab, &f_bc, &f_ac})
      for (int mode : fr->fourier_modes)
        if (!mode_rows.count(mode)) {
          int next = static_cast<int>(mode_rows.size());
          mode_rows[mode] = next;
        }
    Matrix split = embed_columns({&f_ab, &f_bc}, mode_rows, n);
    Matrix whole = embed_columns({&f_ac}, mode_rows, n);
    f = (whole.adjoint() * split).determinant();
  }
  if (std::abs(std::abs(f) - 1.0) > 1e-10)
    throw std::logic_error("gerbe_cocycle: comparison scalar is not unimodular");
  return sign > 0 ? f : Complex(1, 0) / f;
}

FlowResult spectral_flow_tracks(const std::vector<HolonomyPoint>& path, double mu) {
  if (path.size() < 2)
    throw std::invalid_argument("spectral_flow: need at least two samples");
  const int n = static_cast<int>(path.front().g.rows());
  for (const auto& p : path)
    if (static_cast<int>(p.g.rows()) != n)
      throw std::invalid_argument("spectral_flow: inconsistent dimensions along path");
  for (const auto* end : {&path.front(), &path.back()})
    if (spectral_gap(*end, mu) <= kGapTolerance)
      throw window_error("spectral_flow: level lies on the spectrum at a path endpoint");

  FlowResult result;
  result.tracks.assign(n, {});
  std::vector<double> lifts = level_fractions(path.front());
  for (int k = 0; k < n; ++k) result.tracks[k].push_back(lifts[k]);

  for (std::size_t s = 1; s < path.size(); ++s) {
    // current fractions in circularly sorted order, remembering which
    // track owns each slot
    std::vector<int> owner(n);
    std::iota(owner.begin(), owner.end(), 0);
    std::vector<double> frac(n);
    for (int k = 0; k < n; ++k) frac[k] = lifts[k] - std::floor(lifts[k]);
    std::stable_sort(owner.begin(), owner.end(),
                     [&](int x, int y) { return frac[x] < frac[y]; });
    std::vector<double> a(n);
    for (int p = 0; p < n; ++p) a[p] = frac[owner[p]];

    std::vector<double> b = level_fractions(path[s]);
    // Order-preserving circular matchings are the n rotations, each up
    // to a global integer lift; pick the one with the smallest
    // worst-case motion.
    double best_cost = 1e300;
    int best_rot = 0, best_shift = 0;
    for (int rot = 0; rot < n; ++rot) {
      for (int shift = -2; shift <= 2; ++shift) {
        double cost = 0;
        for (int p = 0; p < n; ++p) {
          double lifted = b[(p + rot) % n] + shift + (p + rot >= n ? 1 : 0);
          cost = std::max(cost, std::abs(lifted - a[p]));
        }
        if (cost < best_cost - 1e-15) {
          best_cost = cost;
          best_rot = rot;
          best_shift = shift;
        }
      }
    }
    if (best_cost >= 0.25)
      throw resolution_error(
          "spectral_flow: eigenvalues moved by >= 1/4 between samples; refine the path");
    for (int p = 0; p < n; ++p) {
      double lifted = b[(p + best_rot) % n] + best_shift + (p + best_rot >= n ? 1 : 0);
      lifts[owner[p]] += lifted - a[p];
      result.tracks[owner[p]].push_back(lifts[owner[p]]);
    }
  }

  int flow = 0;
  for (int k = 0; k < n; ++k)
    flow += static_cast<int>(std::floor(result.tracks[k].back() - mu)) -
            static_cast<int>(std::floor(result.tracks[k].front() - mu));
  result.flow = flow;
  return result;
}

int spectral_flow(const std::vector<HolonomyPoint>& path, double mu) {
  return spectral_flow_tracks(path, mu).flow;
}

}  // namespace gerbelab::dirac
