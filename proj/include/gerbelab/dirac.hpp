#pragma once

#include "gerbelab/lie.hpp"
#include "gerbelab/numeric.hpp"

namespace gerbelab::dirac {

/// Thrown when a spectral-window endpoint or flow level sits on the
/// spectrum (closer than the gap tolerance).
struct window_error : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double kGapTolerance = 1e-8;

/// The twisted operator -i d/dx on [0, 2pi] with psi(2pi) = g psi(0)
/// is determined by the holonomy image g; its spectrum is
/// { n + arg(lambda_k)/(2 pi) : n in Z, lambda_k in Spec(g) }.
struct HolonomyPoint {
  Matrix g;
};

/// A real interval of Dirac levels, lo < hi.
struct SpectralWindow {
  double lo;
  double hi;
};

/// Cover levels are angles mu_1 < ... < mu_m in [0, 2pi); the induced
/// unit-circle points are lambda_j = exp(i mu_j) and the corresponding
/// Dirac levels are mu_j / (2 pi).  The product of the lambda_j must
/// differ from 1.
struct CoverSpec {
  std::vector<double> levels;

  void validate() const;
  int size() const { return static_cast<int>(levels.size()); }
  double dirac_level(int j) const { return levels.at(j) / kTwoPi; }
  Complex circle_point(int j) const { return std::polar(1.0, levels.at(j)); }

  /// m equally spaced levels, offset so the lambda product is not 1.
  static CoverSpec uniform(int m);
};

/// Eigenvalue fractions arg(lambda_k)/(2 pi) in [0, 1), ascending,
/// with multiplicity (size = N).
std::vector<double> level_fractions(const HolonomyPoint& point);

/// All eigenvalues of D_g inside the window, ascending with
/// multiplicity.
std::vector<double> spectrum(const HolonomyPoint& point, const SpectralWindow& window);

/// Circular distance (mod 1) from a Dirac level to the spectrum.
double spectral_gap(const HolonomyPoint& point, double dirac_level);

/// True iff level j of the cover avoids the spectrum by more than the
/// gap tolerance.
bool in_cover(const HolonomyPoint& point, int j, const CoverSpec& cover);

/// Orthonormal eigenframe of the window's spectral subspace.  A column
/// is the pair (fourier mode n_j, internal eigenvector v_j): the
/// eigenfunction e^{i (n_j + theta_j/2pi) x} v_j.  Columns ascend by
/// eigenvalue; the internal vectors carry the lie module's phase
/// convention, so the frame is deterministic.
struct WindowFrame {
  std::vector<double> eigenvalues;
  std::vector<int> fourier_modes;  // n_j per column
  Matrix vectors;                  // N x rank
  Complex det_line_phase;          // pivot-minor phase of the frame; 1 if empty
  int rank() const { return static_cast<int>(eigenvalues.size()); }
};

WindowFrame window_frame(const HolonomyPoint& point, const SpectralWindow& window);

/// The scalar comparing the trivialization of L_{jk} (x) L_{kl} with
/// that of L_{jl}, where the windows come from the three cover angles.
/// Antisymmetric under level exchange in the multiplicative sense:
/// odd permutations invert the value.
Complex gerbe_cocycle(const HolonomyPoint& point, double mu_j, double mu_k, double mu_l);

/// Lifted eigenvalue tracks along a sampled path, plus the signed
/// count of crossings of the reference level.
struct FlowResult {
  int flow;
  /// tracks[k][s] = lifted level of track k at sample s; each track
  /// represents one Z-orbit of the full spectrum.
  std::vector<std::vector<double>> tracks;
};

FlowResult spectral_flow_tracks(const std::vector<HolonomyPoint>& path, double mu);
int spectral_flow(const std::vector<HolonomyPoint>& path, double mu);

}  // namespace gerbelab::dirac
