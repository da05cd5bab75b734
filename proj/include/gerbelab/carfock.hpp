#pragma once

#include "gerbelab/numeric.hpp"

#include <map>

namespace gerbelab::carfock {

/// Fermionic Fock space over C^d in the occupation-bitstring basis
/// (bit i of the basis index = occupation of mode i).  Mode operators
/// are applied on the fly; dense matrices are only materialized on
/// request for small d.
///
/// Smeared operators follow the convention with anticommutator
/// a*(u) a(v) + a(v) a*(u) = 2 <v, u> (inner product antilinear in its
/// first slot), i.e. a*(u) = sqrt(2) sum_i u_i c_i*.
class FockSpace {
 public:
  explicit FockSpace(int d);

  int modes() const { return d_; }
  int dim() const { return 1 << d_; }

  CVector apply_c(int mode, const CVector& psi) const;
  CVector apply_c_star(int mode, const CVector& psi) const;
  CVector a(const CVector& v, const CVector& psi) const;
  CVector a_star(const CVector& u, const CVector& psi) const;

  /// Dense matrix of c_mode (creation = false) or c_mode* (true);
  /// refused above 8 modes to keep memory in check.
  Matrix mode_matrix(int mode, bool creation) const;

 private:
  int d_;
};

/// Splitting H = H_+ (+) H_- encoded by the projector onto H_+.
struct Polarization {
  Matrix p_plus;

  void validate(double tol = 1e-12) const;
  int rank() const;  // dim H_+
};

/// The state annihilated by a*(u), u in H_-, and a(v), v in H_+
/// (H_- filled, H_+ empty); unit norm, first nonzero amplitude real
/// positive.
CVector vacuum(const Polarization& pol, const FockSpace& fock);

/// Second-quantized unitary with g-hat a*(v) g-hat^-1 = a*(g v),
/// normalized to act trivially on the empty state, plus the verified
/// residuals.  phase_ambiguity_dim is 1 exactly when the overdetermined
/// intertwining system was consistent (every solution is then a scalar
/// multiple of op restricted from the one-dimensional empty sector).
struct Implementer {
  Matrix op;
  double intertwine_residual;
  double unitarity_residual;
  int phase_ambiguity_dim;
};

Implementer implement(const Matrix& g, const FockSpace& fock, double tol = 1e-8);

/// Fourier-mode one-particle space: modes k in [-cutoff, cutoff]
/// tensored with an internal C^n, graded by the sign of k.
struct TruncatedOneParticle {
  int cutoff;
  int n;

  int dim() const { return n * (2 * cutoff + 1); }
  int mode_offset(int k) const;  // first row of mode-k block
  Matrix epsilon() const;        // +1 on k >= 0, -1 on k < 0

  /// Truncated multiplication operator of A e^{i m theta}: modes
  /// pushed outside the cutoff are dropped (sharp cutoff).
  Matrix shift_operator(int m, const Matrix& a) const;
};

/// (1/4) tr(eps [eps, X] [eps, Y]) on the truncated space.
Complex cocycle_trace(const TruncatedOneParticle& space, const Matrix& x, const Matrix& y);

/// (1/(2 pi i)) of the circle integral of tr(X dY) for X = A e^{i m theta},
/// Y = B e^{i n theta}, by periodic-trapezoid quadrature; the value is
/// cross-checked against the analytic n tr(AB) delta_{m+n,0}.
Complex cocycle_loop(const Matrix& a, const Matrix& b, int m, int n, int nodes = 64);

/// |c([X,Y],Z) + c([Y,Z],X) + c([Z,X],Y)| with c = cocycle_trace.
double jacobi_check(const TruncatedOneParticle& space, const Matrix& x, const Matrix& y,
                    const Matrix& z);

/// Squared Hilbert-Schmidt norms of the grading-off-diagonal part of
/// the multiplication operator of a Fourier loop, as a function of the
/// cutoff, with a convergence/divergence classification.
struct HsReport {
  std::vector<double> norms2;  // entry L-1 holds the value at cutoff L
  double tail_increment;       // max increment over the last five steps
  double log_slope;            // least-squares slope of norms2 against log L
  bool converged;              // tail_increment < 1e-3
  bool divergent;              // log_slope > 0.5
};

HsReport hs_criterion(const std::map<int, Matrix>& fourier, int cutoff);

}  // namespace gerbelab::carfock
