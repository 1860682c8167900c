#pragma once

#include <optional>
#include <vector>

#include "losslim/state_space.hpp"

namespace losslim {

struct SolverReport {
  double residual_norm = 0.0;
  int iterations = 0;
  double tolerance_used = 0.0;
  std::vector<std::string> warnings;
};

// Stability test with a scaled margin: max Re(lambda) < -1e-9 * (1 + |A|_F).
// Closed loops here can be lightly damped, so the margin scales with the
// problem instead of being a fixed constant.
bool is_hurwitz(const MatrixXd& A);
double max_real_eigenvalue(const MatrixXd& A);

// Eigenvalues via the balanced Schur path (with a complex-iteration
// fallback); prefer this over raw Eigen calls for stiff closed loops.
VectorXcd eigenvalues_of(const MatrixXd& A);

// Solves A X + X A^T + Q = 0 for symmetric X, A Hurwitz, via Bartels-Stewart
// on the real Schur form of A. Construct once, solve for many Q.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const MatrixXd& A, double tol = 1e-9);

  MatrixXd solve(const MatrixXd& Q, SolverReport* report = nullptr) const;

  const MatrixXd& A() const { return A_; }

 private:
  MatrixXd A_;
  MatrixXd U_, T_;     // D^{-1} A D = U T U^T, T quasi upper triangular
  VectorXd scale_;     // balancing diagonal D
  std::vector<Eigen::Index> block_starts_;
  double tol_;

  MatrixXd solve_reduced(const MatrixXd& Qbar) const;
};

MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& Q, double tol = 1e-9,
                        SolverReport* report = nullptr);

// Stabilizing solution of A^T X + X A - X (scale B B^T) X + Q = 0 via the
// ordered Schur form of the 2n x 2n Hamiltonian [[A, -scale BB^T], [-Q, -A^T]].
// X = U2 U1^{-1} from the stable invariant subspace, symmetrized. One Newton
// (Kleinman) refinement step runs if the residual misses tol.
MatrixXd solve_care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                    double r_inv_scale = 1.0, double tol = 1e-9,
                    SolverReport* report = nullptr);

// Stable invariant subspace splitting used by solve_care; exposed for the
// H-infinity feasibility test, which needs "no stabilizing solution" as a
// non-exceptional answer.
std::optional<MatrixXd> try_solve_care(const MatrixXd& A, const MatrixXd& B,
                                       const MatrixXd& Q, double r_inv_scale,
                                       double tol = 1e-9,
                                       SolverReport* report = nullptr);

// ||G||_H2 = sqrt(tr(C Wc C^T)) with Wc the controllability Gramian.
// Requires A Hurwitz and D identically zero.
double h2_norm(const StateSpace& sys, double tol = 1e-9);

struct HinfOptions {
  double tol = 1e-6;          // relative bracket width
  int max_iterations = 80;
  double lower_hint = 0.0;    // known lower bound (e.g. from a grid pre-pass)
  int grid_points = 64;
  bool spectrum_seeds = true; // also sample at the resonances of A; callers
                              // that already swept a shared grid turn this off
  bool assume_hurwitz = false;  // caller already verified stability of A
};

// ||G||_Hinf by bisection on gamma with the Hamiltonian imaginary-eigenvalue
// feasibility test. Bracket seeded from a log frequency grid (resonances of A
// included); infeasible probes contribute level-crossing frequencies that
// tighten the lower bound.
double hinf_norm(const StateSpace& sys, const HinfOptions& opts = {});

struct RankReport {
  bool is_controllable = false;
  Eigen::Index rank = 0;
  bool pbh_agrees = true;
  std::vector<std::string> warnings;
};

// Singular-value rank of [B, AB, ..., A^{n-1}B] with a PBH cross-check.
RankReport controllability_rank(const MatrixXd& A, const MatrixXd& B,
                                double tol = 1e-9);

}  // namespace losslim
