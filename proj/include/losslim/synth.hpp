#pragma once

#include "losslim/state_space.hpp"

namespace losslim {

// Nine-block open-loop map from (w, u) to (z, y) with w = (w_u, w_y) and
// z = (Cx + Du, u). Built canonically from a plant G; loop shifting produces
// valid non-canonical instances.
struct GeneralizedPlant {
  MatrixXd A;
  MatrixXd B_w, B_u;
  MatrixXd C_z, C_y;
  MatrixXd D_zw, D_zu, D_yw, D_yu;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index n_w() const { return B_w.cols(); }
  Eigen::Index n_u() const { return B_u.cols(); }
  Eigen::Index n_z() const { return C_z.rows(); }
  Eigen::Index n_y() const { return C_y.rows(); }
};

enum class ControllerKind { StructuredH2, StaticHinf, RiccatiH2 };

struct Controller {
  StateSpace K;
  ControllerKind kind;
};

GeneralizedPlant build_generalized_plant(const StateSpace& sys);

// K(s) = -C (sI - A + 2BC)^{-1} B; H2-optimal for certified lossless plants
// with D = 0.
Controller structured_h2_controller(const StateSpace& sys);

// K = -sqrt(2) I; Hinf-optimal for certified lossless plants with D = 0.
Controller static_hinf_controller(const StateSpace& sys);

// Output-feedback H2 design from the control/filter Riccati pair in observer
// form. Handles the cross terms a loop-shifted plant carries; requires
// D_yu = 0 (run loop_shift first otherwise).
Controller riccati_h2_controller(const GeneralizedPlant& gp);

// Normalizes a plant built from a lossless G with skew D != 0 so that
// D_yu = 0 and the input/output weights are orthonormal, preserving the
// H2-optimal cost. R = (I + D D^T)^{1/2}, S = (I + D^T D)^{1/2}.
GeneralizedPlant loop_shift(const GeneralizedPlant& gp);

// Lower linear-fractional interconnection; state is (x, x_K) stacked.
StateSpace close_loop(const GeneralizedPlant& gp, const Controller& K);

struct HinfFeasibility {
  bool feasible = false;
  bool x_exists = false;
  bool y_exists = false;
  double spectral_radius_xy = 0.0;  // rho(X_gamma Y_gamma), when both exist
};

// gamma-level feasibility for the lossless generalized plant (D = 0):
// both Riccati solutions exist and rho(X_gamma Y_gamma) < gamma^2.
HinfFeasibility hinf_gamma_feasible(const StateSpace& sys, double gamma,
                                    double tol = 1e-9);

}  // namespace losslim
