#include "losslim/synth.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "losslim/numlin.hpp"

namespace losslim {

namespace {

MatrixXd spd_sqrt(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  return es.operatorSqrt();
}

MatrixXd spd_inv_sqrt(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  return es.operatorInverseSqrt();
}

void require_zero_feedthrough(const StateSpace& sys, const char* what) {
  if (sys.has_feedthrough()) {
    fail(ErrorCode::NonzeroFeedthrough,
         std::string(what) + " requires a plant with D = 0");
  }
}

}  // namespace

GeneralizedPlant build_generalized_plant(const StateSpace& sys) {
  const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p();
  GeneralizedPlant gp;
  gp.A = sys.A();
  gp.B_w = MatrixXd::Zero(n, m + p);
  gp.B_w.leftCols(m) = sys.B();
  gp.B_u = sys.B();
  gp.C_z = MatrixXd::Zero(p + m, n);
  gp.C_z.topRows(p) = sys.C();
  gp.C_y = sys.C();
  gp.D_zw = MatrixXd::Zero(p + m, m + p);
  gp.D_zu = MatrixXd::Zero(p + m, m);
  gp.D_zu.topRows(p) = sys.D();
  gp.D_zu.bottomRows(m) = MatrixXd::Identity(m, m);
  gp.D_yw = MatrixXd::Zero(p, m + p);
  gp.D_yw.leftCols(m) = sys.D();
  gp.D_yw.rightCols(p) = MatrixXd::Identity(p, p);
  gp.D_yu = sys.D();
  return gp;
}

Controller structured_h2_controller(const StateSpace& sys) {
  require_zero_feedthrough(sys, "the structured H2 controller");
  const MatrixXd A_K = sys.A() - 2.0 * sys.B() * sys.C();
  return Controller{StateSpace(A_K, sys.B(), -sys.C(),
                               MatrixXd::Zero(sys.m(), sys.p())),
                    ControllerKind::StructuredH2};
}

Controller static_hinf_controller(const StateSpace& sys) {
  require_zero_feedthrough(sys, "the static Hinf controller");
  const Eigen::Index m = sys.m();
  return Controller{
      StateSpace(MatrixXd::Zero(0, 0), MatrixXd::Zero(0, sys.p()),
                 MatrixXd::Zero(m, 0),
                 -std::sqrt(2.0) * MatrixXd::Identity(m, sys.p())),
      ControllerKind::StaticHinf};
}

Controller riccati_h2_controller(const GeneralizedPlant& gp) {
  if ((gp.D_yu.array() != 0.0).any()) {
    fail(ErrorCode::NonzeroFeedthrough,
         "riccati_h2_controller requires D_yu = 0; apply loop_shift first");
  }
  const Eigen::Index n = gp.n();

  // Control Riccati with cross term N = C_z^T D_zu and weight
  // R1 = D_zu^T D_zu; completing the square reduces it to the plain form.
  const MatrixXd R1 = gp.D_zu.transpose() * gp.D_zu;
  const MatrixXd R1_inv_sqrt = spd_inv_sqrt(R1);
  const MatrixXd DtCz = gp.D_zu.transpose() * gp.C_z;
  const MatrixXd Ax = gp.A - gp.B_u * R1.ldlt().solve(DtCz);
  const MatrixXd Qx =
      gp.C_z.transpose() * gp.C_z - DtCz.transpose() * R1.ldlt().solve(DtCz);
  const MatrixXd X = solve_care(Ax, gp.B_u * R1_inv_sqrt,
                                0.5 * (Qx + Qx.transpose()), 1.0);
  const MatrixXd F = -R1.ldlt().solve(gp.B_u.transpose() * X + DtCz);

  // Filter Riccati, dual construction with N = B_w D_yw^T, R2 = D_yw D_yw^T.
  const MatrixXd R2 = gp.D_yw * gp.D_yw.transpose();
  const MatrixXd R2_inv_sqrt = spd_inv_sqrt(R2);
  const MatrixXd BwDt = gp.B_w * gp.D_yw.transpose();
  const MatrixXd Ay = gp.A - BwDt * R2.ldlt().solve(gp.C_y);
  const MatrixXd Qy =
      gp.B_w * gp.B_w.transpose() - BwDt * R2.ldlt().solve(BwDt.transpose());
  const MatrixXd Y =
      solve_care(Ay.transpose(), gp.C_y.transpose() * R2_inv_sqrt,
                 0.5 * (Qy + Qy.transpose()), 1.0);
  const MatrixXd Lg = -(Y * gp.C_y.transpose() + BwDt) * R2.ldlt().solve(
                          MatrixXd::Identity(gp.n_y(), gp.n_y()));

  // Observer form: xhat' = (A + Lg C_y + B_u F) xhat - Lg y, u = F xhat.
  const MatrixXd A_K = gp.A + Lg * gp.C_y + gp.B_u * F;
  return Controller{StateSpace(A_K, -Lg, F, MatrixXd::Zero(gp.n_u(), gp.n_y())),
                    ControllerKind::RiccatiH2};
}

GeneralizedPlant loop_shift(const GeneralizedPlant& gp) {
  const MatrixXd& D = gp.D_yu;
  const Eigen::Index m = D.cols(), p = D.rows();
  if ((D + D.transpose()).norm() > 1e-9 * (1.0 + D.norm())) {
    fail(ErrorCode::SkewFeedthroughViolated,
         "loop shifting assumes a skew feedthrough (lossless plant)");
  }
  const MatrixXd R = spd_sqrt(MatrixXd::Identity(p, p) + D * D.transpose());
  const MatrixXd S = spd_sqrt(MatrixXd::Identity(m, m) + D.transpose() * D);
  const MatrixXd R_inv = spd_inv_sqrt(MatrixXd::Identity(p, p) + D * D.transpose());
  const MatrixXd S_inv = spd_inv_sqrt(MatrixXd::Identity(m, m) + D.transpose() * D);

  // Normalized control/measurement channels (u~ = S u, y~ = R^{-1} y) with
  // the D_yu feedthrough absorbed into the controller recovery.
  GeneralizedPlant out = gp;
  out.B_u = gp.B_u * S_inv;
  out.D_zu = gp.D_zu * S_inv;
  out.C_y = R_inv * gp.C_y;
  out.D_yw = R_inv * gp.D_yw;
  out.D_yu = MatrixXd::Zero(p, m);
  return out;
}

StateSpace close_loop(const GeneralizedPlant& gp, const Controller& K) {
  const StateSpace& k = K.K;
  if (k.m() != gp.n_y() || k.p() != gp.n_u()) {
    fail(ErrorCode::DimensionMismatch,
         "controller dimensions are not dual to the plant");
  }
  const Eigen::Index nu = gp.n_u();
  const MatrixXd Delta =
      MatrixXd::Identity(nu, nu) - k.D() * gp.D_yu;
  Eigen::JacobiSVD<MatrixXd> svd(Delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() <= 1e-12) {
    fail(ErrorCode::IllPosedLoop, "I - D_K D_yu is singular");
  }
  const MatrixXd Dinv = svd.solve(MatrixXd::Identity(nu, nu));

  const Eigen::Index n = gp.n(), nk = k.n();
  const MatrixXd DkCy = Dinv * k.D() * gp.C_y;
  const MatrixXd Ck_eff = Dinv * k.C();
  const MatrixXd DkDyw = Dinv * k.D() * gp.D_yw;

  MatrixXd A = MatrixXd::Zero(n + nk, n + nk);
  A.topLeftCorner(n, n) = gp.A + gp.B_u * DkCy;
  A.topRightCorner(n, nk) = gp.B_u * Ck_eff;
  A.bottomLeftCorner(nk, n) = k.B() * (gp.C_y + gp.D_yu * DkCy);
  A.bottomRightCorner(nk, nk) = k.A() + k.B() * gp.D_yu * Ck_eff;

  MatrixXd B = MatrixXd::Zero(n + nk, gp.n_w());
  B.topRows(n) = gp.B_w + gp.B_u * DkDyw;
  B.bottomRows(nk) = k.B() * (gp.D_yw + gp.D_yu * DkDyw);

  MatrixXd C = MatrixXd::Zero(gp.n_z(), n + nk);
  C.leftCols(n) = gp.C_z + gp.D_zu * DkCy;
  C.rightCols(nk) = gp.D_zu * Ck_eff;

  MatrixXd D = gp.D_zw + gp.D_zu * DkDyw;
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

HinfFeasibility hinf_gamma_feasible(const StateSpace& sys, double gamma,
                                    double tol) {
  require_zero_feedthrough(sys, "the Hinf gamma-feasibility test");
  HinfFeasibility out;
  // For the lossless generalized plant, B_w B_w^T = B B^T and
  // C_z^T C_z = C^T C, so both Riccati equations carry the quadratic
  // coefficient (1 - gamma^{-2}).
  const double scale = 1.0 - 1.0 / (gamma * gamma);
  auto X = try_solve_care(sys.A(), sys.B(),
                          sys.C().transpose() * sys.C(), scale, tol);
  out.x_exists = X.has_value();
  auto Y = try_solve_care(sys.A().transpose(), sys.C().transpose(),
                          sys.B() * sys.B().transpose(), scale, tol);
  out.y_exists = Y.has_value();
  if (out.x_exists && out.y_exists) {
    const VectorXcd eig = eigenvalues_of((*X) * (*Y));
    out.spectral_radius_xy = eig.cwiseAbs().maxCoeff();
    out.feasible = out.spectral_radius_xy < gamma * gamma;
  }
  return out;
}

}  // namespace losslim
