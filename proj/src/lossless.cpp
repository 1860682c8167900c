#include "losslim/lossless.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "losslim/numlin.hpp"

namespace losslim {

namespace {

// Enumerates the independent entries (i, j) of a symmetric n x n unknown.
std::vector<std::pair<Eigen::Index, Eigen::Index>> vech_indices(Eigen::Index n,
                                                                VechOrder order) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
  idx.reserve(n * (n + 1) / 2);
  if (order == VechOrder::LowerColumnMajor) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i) idx.emplace_back(i, j);
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) idx.emplace_back(i, j);
  }
  return idx;
}

}  // namespace

LosslessCertificate find_certificate(const StateSpace& sys, double tol,
                                     VechOrder order) {
  const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p();
  if (p != m) {
    fail(ErrorCode::NotLossless,
         "lossless systems are square (inputs = outputs)");
  }
  const MatrixXd& A = sys.A();
  const MatrixXd& B = sys.B();
  const MatrixXd& C = sys.C();
  const MatrixXd& D = sys.D();
  const double skew_residual = (D + D.transpose()).norm();
  if (skew_residual > tol * (1.0 + D.norm())) {
    std::ostringstream os;
    os << "D + D^T residual " << skew_residual << " exceeds tolerance";
    fail(ErrorCode::SkewFeedthroughViolated, os.str());
  }
  if (n == 0) {
    fail(ErrorCode::NotLossless, "certificate undefined for a static system");
  }

  // Stacked linear operator on vech(P): rows for the upper triangle of
  // P A + A^T P = 0 (off-diagonal rows weighted sqrt(2) so the vector 2-norm
  // equals the Frobenius norm of the residual matrix), then one row per entry
  // of P B = C^T.
  const auto unknowns = vech_indices(n, order);
  const Eigen::Index n_unknowns = static_cast<Eigen::Index>(unknowns.size());
  const Eigen::Index rows_sym = n * (n + 1) / 2;
  const Eigen::Index rows_pb = n * m;
  MatrixXd Mop = MatrixXd::Zero(rows_sym + rows_pb, n_unknowns);
  VectorXd rhs = VectorXd::Zero(rows_sym + rows_pb);
  const double rt2 = std::sqrt(2.0);

  for (Eigen::Index u = 0; u < n_unknowns; ++u) {
    const auto [i, j] = unknowns[u];
    // Basis matrix E = e_i e_j^T + e_j e_i^T (e_i e_i^T on the diagonal);
    // its image S = E A has nonzero rows i and j only, and
    // E A + A^T E = S + S^T.
    MatrixXd S = MatrixXd::Zero(n, n);
    S.row(i) += A.row(j);
    if (i != j) S.row(j) += A.row(i);
    const MatrixXd R = S + S.transpose();
    Eigen::Index row = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a; b < n; ++b, ++row) {
        const double v = R(a, b);
        if (v != 0.0) Mop(row, u) = (a == b) ? v : rt2 * v;
      }
    }
    // (E B) has row i = B.row(j) and row j = B.row(i).
    for (Eigen::Index c = 0; c < m; ++c) {
      Mop(rows_sym + i * m + c, u) += B(j, c);
      if (i != j) Mop(rows_sym + j * m + c, u) += B(i, c);
    }
  }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index c = 0; c < m; ++c) rhs(rows_sym + a * m + c) = C(c, a);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(Mop);
  const double max_dim = double(std::max(Mop.rows(), Mop.cols()));
  qr.setThreshold(tol * std::sqrt(max_dim));
  const VectorXd x = qr.solve(rhs);
  const double residual = (Mop * x - rhs).norm();
  if (residual > tol * (1.0 + rhs.norm())) {
    std::ostringstream os;
    os << "no storage certificate: least-squares residual " << residual;
    fail(ErrorCode::NotLossless, os.str());
  }
  if (qr.rank() < n_unknowns) {
    std::ostringstream os;
    os << "certificate not unique: nullspace dimension "
       << n_unknowns - qr.rank() << " (non-minimal realization)";
    fail(ErrorCode::NotUnique, os.str());
  }

  MatrixXd P = MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n_unknowns; ++u) {
    const auto [i, j] = unknowns[u];
    P(i, j) = x(u);
    P(j, i) = x(u);
  }

  LosslessCertificate cert;
  cert.P = P;
  cert.residual_eq_A = (P * A + A.transpose() * P).norm();
  cert.residual_eq_B = (P * B - C.transpose()).norm();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(P, Eigen::EigenvaluesOnly);
  cert.min_eigenvalue = es.eigenvalues().minCoeff();
  if (!(cert.min_eigenvalue > tol)) {
    std::ostringstream os;
    os << "certificate solution is not positive definite (min eigenvalue "
       << cert.min_eigenvalue << ")";
    fail(ErrorCode::NotPositiveDefinite, os.str());
  }
  return cert;
}

CertificateResiduals verify_certificate(const StateSpace& sys, const MatrixXd& P,
                                        double tol) {
  if (P.rows() != sys.n() || P.cols() != sys.n()) {
    fail(ErrorCode::DimensionMismatch, "certificate dimension mismatch");
  }
  CertificateResiduals r;
  r.eq_A = (P * sys.A() + sys.A().transpose() * P).norm();
  r.eq_B = (P * sys.B() - sys.C().transpose()).norm();
  r.eq_D = (sys.D() + sys.D().transpose()).norm();
  if (sys.n() > 0) {
    const MatrixXd Psym = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Psym, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  const bool sym_ok = (P - P.transpose()).norm() <= tol * (1.0 + P.norm());
  r.valid = sym_ok &&
            r.eq_A <= tol * (1.0 + sys.A().norm() * P.norm()) &&
            r.eq_B <= tol * (1.0 + sys.C().norm()) &&
            r.eq_D <= tol * (1.0 + sys.D().norm()) && r.min_eigenvalue > tol;
  return r;
}

double h2_limit(const StateSpace& sys, double tol) {
  const LosslessCertificate cert = find_certificate(sys, tol);
  const double tr = (sys.C() * sys.B()).trace();
  if (tr < -tol) {
    fail(ErrorCode::NegativeTrace,
         "tr(CB) negative despite certificate; inconsistent inputs");
  }
#ifndef NDEBUG
  // tr(CB) = tr(B^T P B) once PB = C^T holds.
  const double tr_p = (sys.B().transpose() * cert.P * sys.B()).trace();
  if (std::abs(tr - tr_p) > 1e-6 * (1.0 + std::abs(tr))) {
    fail(ErrorCode::IllConditioned, "tr(CB) and tr(B^T P B) disagree");
  }
#else
  (void)cert;
#endif
  return std::sqrt(2.0 * std::max(0.0, tr));
}

double hinf_limit(const StateSpace& sys, double tol) {
  if (sys.has_feedthrough()) {
    fail(ErrorCode::NonzeroFeedthrough,
         "the Hinf limit formula requires D = 0");
  }
  (void)find_certificate(sys, tol);
  return std::sqrt(2.0);
}

FundamentalLimits limits(const StateSpace& sys, double tol) {
  FundamentalLimits out;
  out.gamma_h2 = h2_limit(sys, tol);
  if (!sys.has_feedthrough()) out.gamma_hinf = std::sqrt(2.0);
  return out;
}

}  // namespace losslim
