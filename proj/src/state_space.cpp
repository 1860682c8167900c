#include "losslim/state_space.hpp"

#include <sstream>

namespace losslim {

namespace {

void require_finite(const MatrixXd& M, const char* name) {
  if (!M.allFinite()) {
    fail(ErrorCode::DimensionMismatch,
         std::string("matrix ") + name + " has non-finite entries");
  }
}

}  // namespace

StateSpace::StateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  if (A_.rows() != A_.cols()) {
    fail(ErrorCode::DimensionMismatch, "A must be square");
  }
  const Eigen::Index n = A_.rows();
  if (B_.rows() != n || C_.cols() != n || D_.rows() != C_.rows() ||
      D_.cols() != B_.cols()) {
    std::ostringstream os;
    os << "inconsistent state-space dimensions: A " << n << "x" << n << ", B "
       << B_.rows() << "x" << B_.cols() << ", C " << C_.rows() << "x"
       << C_.cols() << ", D " << D_.rows() << "x" << D_.cols();
    fail(ErrorCode::DimensionMismatch, os.str());
  }
  require_finite(A_, "A");
  require_finite(B_, "B");
  require_finite(C_, "C");
  require_finite(D_, "D");
}

StateSpace StateSpace::from_gain(const MatrixXd& D) {
  return StateSpace(MatrixXd::Zero(0, 0), MatrixXd::Zero(0, D.cols()),
                    MatrixXd::Zero(D.rows(), 0), D);
}

MatrixXcd StateSpace::frequency_response(double omega) const {
  if (n() == 0) return D_.cast<std::complex<double>>();
  MatrixXcd shifted =
      std::complex<double>(0.0, omega) * MatrixXcd::Identity(n(), n()) -
      A_.cast<std::complex<double>>();
  return C_.cast<std::complex<double>>() *
             shifted.partialPivLu().solve(B_.cast<std::complex<double>>()) +
         D_.cast<std::complex<double>>();
}

StateSpace StateSpace::subsystem(const std::vector<Eigen::Index>& outputs,
                                 const std::vector<Eigen::Index>& inputs) const {
  MatrixXd B(n(), static_cast<Eigen::Index>(inputs.size()));
  MatrixXd C(static_cast<Eigen::Index>(outputs.size()), n());
  MatrixXd D(static_cast<Eigen::Index>(outputs.size()),
             static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k] < 0 || inputs[k] >= m()) {
      fail(ErrorCode::DimensionMismatch, "subsystem input index out of range");
    }
    B.col(static_cast<Eigen::Index>(k)) = B_.col(inputs[k]);
  }
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    if (outputs[r] < 0 || outputs[r] >= p()) {
      fail(ErrorCode::DimensionMismatch, "subsystem output index out of range");
    }
    C.row(static_cast<Eigen::Index>(r)) = C_.row(outputs[r]);
  }
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          D_(outputs[r], inputs[k]);
    }
  }
  return StateSpace(A_, std::move(B), std::move(C), std::move(D));
}

StateSpace block_diag(const StateSpace& a, const StateSpace& b) {
  const Eigen::Index n = a.n() + b.n();
  MatrixXd A = MatrixXd::Zero(n, n);
  A.topLeftCorner(a.n(), a.n()) = a.A();
  A.bottomRightCorner(b.n(), b.n()) = b.A();
  MatrixXd B = MatrixXd::Zero(n, a.m() + b.m());
  B.topLeftCorner(a.n(), a.m()) = a.B();
  B.bottomRightCorner(b.n(), b.m()) = b.B();
  MatrixXd C = MatrixXd::Zero(a.p() + b.p(), n);
  C.topLeftCorner(a.p(), a.n()) = a.C();
  C.bottomRightCorner(b.p(), b.n()) = b.C();
  MatrixXd D = MatrixXd::Zero(a.p() + b.p(), a.m() + b.m());
  D.topLeftCorner(a.p(), a.m()) = a.D();
  D.bottomRightCorner(b.p(), b.m()) = b.D();
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

}  // namespace losslim
