#pragma once

#include <Eigen/Dense>
#include <complex>

#include "losslim/errors.hpp"

namespace losslim {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;

// Continuous-time LTI system G(s) = C (sI - A)^{-1} B + D.
//
// n = 0 (static gain) is a valid system: A is 0x0, B is 0xm, C is px0.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D);

  // Static system with empty state.
  static StateSpace from_gain(const MatrixXd& D);

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }
  const MatrixXd& D() const { return D_; }

  Eigen::Index n() const { return A_.rows(); }  // states
  Eigen::Index m() const { return B_.cols(); }  // inputs
  Eigen::Index p() const { return C_.rows(); }  // outputs

  bool has_feedthrough() const { return (D_.array() != 0.0).any(); }

  // G(jw), evaluated by dense solve.
  MatrixXcd frequency_response(double omega) const;

  // Subsystem keeping the given output rows / input columns.
  StateSpace subsystem(const std::vector<Eigen::Index>& outputs,
                       const std::vector<Eigen::Index>& inputs) const;

 private:
  MatrixXd A_, B_, C_, D_;
};

// Stacks two systems block-diagonally (independent channels).
StateSpace block_diag(const StateSpace& a, const StateSpace& b);

}  // namespace losslim
