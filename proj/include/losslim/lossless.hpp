#pragma once

#include <optional>

#include "losslim/state_space.hpp"

namespace losslim {

// Storage certificate of a lossless realization:
//   P A + A^T P = 0,  P B = C^T,  D + D^T = 0,  P symmetric positive definite.
struct LosslessCertificate {
  MatrixXd P;
  double residual_eq_A = 0.0;  // |PA + A^T P|_F
  double residual_eq_B = 0.0;  // |PB - C^T|_F
  double min_eigenvalue = 0.0;
};

struct CertificateResiduals {
  double eq_A = 0.0;
  double eq_B = 0.0;
  double eq_D = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};

struct FundamentalLimits {
  double gamma_h2 = 0.0;
  std::optional<double> gamma_hinf;  // empty: requires D = 0
};

// Enumeration order of the symmetric unknowns in the certificate solve.
// Both orders set up the same least-squares problem; solving under either
// must land on the same P (uniqueness check used by tests).
enum class VechOrder { LowerColumnMajor, UpperRowMajor };

// Solves the joint linear system P A + A^T P = 0, P B = C^T over symmetric P
// by QR least squares, then verifies positive definiteness.
LosslessCertificate find_certificate(const StateSpace& sys, double tol = 1e-9,
                                     VechOrder order = VechOrder::LowerColumnMajor);

// Pure residual check of all three lossless conditions plus the PD test.
CertificateResiduals verify_certificate(const StateSpace& sys, const MatrixXd& P,
                                        double tol = 1e-9);

// gamma*_H2 = sqrt(2 tr(CB)); requires a certificate to exist.
double h2_limit(const StateSpace& sys, double tol = 1e-9);

// gamma*_Hinf = sqrt(2); requires a certificate and D = 0.
double hinf_limit(const StateSpace& sys, double tol = 1e-9);

FundamentalLimits limits(const StateSpace& sys, double tol = 1e-9);

}  // namespace losslim
