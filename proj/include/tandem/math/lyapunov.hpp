#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace tandem::math {

struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// True iff every eigenvalue of A has real part < -1e-12.
inline bool is_hurwitz(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("is_hurwitz: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff() < -1e-12;
}

/// Solves AᵀP + PA = -Q for symmetric positive-definite P via Kronecker vectorization.
/// Intended for the controller-synthesis sizes used here (A up to 36×36).
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    Eigen::Index worst;
    const double max_re = es.eigenvalues().real().maxCoeff(&worst);
    if (max_re >= -1e-12) {
      std::ostringstream msg;
      msg << "solve_lyapunov: A is not Hurwitz, eigenvalue " << es.eigenvalues()(worst).real()
          << (es.eigenvalues()(worst).imag() >= 0 ? "+" : "") << es.eigenvalues()(worst).imag()
          << "i has non-negative real part";
      throw SynthesisError(msg.str());
    }
  }

  // vec(AᵀP) = (I ⊗ Aᵀ) vec(P), vec(PA) = (Aᵀ ⊗ I) vec(P)
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index c = 0; c < n; ++c) K.block(c * n, c * n, n, n) = At;
  for (Eigen::Index bc = 0; bc < n; ++bc)
    for (Eigen::Index br = 0; br < n; ++br)
      if (At(br, bc) != 0.0)
        K.block(br * n, bc * n, n, n).diagonal().array() += At(br, bc);

  Eigen::VectorXd q(n * n);
  for (Eigen::Index c = 0; c < n; ++c) q.segment(c * n, n) = -Q.col(c);

  const Eigen::VectorXd p = Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(q);
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index c = 0; c < n; ++c) P.col(c) = p.segment(c * n, n);
  P = 0.5 * (P + P.transpose()).eval();

  const double residual = (At * P + P * A + Q).norm();
  if (!(residual <= 1e-8 * std::max(1.0, Q.norm()))) {
    std::ostringstream msg;
    msg << "solve_lyapunov: residual " << residual << " exceeds tolerance";
    throw SynthesisError(msg.str());
  }
  return P;
}

/// Closed-loop matrix A_m = [[0, I], [-K_P, -K_D]] and Lyapunov certificate for the
/// error system η̇ = A_m η.
struct GainSynthesis {
  Eigen::MatrixXd K_P;
  Eigen::MatrixXd K_D;
  Eigen::MatrixXd A_m;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q_L;
};

inline GainSynthesis make_gain_synthesis(const Eigen::MatrixXd& K_P, const Eigen::MatrixXd& K_D,
                                         const Eigen::MatrixXd& Q_L) {
  const Eigen::Index n = K_P.rows();
  if (K_P.cols() != n || K_D.rows() != n || K_D.cols() != n)
    throw std::invalid_argument("make_gain_synthesis: gain dimension mismatch");
  if (Q_L.rows() != 2 * n || Q_L.cols() != 2 * n)
    throw std::invalid_argument("make_gain_synthesis: Q_L must be 2n x 2n");
  GainSynthesis gs;
  gs.K_P = K_P;
  gs.K_D = K_D;
  gs.Q_L = Q_L;
  gs.A_m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  gs.A_m.topRightCorner(n, n).setIdentity();
  gs.A_m.bottomLeftCorner(n, n) = -K_P;
  gs.A_m.bottomRightCorner(n, n) = -K_D;
  gs.P = solve_lyapunov(gs.A_m, Q_L);
  return gs;
}

/// Largest admissible CLF rate λ = λ_min(Q_L) / λ_max(P) for V(η) = ηᵀPη.
inline double clf_rate_bound(const GainSynthesis& gs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(gs.Q_L);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(gs.P);
  return esq.eigenvalues().minCoeff() / esp.eigenvalues().maxCoeff();
}

}  // namespace tandem::math
