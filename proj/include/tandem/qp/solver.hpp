#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tandem::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// min ½ xᵀH x + gᵀx  s.t.  A_eq x = b_eq,  lb ≤ A_in x ≤ ub
struct QPProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  Eigen::Index n() const { return g.size(); }
  Eigen::Index m_eq() const { return b_eq.size(); }
  Eigen::Index m_in() const { return lb.size(); }

  void validate() const {
    const Eigen::Index nv = n();
    if (H.rows() != nv || H.cols() != nv) throw std::invalid_argument("QPProblem: H dimension");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("QPProblem: H must be symmetric");
    if (A_eq.rows() != m_eq() || (m_eq() > 0 && A_eq.cols() != nv))
      throw std::invalid_argument("QPProblem: A_eq dimension");
    if (A_in.rows() != m_in() || (m_in() > 0 && A_in.cols() != nv))
      throw std::invalid_argument("QPProblem: A_in dimension");
    if (ub.size() != m_in()) throw std::invalid_argument("QPProblem: bound dimension");
  }
};

enum class QPStatus { optimal, max_iter, infeasible };

struct QPSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_eq;  // duals of equality rows
  Eigen::VectorXd mu_in;      // duals of inequality rows (≥0 at upper bound, ≤0 at lower)
  QPStatus status{QPStatus::max_iter};
  double stationarity{kInf};
  double primal_residual{kInf};
  double dual_residual{kInf};
  double complementarity{kInf};
  int iterations{0};
  bool polished{false};
};

struct QPSettings {
  double tol{1e-6};
  int max_iter{4000};
  double rho{0.1};
  double rho_eq_scale{1e3};
  double sigma{1e-6};
  double alpha{1.6};
  double eps_infeasible{1e-5};
  double reg_eps{1e-8};  // added to H when λ_min(H) < reg_eps
  int check_interval{25};
  bool polish{true};
  bool adaptive_rho{true};
};

/// Dense operator-splitting QP solver (ADMM with active-set polish).
/// Holds warm-start state between solves; one instance per control loop.
class QPSolver {
 public:
  explicit QPSolver(QPSettings settings = {}) : settings_(settings) {}

  QPSettings& settings() { return settings_; }

  void reset_warm_start() { have_warm_ = false; }

  QPSolution solve(const QPProblem& p) { return solve(p, settings_.tol, settings_.max_iter); }

  QPSolution solve(const QPProblem& p, double tol, int max_iter) {
    p.validate();
    const Eigen::Index n = p.n(), me = p.m_eq(), mi = p.m_in(), m = me + mi;

    Eigen::MatrixXd H = 0.5 * (p.H + p.H.transpose());
    {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < settings_.reg_eps)
        H.diagonal().array() += settings_.reg_eps;
    }

    // Stack constraints as l ≤ Ax ≤ u; equalities get l = u.
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd l(m), u(m);
    if (me > 0) {
      A.topRows(me) = p.A_eq;
      l.head(me) = p.b_eq;
      u.head(me) = p.b_eq;
    }
    if (mi > 0) {
      A.bottomRows(mi) = p.A_in;
      l.tail(mi) = p.lb;
      u.tail(mi) = p.ub;
    }

    QPSolution sol;
    if (m == 0) {
      sol.x = Eigen::LLT<Eigen::MatrixXd>(H).solve(-p.g);
      sol.lambda_eq.resize(0);
      sol.mu_in.resize(0);
      sol.status = QPStatus::optimal;
      compute_residuals(p, H, sol);
      return sol;
    }

    Eigen::VectorXd rho(m);
    double rho_bar = settings_.rho;
    auto fill_rho = [&](double rb) {
      for (Eigen::Index i = 0; i < m; ++i)
        rho(i) = (l(i) == u(i)) ? rb * settings_.rho_eq_scale : rb;
    };
    fill_rho(rho_bar);

    Eigen::VectorXd x, y, z;
    if (have_warm_ && warm_x_.size() == n && warm_y_.size() == m) {
      x = warm_x_;
      y = warm_y_;
      z = warm_z_;
    } else {
      x = Eigen::VectorXd::Zero(n);
      y = Eigen::VectorXd::Zero(m);
      z = Eigen::VectorXd::Zero(m);
      for (Eigen::Index i = 0; i < m; ++i) z(i) = std::clamp(0.0, l(i), u(i));
    }

    Eigen::LLT<Eigen::MatrixXd> llt;
    auto factorize = [&]() {
      Eigen::MatrixXd K = H;
      K.diagonal().array() += settings_.sigma;
      K.noalias() += A.transpose() * rho.asDiagonal() * A;
      llt.compute(K);
    };
    factorize();

    const double alpha = settings_.alpha;
    Eigen::VectorXd x_prev, y_prev;
    int it = 0;
    bool converged = false, infeasible = false;
    for (; it < max_iter; ++it) {
      x_prev = x;
      y_prev = y;

      Eigen::VectorXd rhs = settings_.sigma * x - p.g;
      rhs.noalias() += A.transpose() * (rho.cwiseProduct(z) - y);
      const Eigen::VectorXd x_tilde = llt.solve(rhs);
      const Eigen::VectorXd z_tilde = A * x_tilde;

      x = alpha * x_tilde + (1.0 - alpha) * x;
      const Eigen::VectorXd z_mix = alpha * z_tilde + (1.0 - alpha) * z;
      Eigen::VectorXd z_new = z_mix + y.cwiseQuotient(rho);
      for (Eigen::Index i = 0; i < m; ++i) z_new(i) = std::clamp(z_new(i), l(i), u(i));
      y += rho.cwiseProduct(z_mix - z_new);
      z = z_new;

      if ((it + 1) % settings_.check_interval == 0 || it + 1 == max_iter) {
        const Eigen::VectorXd Ax = A * x;
        const Eigen::VectorXd Hx = H * x;
        const Eigen::VectorXd Aty = A.transpose() * y;
        const double rp = (Ax - z).cwiseAbs().maxCoeff();
        const double rd = (Hx + p.g + Aty).cwiseAbs().maxCoeff();
        const double sp = std::max({1.0, Ax.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff()});
        const double sd = std::max({1.0, Hx.cwiseAbs().maxCoeff(), Aty.cwiseAbs().maxCoeff(),
                                    p.g.cwiseAbs().maxCoeff()});
        if (rp <= tol * sp && rd <= tol * sd) {
          converged = true;
          ++it;
          break;
        }
        if (primal_infeasibility_certificate(A, l, u, y - y_prev)) {
          infeasible = true;
          ++it;
          break;
        }
        if (settings_.adaptive_rho) {
          const double ratio = std::sqrt((rp / sp) / std::max(rd / sd, 1e-16));
          if (ratio > 5.0 || ratio < 0.2) {
            rho_bar = std::clamp(rho_bar * ratio, 1e-6, 1e6);
            fill_rho(rho_bar);
            factorize();
          }
        }
      }
    }

    sol.iterations = it;
    sol.x = x;
    sol.lambda_eq = y.head(me);
    sol.mu_in = y.tail(mi);
    if (infeasible) {
      sol.status = QPStatus::infeasible;
      return sol;
    }
    sol.status = converged ? QPStatus::optimal : QPStatus::max_iter;

    if (settings_.polish && converged) polish(p, H, A, l, u, z, sol);

    warm_x_ = sol.x;
    warm_y_.resize(m);
    warm_y_.head(me) = sol.lambda_eq;
    warm_y_.tail(mi) = sol.mu_in;
    warm_z_ = A * sol.x;
    for (Eigen::Index i = 0; i < m; ++i) warm_z_(i) = std::clamp(warm_z_(i), l(i), u(i));
    have_warm_ = true;

    compute_residuals(p, H, sol);
    if (sol.status == QPStatus::optimal) {
      const double worst =
          std::max({sol.stationarity, sol.primal_residual, sol.dual_residual});
      if (worst > 10.0 * tol * residual_scale(p, sol)) sol.status = QPStatus::max_iter;
    }
    return sol;
  }

 private:
  static bool primal_infeasibility_certificate(const Eigen::MatrixXd& A, const Eigen::VectorXd& l,
                                               const Eigen::VectorXd& u, const Eigen::VectorXd& dy,
                                               double eps = 1e-5) {
    const double dy_norm = dy.cwiseAbs().maxCoeff();
    if (dy_norm < 1e-12) return false;
    if ((A.transpose() * dy).cwiseAbs().maxCoeff() > eps * dy_norm) return false;
    double support = 0.0;
    for (Eigen::Index i = 0; i < dy.size(); ++i) {
      const double dp = std::max(dy(i), 0.0), dm = std::min(dy(i), 0.0);
      if (dp > eps * dy_norm && std::isinf(u(i))) return false;
      if (dm < -eps * dy_norm && std::isinf(l(i))) return false;
      if (!std::isinf(u(i))) support += u(i) * dp;
      if (!std::isinf(l(i))) support += l(i) * dm;
    }
    return support < -eps * dy_norm;
  }

  /// Equality-constrained re-solve on the detected active set, with iterative refinement.
  void polish(const QPProblem& p, const Eigen::MatrixXd& H, const Eigen::MatrixXd& A,
              const Eigen::VectorXd& l, const Eigen::VectorXd& u, const Eigen::VectorXd& z,
              QPSolution& sol) const {
    const Eigen::Index n = p.n(), me = p.m_eq(), m = A.rows();
    Eigen::VectorXd y(m);
    y.head(me) = sol.lambda_eq;
    y.tail(m - me) = sol.mu_in;

    std::vector<Eigen::Index> act;
    std::vector<double> act_rhs;
    const double eps_act = 1e-7 * std::max(1.0, y.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m; ++i) {
      if (l(i) == u(i)) {
        act.push_back(i);
        act_rhs.push_back(l(i));
      } else if (y(i) < -eps_act || (std::isfinite(l(i)) && z(i) - l(i) < 1e-9)) {
        act.push_back(i);
        act_rhs.push_back(l(i));
      } else if (y(i) > eps_act || (std::isfinite(u(i)) && u(i) - z(i) < 1e-9)) {
        act.push_back(i);
        act_rhs.push_back(u(i));
      }
    }
    const Eigen::Index ma = static_cast<Eigen::Index>(act.size());
    if (ma > n + m) return;

    Eigen::MatrixXd G(ma, n);
    Eigen::VectorXd b(ma);
    for (Eigen::Index k = 0; k < ma; ++k) {
      G.row(k) = A.row(act[k]);
      b(k) = act_rhs[k];
    }

    const double delta = 1e-9;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + ma, n + ma);
    K.topLeftCorner(n, n) = H;
    K.topLeftCorner(n, n).diagonal().array() += delta;
    K.topRightCorner(n, ma) = G.transpose();
    K.bottomLeftCorner(ma, n) = G;
    K.bottomRightCorner(ma, ma).diagonal().array() -= delta;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    Eigen::VectorXd rhs(n + ma);
    rhs.head(n) = -p.g;
    rhs.tail(ma) = b;
    Eigen::VectorXd s = lu.solve(rhs);
    for (int sweep = 0; sweep < 3; ++sweep) {  // refine against the unregularized KKT
      Eigen::VectorXd r(n + ma);
      r.head(n) = -p.g - H * s.head(n) - G.transpose() * s.tail(ma);
      r.tail(ma) = b - G * s.head(n);
      s += lu.solve(r);
    }

    QPSolution cand = sol;
    cand.x = s.head(n);
    Eigen::VectorXd y_new = Eigen::VectorXd::Zero(m);
    for (Eigen::Index k = 0; k < ma; ++k) y_new(act[k]) = s(n + k);
    cand.lambda_eq = y_new.head(me);
    cand.mu_in = y_new.tail(m - me);

    compute_residuals(p, H, cand);
    compute_residuals(p, H, sol);
    const double worst_cand = std::max({cand.stationarity, cand.primal_residual, cand.dual_residual});
    const double worst_cur = std::max({sol.stationarity, sol.primal_residual, sol.dual_residual});
    if (worst_cand <= worst_cur) {
      cand.polished = true;
      sol = cand;
    }
  }

  static double residual_scale(const QPProblem& p, const QPSolution& sol) {
    double s = std::max(1.0, p.g.cwiseAbs().maxCoeff());
    s = std::max(s, (p.H * sol.x).cwiseAbs().maxCoeff());
    return s;
  }

  static void compute_residuals(const QPProblem& p, const Eigen::MatrixXd& H_reg,
                                QPSolution& sol) {
    (void)H_reg;
    const Eigen::Index me = p.m_eq(), mi = p.m_in();
    Eigen::VectorXd grad = p.H * sol.x + p.g;
    if (me > 0) grad.noalias() += p.A_eq.transpose() * sol.lambda_eq;
    if (mi > 0) grad.noalias() += p.A_in.transpose() * sol.mu_in;
    sol.stationarity = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;

    double prim = 0.0, dual = 0.0, comp = 0.0;
    if (me > 0) prim = (p.A_eq * sol.x - p.b_eq).cwiseAbs().maxCoeff();
    if (mi > 0) {
      const Eigen::VectorXd ax = p.A_in * sol.x;
      for (Eigen::Index i = 0; i < mi; ++i) {
        if (std::isfinite(p.lb(i))) prim = std::max(prim, p.lb(i) - ax(i));
        if (std::isfinite(p.ub(i))) prim = std::max(prim, ax(i) - p.ub(i));
        const double mu = sol.mu_in(i);
        // dual feasibility: μ ≥ 0 needs a finite upper bound, μ ≤ 0 a finite lower bound
        if (mu > 0 && !std::isfinite(p.ub(i))) dual = std::max(dual, mu);
        if (mu < 0 && !std::isfinite(p.lb(i))) dual = std::max(dual, -mu);
        if (mu > 0 && std::isfinite(p.ub(i))) comp = std::max(comp, mu * std::abs(p.ub(i) - ax(i)));
        if (mu < 0 && std::isfinite(p.lb(i))) comp = std::max(comp, -mu * std::abs(ax(i) - p.lb(i)));
      }
    }
    sol.primal_residual = prim;
    sol.dual_residual = dual;
    sol.complementarity = comp;
  }

  QPSettings settings_;
  bool have_warm_{false};
  Eigen::VectorXd warm_x_, warm_y_, warm_z_;
};

/// One-shot solve with default settings.
inline QPSolution solve_qp(const QPProblem& p, double tol = 1e-6, int max_iter = 4000) {
  QPSolver solver;
  return solver.solve(p, tol, max_iter);
}

}  // namespace tandem::qp
