#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qp_reference.hpp"
#include "tandem/qp/solver.hpp"

using namespace tandem::qp;

namespace {
QPProblem empty_problem(int n) {
  QPProblem p;
  p.H = Eigen::MatrixXd::Identity(n, n);
  p.g = Eigen::VectorXd::Zero(n);
  p.A_eq.resize(0, n);
  p.b_eq.resize(0);
  p.A_in.resize(0, n);
  p.lb.resize(0);
  p.ub.resize(0);
  return p;
}
}  // namespace

TEST_CASE("clipped unconstrained optimum: min ½x² s.t. x ≥ 1") {
  QPProblem p = empty_problem(1);
  p.A_in = Eigen::MatrixXd::Ones(1, 1);
  p.lb = Eigen::VectorXd::Ones(1);
  p.ub = Eigen::VectorXd::Constant(1, kInf);
  const QPSolution s = solve_qp(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.x(0) == Catch::Approx(1.0).margin(1e-6));
  CHECK(s.stationarity <= 1e-6);
}

TEST_CASE("hand KKT: min ½‖x‖² − [1,1]ᵀx s.t. x₁+x₂ = 1") {
  QPProblem p = empty_problem(2);
  p.g = Eigen::Vector2d(-1.0, -1.0);
  p.A_eq = Eigen::MatrixXd::Ones(1, 2);
  p.b_eq = Eigen::VectorXd::Ones(1);
  const QPSolution s = solve_qp(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.x(0) == Catch::Approx(0.5).margin(1e-7));
  CHECK(s.x(1) == Catch::Approx(0.5).margin(1e-7));
  // stationarity: x - [1,1] + λ·[1,1] = 0 → λ = 0.5
  CHECK(s.lambda_eq(0) == Catch::Approx(0.5).margin(1e-6));
}

TEST_CASE("random strictly convex box QPs match projected-gradient reference") {
  std::mt19937 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    QPProblem p = empty_problem(n);
    p.H = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) p.g(i) = g(rng);
    p.A_in = Eigen::MatrixXd::Identity(n, n);
    p.lb = Eigen::VectorXd::Constant(n, -0.5);
    p.ub = Eigen::VectorXd::Constant(n, 0.5);

    const QPSolution s = solve_qp(p);
    REQUIRE(s.status == QPStatus::optimal);
    const Eigen::VectorXd ref =
        tandem::testing::projected_gradient_box_qp(p.H, p.g, p.lb, p.ub);
    CHECK((s.x - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("contradictory constraints certified infeasible") {
  QPProblem p = empty_problem(1);
  p.A_in = Eigen::MatrixXd::Ones(2, 1);
  p.lb.resize(2);
  p.ub.resize(2);
  p.lb << 1.0, -kInf;
  p.ub << kInf, 0.0;
  const QPSolution s = solve_qp(p);
  CHECK(s.status == QPStatus::infeasible);
}

TEST_CASE("KKT residuals certified on mixed random problems") {
  std::mt19937 rng(123);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> nd(2, 30);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = nd(rng);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    QPProblem p = empty_problem(n);
    p.H = M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) p.g(i) = g(rng);

    const int me = std::max(0, n / 4);
    p.A_eq.resize(me, n);
    p.b_eq.resize(me);
    for (int i = 0; i < me; ++i) {
      for (int j = 0; j < n; ++j) p.A_eq(i, j) = g(rng);
      p.b_eq(i) = 0.3 * g(rng);
    }
    p.A_in = Eigen::MatrixXd::Identity(n, n);
    p.lb = Eigen::VectorXd::Constant(n, -1.0);
    p.ub = Eigen::VectorXd::Constant(n, 1.0);

    const QPSolution s = solve_qp(p);
    REQUIRE(s.status == QPStatus::optimal);
    CHECK(s.stationarity <= 1e-6);
    CHECK(s.primal_residual <= 1e-6);
    CHECK(s.dual_residual <= 1e-6);
  }
}

TEST_CASE("determinism: identical problems give identical solutions") {
  QPProblem p = empty_problem(5);
  p.g = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  p.A_in = Eigen::MatrixXd::Identity(5, 5);
  p.lb = Eigen::VectorXd::Constant(5, -0.3);
  p.ub = Eigen::VectorXd::Constant(5, 0.3);
  const QPSolution a = solve_qp(p);
  const QPSolution b = solve_qp(p);
  REQUIRE(a.x.size() == b.x.size());
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warm start reuses previous state and converges faster or equal") {
  QPSolver solver;
  QPProblem p = empty_problem(8);
  p.g = Eigen::VectorXd::Constant(8, -1.0);
  p.A_in = Eigen::MatrixXd::Identity(8, 8);
  p.lb = Eigen::VectorXd::Constant(8, -2.0);
  p.ub = Eigen::VectorXd::Constant(8, 2.0);
  const QPSolution cold = solver.solve(p);
  p.g(0) = -1.001;  // nearby problem
  const QPSolution warm = solver.solve(p);
  REQUIRE(warm.status == QPStatus::optimal);
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("semidefinite Hessian is regularized, not crashed") {
  QPProblem p = empty_problem(2);
  p.H << 1.0, 0.0, 0.0, 0.0;  // rank deficient
  p.g = Eigen::Vector2d(0.0, 1.0);
  p.A_in = Eigen::MatrixXd::Identity(2, 2);
  p.lb = Eigen::VectorXd::Constant(2, -1.0);
  p.ub = Eigen::VectorXd::Constant(2, 1.0);
  const QPSolution s = solve_qp(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.x(1) == Catch::Approx(-1.0).margin(1e-5));
}
