#ifndef AXDA_OPTIMIZE_HPP
#define AXDA_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "axda/samplers.hpp"

namespace axda {

// One split block of the quadratic-penalty objective
//   sum_j f_j(z_j) + ||A_j theta - z_j||^2 / (2 rho_j^2).
struct PenaltyBlock {
  Eigen::MatrixXd A;
  double rho = 1;
  // prox_{rho2 f}(v) = argmin_z f(z) + ||v - z||^2 / (2 rho2)
  std::function<Eigen::VectorXd(const Eigen::VectorXd& v, double rho2)> prox;
  std::function<double(const Eigen::VectorXd& z)> f;
};

struct PenaltyProblem {
  int theta_dim = 0;
  std::vector<PenaltyBlock> blocks;
};

struct PenaltyResult {
  Eigen::VectorXd theta;
  std::vector<Eigen::VectorXd> z;
  std::vector<double> objective_trace;  // one entry per outer iteration
};

double penalty_objective(const PenaltyProblem& p, const Eigen::VectorXd& theta,
                         const std::vector<Eigen::VectorXd>& z,
                         double rho_scale = 1.0);

// Alternates the exact theta least-squares step with the exact per-block
// minimizations until the objective decrease drops below tol or max_outer is
// reached.  The trace is non-increasing by construction.  rho_scale
// multiplies every block tolerance (used by the continuation driver).
PenaltyResult quadratic_penalty_minimize(const PenaltyProblem& p,
                                         std::vector<Eigen::VectorXd> z0,
                                         long max_outer = 500,
                                         double tol = 1e-10,
                                         double rho_scale = 1.0,
                                         bool parallel_blocks = false);

struct ContinuationResult {
  PenaltyResult final;
  std::vector<double> rho_scales;
  std::vector<std::vector<double>> level_traces;
};

// Warm-started continuation over a decreasing schedule of rho scales; the
// last scale should be 1 so the final level solves the problem as given.
// Tiny tolerances need this: the fixed-rho alternation contracts at rate
// 1 - O(rho^2) and stalls if started cold.
ContinuationResult quadratic_penalty_continuation(
    const PenaltyProblem& p, std::span<const double> rho_scales,
    long max_outer_per_level = 200000, double tol = 1e-12);

struct McemOptions {
  int n_mc_per_estep = 100;
  long max_iters = 50;
  std::uint64_t seed = 0;
  bool parallel_blocks = false;
};

// Monte-Carlo EM on a split model with Gaussian couplings: the E-step
// estimates E[z_j | theta] with n_mc draws from each block conditional, the
// M-step solves the ridge least-squares
//   (P0 + sum_j A_j'A_j/rho_j^2) theta = b0 + sum_j A_j' E[z_j]/rho_j^2.
// Returns the theta iterates (row 0 is theta0).
Eigen::MatrixXd mcem_run(const SplitModel& model, const Eigen::VectorXd& theta0,
                         const McemOptions& opts);

}  // namespace axda

#endif
