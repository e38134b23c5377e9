#include "axda/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace axda {

double penalty_objective(const PenaltyProblem& p, const Eigen::VectorXd& theta,
                         const std::vector<Eigen::VectorXd>& z,
                         double rho_scale) {
  double acc = 0;
  for (std::size_t j = 0; j < p.blocks.size(); ++j) {
    const auto& b = p.blocks[j];
    double rho = b.rho * rho_scale;
    acc += b.f(z[j]) +
           (b.A * theta - z[j]).squaredNorm() / (2 * rho * rho);
  }
  return acc;
}

PenaltyResult quadratic_penalty_minimize(const PenaltyProblem& p,
                                         std::vector<Eigen::VectorXd> z0,
                                         long max_outer, double tol,
                                         double rho_scale,
                                         bool parallel_blocks) {
  const std::size_t J = p.blocks.size();
  if (J == 0) throw std::invalid_argument("penalty problem has no blocks");
  if (z0.size() != J)
    throw std::invalid_argument("penalty minimize: z0 size mismatch");

  // Normal matrix of the theta step, sum_j A_j'A_j / rho_j^2.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p.theta_dim, p.theta_dim);
  for (const auto& b : p.blocks) {
    double rho = b.rho * rho_scale;
    M += b.A.transpose() * b.A / (rho * rho);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  double dmin = ldlt.vectorD().minCoeff(), dmax = ldlt.vectorD().maxCoeff();
  if (ldlt.info() != Eigen::Success || dmin <= 1e-12 * std::max(dmax, 1.0))
    throw std::domain_error(
        "quadratic_penalty_minimize: theta normal matrix is rank-deficient");

  PenaltyResult res;
  res.z = std::move(z0);
  res.theta = Eigen::VectorXd::Zero(p.theta_dim);

  auto z_step = [&](std::size_t j) {
    const auto& b = p.blocks[j];
    double rho = b.rho * rho_scale;
    res.z[j] = b.prox(b.A * res.theta, rho * rho);
  };

  double prev = std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_outer; ++it) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.theta_dim);
    for (std::size_t j = 0; j < J; ++j) {
      double rho = p.blocks[j].rho * rho_scale;
      rhs += p.blocks[j].A.transpose() * res.z[j] / (rho * rho);
    }
    res.theta = ldlt.solve(rhs);

    if (!parallel_blocks || J < 2) {
      for (std::size_t j = 0; j < J; ++j) z_step(j);
    } else {
      unsigned n_threads = std::min<unsigned>(
          std::thread::hardware_concurrency(), static_cast<unsigned>(J));
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(n_threads);
      for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&, t]() {
          try {
            for (std::size_t j = t; j < J; j += n_threads) z_step(j);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    double obj = penalty_objective(p, res.theta, res.z, rho_scale);
    res.objective_trace.push_back(obj);
    if (prev - obj < tol) break;
    prev = obj;
  }
  return res;
}

ContinuationResult quadratic_penalty_continuation(
    const PenaltyProblem& p, std::span<const double> rho_scales,
    long max_outer_per_level, double tol) {
  if (rho_scales.empty())
    throw std::invalid_argument("continuation: empty schedule");
  ContinuationResult out;
  std::vector<Eigen::VectorXd> z;
  for (const auto& b : p.blocks)
    z.push_back(Eigen::VectorXd::Zero(b.A.rows()));
  for (double s : rho_scales) {
    PenaltyResult r =
        quadratic_penalty_minimize(p, std::move(z), max_outer_per_level, tol, s);
    out.rho_scales.push_back(s);
    out.level_traces.push_back(r.objective_trace);
    out.final = std::move(r);
    z = out.final.z;
  }
  return out;
}

Eigen::MatrixXd mcem_run(const SplitModel& model, const Eigen::VectorXd& theta0,
                         const McemOptions& opts) {
  const std::size_t J = model.blocks.size();
  if (J == 0) throw std::invalid_argument("mcem_run: model has no blocks");
  for (const auto& b : model.blocks)
    if (!b.coupling)
      throw std::invalid_argument(
          "mcem_run: every block needs a Gaussian coupling");

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(model.theta_dim, model.theta_dim);
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(model.theta_dim);
  if (model.theta_prior) {
    M += model.theta_prior->precision;
    b0 += model.theta_prior->linear;
  }
  for (const auto& b : model.blocks) {
    double r2 = b.coupling->rho * b.coupling->rho;
    M += b.coupling->A.transpose() * b.coupling->A / r2;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::domain_error("mcem_run: M-step normal matrix is rank-deficient");

  Eigen::MatrixXd trace(opts.max_iters + 1, model.theta_dim);
  trace.row(0) = theta0.transpose();
  Eigen::VectorXd theta = theta0;

  std::vector<Eigen::VectorXd> zbar(J);
  for (long t = 1; t <= opts.max_iters; ++t) {
    auto estep_block = [&](std::size_t j) {
      const auto& blk = model.blocks[j];
      RngStream rng = derive_stream(opts.seed, j, static_cast<std::uint64_t>(t));
      Eigen::VectorXd z = Eigen::VectorXd::Zero(blk.z_dim);
      Eigen::VectorXd latent = Eigen::VectorXd::Zero(blk.latent_dim);
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(blk.z_dim);
      for (int k = 0; k < opts.n_mc_per_estep; ++k) {
        blk.sample_z(theta, z, latent, rng);
        acc += z;
      }
      zbar[j] = acc / opts.n_mc_per_estep;
    };
    if (!opts.parallel_blocks || J < 2) {
      for (std::size_t j = 0; j < J; ++j) estep_block(j);
    } else {
      unsigned n_threads = std::min<unsigned>(
          std::thread::hardware_concurrency(), static_cast<unsigned>(J));
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(n_threads);
      for (unsigned th = 0; th < n_threads; ++th)
        pool.emplace_back([&, th]() {
          try {
            for (std::size_t j = th; j < J; j += n_threads) estep_block(j);
          } catch (...) {
            errors[th] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    Eigen::VectorXd rhs = b0;
    for (std::size_t j = 0; j < J; ++j) {
      double r2 = model.blocks[j].coupling->rho * model.blocks[j].coupling->rho;
      rhs += model.blocks[j].coupling->A.transpose() * zbar[j] / r2;
    }
    theta = ldlt.solve(rhs);
    trace.row(t) = theta.transpose();
  }
  return trace;
}

}  // namespace axda
