#ifndef AXDA_SAMPLERS_HPP
#define AXDA_SAMPLERS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "axda/rng.hpp"

namespace axda {

// ---------------------------------------------------------------------------
// Random-variate generators
// ---------------------------------------------------------------------------

// InverseGaussian(mu, lambda) via the transformation-with-uniform-correction
// method; draws are strictly positive.
double sample_inverse_gaussian(double mu, double lambda, RngStream& rng);

// Exact draw from a log-concave density exp(-neg_log_density(z)) on the real
// line by rejection from a piecewise-exponential upper hull.  The hull is
// built from chords through evaluated points (valid for any concave
// log-density, kinks included), starting from {mode-1, mode, mode+1} and
// refined with every rejected abscissa.
double sample_log_concave_1d(const std::function<double(double)>& neg_log_density,
                             double mode_hint, RngStream& rng);

// One-sided truncated normal on [lo, inf).
double sample_truncated_normal_lower(double mu, double sigma, double lo,
                                     RngStream& rng);

// Exact draw from N(Q^{-1} b, Q^{-1}) for SPD precision Q via Cholesky.
Eigen::VectorXd sample_gaussian_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear_term,
                                          RngStream& rng);

// Exact draw from the circulant-precision Gaussian
//   N(P^{-1} b, P^{-1}),  P = I/eta + D^T D / rho^2,
// where D stacks the two periodic first-difference operators of an h x w
// image.  O(hw log hw) per draw through the 2-D DFT.  Instances hold FFTW
// plans and are not safe for concurrent draws.
class CirculantGaussianSampler {
 public:
  CirculantGaussianSampler(int height, int width, double eta, double rho);
  ~CirculantGaussianSampler();
  CirculantGaussianSampler(const CirculantGaussianSampler&) = delete;
  CirculantGaussianSampler& operator=(const CirculantGaussianSampler&) = delete;

  Eigen::VectorXd draw(const Eigen::VectorXd& linear_term, RngStream& rng);
  // Deterministic part P^{-1} b only (for cross-validation against dense solves).
  Eigen::VectorXd mean(const Eigen::VectorXd& linear_term);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd sample_gaussian_circulant_fft(int height, int width,
                                              double eta, double rho,
                                              const Eigen::VectorXd& linear_term,
                                              RngStream& rng);

// ---------------------------------------------------------------------------
// Generic split-Gibbs engine
// ---------------------------------------------------------------------------

struct GaussianCoupling {
  Eigen::MatrixXd A;  // block operator, maps theta-space to block space
  double rho;         // Gaussian tolerance of the block
};

struct SplitBlock {
  int z_dim = 0;
  int latent_dim = 0;  // model-specific extras (e.g. mixing weights)
  // Draws z_j ~ pi_rho(z_j | theta); may read/update the latent vector.
  std::function<void(const Eigen::VectorXd& theta, Eigen::VectorXd& z,
                     Eigen::VectorXd& latent, RngStream& rng)>
      sample_z;
  // Set when kappa_rho is Gaussian with an explicit operator; enables the
  // quadratic M-step of MCEM and the penalty formulation.
  std::optional<GaussianCoupling> coupling;
  // f_j, used for objective traces; optional.
  std::function<double(const Eigen::VectorXd& z)> potential;
};

struct ThetaPriorQuadratic {
  Eigen::MatrixXd precision;  // P0
  Eigen::VectorXd linear;     // b0:  exp(-theta' P0 theta / 2 + b0' theta)
};

struct SplitModel {
  int theta_dim = 0;
  std::vector<SplitBlock> blocks;
  // Draws theta ~ pi_rho(theta | z_{1:J}); receives the previous theta so
  // exact-DA kernels (which are theta-dependent) fit the same interface.
  std::function<Eigen::VectorXd(const Eigen::VectorXd& theta_prev,
                                const std::vector<Eigen::VectorXd>& z,
                                RngStream& rng)>
      sample_theta;
  // f(theta) of the original target, for potential traces; optional.
  std::function<double(const Eigen::VectorXd& theta)> target_potential;
  // Quadratic theta-side terms kept out of the splitting (likelihood or
  // prior); used by MCEM's M-step.
  std::optional<ThetaPriorQuadratic> theta_prior;
};

struct GibbsState {
  Eigen::VectorXd theta;
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> latent;
};

GibbsState initial_state(const SplitModel& model);

struct GibbsOptions {
  long iters = 1000;
  long burnin = -1;  // default iters/2
  int thinning = 1;
  std::uint64_t seed = 0;
  bool parallel_blocks = false;
};

struct ChainOutput {
  Eigen::MatrixXd samples;  // one stored theta draw per row
  std::vector<double> potential_trace;
  std::uint64_t seed = 0;
  long iters = 0;
  long burnin = 0;
  int thinning = 1;
};

bool bitwise_equal(const ChainOutput& a, const ChainOutput& b);

// Alternates theta ~ pi_rho(theta | z) and z_j ~ pi_rho(z_j | theta).
// Streams are derived per (seed, block, iteration), so serial and
// block-parallel execution produce bit-identical output.
ChainOutput run_split_gibbs(const SplitModel& model, GibbsState state,
                            const GibbsOptions& opts);

// ---------------------------------------------------------------------------
// Chain diagnostics
// ---------------------------------------------------------------------------

// Effective sample size with Geyer's initial-positive-sequence truncation.
// A constant series returns 1 by convention.
double ess(std::span<const double> series);

// One-sided Monte-Carlo total-variation estimate
//   (1/n) sum max(0, 1 - exp(log_pi_rho - log_pi))  over draws from pi.
// Both log-densities must be normalized.
double estimate_tv_mc(const std::function<double(const Eigen::VectorXd&)>& log_pi,
                      const std::function<double(const Eigen::VectorXd&)>& log_pi_rho,
                      const std::function<Eigen::VectorXd(RngStream&)>& sampler_pi,
                      long n_samples, RngStream& rng);

// Empirical (1-alpha) quantile of potential values: the MC estimate of the
// HPD threshold gamma_alpha.
double hpd_threshold(std::span<const double> potential_values, double alpha);

}  // namespace axda

#endif
