#ifndef AXDA_MODELS_HPP
#define AXDA_MODELS_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "axda/optimize.hpp"
#include "axda/samplers.hpp"

namespace axda {

// ---------------------------------------------------------------------------
// Multivariate Gaussian target
// ---------------------------------------------------------------------------

struct GaussianTarget {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// pi_rho = N(mu, Sigma + rho^2 I) under Gaussian smoothing.
GaussianTarget gaussian_marginal_exact(const GaussianTarget& t, double rho);

// Exact W2(pi, pi_rho) from the commuting-covariance Gaussian formula,
//   W2^2 = sum_i (sqrt(lambda_i + rho^2) - sqrt(lambda_i))^2.
double gaussian_w2_exact(const GaussianTarget& t, double rho);

// The expression printed in the source material,
// Trace(Sigma + rho^2 I - 2 rho Sigma^{1/2}), reported side by side; it
// equals the W2 between N(mu, Sigma) and N(mu, rho^2 I).
double gaussian_w2_paper_formula(const GaussianTarget& t, double rho);

// Squared-exponential covariance on d regularly spaced points of [-3,3]:
// Sigma_ij = 2 exp(-(s_i - s_j)^2 / (2 a^2)) + 1e-6 delta_ij.
Eigen::MatrixXd squared_exponential_covariance(int d, double a = 1.5);

// ---------------------------------------------------------------------------
// Generalized lasso
// ---------------------------------------------------------------------------

struct LassoTarget {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd B;
  double tau = 1;
  double sigma = 1;
};

// Full potential ||y - X theta||^2/(2 sigma^2) + tau ||B theta||_1.
double lasso_potential(const LassoTarget& t, const Eigen::VectorXd& theta);
// Prior part g(theta) = tau ||B theta||_1.
double lasso_prior_potential(const LassoTarget& t, const Eigen::VectorXd& theta);

// Closed form of the Gaussian-smoothed prior potential g_rho(theta);
// the scaled complementary error function keeps it finite everywhere.
double lasso_smoothed_potential(const LassoTarget& t,
                                const Eigen::VectorXd& theta, double rho);

// Exact draw from the coordinate conditional
//   p(z) prop. exp(-tau |z| - (mu - z)^2 / (2 rho^2))
// by composing the two half-Gaussian branches with erfc branch weights.
double sample_lasso_z_conditional(double mu, double tau, double rho,
                                  RngStream& rng);

// Two-conditional split model: theta | z Gaussian with precision
// X'X/sigma^2 + B'B/rho^2, z | theta coordinate-wise soft-thresholded
// Gaussian mixture.
SplitModel lasso_split_model(const LassoTarget& t, double rho);

// Penalty formulation with the likelihood and the l1 prior as blocks;
// z-minimizers are closed form (ridge shrink and soft-threshold).
PenaltyProblem lasso_penalty_problem(const LassoTarget& t, double rho);

// ---------------------------------------------------------------------------
// Total-variation image inpainting
// ---------------------------------------------------------------------------

struct InpaintingModel {
  Eigen::VectorXd y;          // observed pixel values, length n
  std::vector<int> mask;      // indices of observed pixels, unique, n < d
  int height = 0, width = 0;  // d = height * width
  double sigma = 7e-2;
  double tau = 5;
  double rho = 0.1;
  double eta = 0;  // 0 -> default 0.9 sigma^2 (binary mask: ||H'H||_S = 1)
};

double inpainting_eta(const InpaintingModel& m);
void validate(const InpaintingModel& m);

// Periodic first differences D1 (vertical), D2 (horizontal) and the adjoint.
void image_gradient(int height, int width, const Eigen::VectorXd& theta,
                    Eigen::VectorXd& d1, Eigen::VectorXd& d2);
Eigen::VectorXd image_gradient_adjoint(int height, int width,
                                       const Eigen::VectorXd& z1,
                                       const Eigen::VectorXd& z2);

// ||y - H theta||^2/(2 sigma^2) + tau sum_i ||(D theta)_i||_2.
double inpainting_potential(const InpaintingModel& m,
                            const Eigen::VectorXd& theta);

// Inverse-Gaussian data augmentation for the gradient-field conditional:
// draws 1/gamma_i ~ InverseGaussian(tau/||Z_i||, tau^2) (fallback
// InverseGaussian(3/2, tau^2/2) at ||Z_i|| = 0), then both gradient
// components from their Gaussian conditionals.
void inpainting_step_z(const InpaintingModel& m, const Eigen::VectorXd& theta,
                       Eigen::VectorXd& z1, Eigen::VectorXd& z2,
                       Eigen::VectorXd& gamma, RngStream& rng);

// Exact-DA theta step: auxiliary v ~ N((I/eta - H'H/sigma^2) theta_prev, .)
// then the circulant FFT draw with precision I/eta + D'D/rho^2 and linear
// term v + H'y/sigma^2 + D'Z/rho^2.
Eigen::VectorXd inpainting_step_theta(const InpaintingModel& m,
                                      CirculantGaussianSampler& sampler,
                                      const Eigen::VectorXd& z1,
                                      const Eigen::VectorXd& z2,
                                      const Eigen::VectorXd& theta_prev,
                                      RngStream& rng);

// Wires both steps into the generic engine; the gradient field is block 0's
// z (stacked [z1; z2]) and gamma its latent vector.
SplitModel inpainting_split_model(std::shared_ptr<InpaintingModel> m);

// Oracle variant whose theta step samples from the dense precision
// H'H/sigma^2 + D'D/rho^2 directly (small images only).
SplitModel inpainting_split_model_dense(std::shared_ptr<InpaintingModel> m);

// ---------------------------------------------------------------------------
// Penalized logistic regression
// ---------------------------------------------------------------------------

struct LogisticModel {
  Eigen::VectorXd y;  // labels in {-1, +1}
  Eigen::MatrixXd X;  // n x d features
  double tau = 1;     // Gaussian prior precision 2 tau
  double rho = 1;
  // The source material writes the likelihood potential log(1+exp(+y t));
  // flip_sign switches to the conventional log(1+exp(-y t)).
  bool flip_sign = false;
};

double logistic_block_potential(const LogisticModel& m, int j, double zj);
double logistic_potential(const LogisticModel& m, const Eigen::VectorXd& theta);

// J = n scalar blocks with A_j = x_j', z-conditionals sampled by adaptive
// log-concave rejection; theta | z Gaussian with precision 2 tau I + X'X/rho^2.
SplitModel logistic_split_model(const LogisticModel& m);

// Penalty formulation: n scalar likelihood blocks (guarded 1-D Newton
// minimizers) plus the quadratic ridge block.
PenaltyProblem logistic_penalty_problem(const LogisticModel& m);

// ---------------------------------------------------------------------------
// Lipschitz loss library
// ---------------------------------------------------------------------------

enum class LossTag { Hinge, Huber, Logistic, Pinball, Absolute };

struct LipschitzLoss {
  LossTag tag = LossTag::Hinge;
  double delta = 1.0;        // Huber
  double pinball_tau = 0.5;  // Pinball, in (0,1)
};

struct LossValue {
  double value;
  double lipschitz_in_t;
};

LossValue loss_eval(const LipschitzLoss& l, double y, double t);

}  // namespace axda

#endif
