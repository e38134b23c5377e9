#ifndef AXDA_KERNELS_HPP
#define AXDA_KERNELS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "axda/rng.hpp"

namespace axda {

// Classical symmetric kernels K, coordinate-wise products in dimension d.
enum class KernelFamily {
  Gaussian,
  Cauchy,
  Laplace,
  Dirichlet,
  Uniform,
  Triangular,
  Epanechnikov
};

// Divergence sources phi(z, theta), strictly convex in z with minimum 0 at
// z = theta.  SquaredLoss is the Bregman divergence of psi(z) = z^2/2 and
// KullbackLeibler the Bregman divergence of psi(z) = z log z, so both vanish
// exactly at z = theta; AbsoluteLoss is not a Bregman divergence but is kept
// as a generic divergence source.
enum class DivergenceFamily {
  SquaredLoss,
  AbsoluteLoss,
  LogisticLoss,
  ItakuraSaito,
  KullbackLeibler
};

// Normalized univariate kernel log-density log K(u).
double kernel_log_density(KernelFamily k, double u);

// Whether K is exactly zero outside [-1,1].
bool kernel_compact_support(KernelFamily k);

// One draw from the univariate kernel.  Dirichlet has no sampler.
double kernel_sample(KernelFamily k, RngStream& rng);

// m_p = (int ||u||_2^p K(u) du)^{1/p} for the d-dimensional product kernel.
// Closed form for p = 2 (Table of second moments); p != 2 by adaptive
// quadrature in d = 1 and by fixed-seed Monte Carlo in d > 1.  nullopt when
// the moment does not exist (Cauchy, Dirichlet).
std::optional<double> kernel_moment(KernelFamily k, int d, int p);

// Coordinate-wise divergence term; throws std::domain_error outside the
// family's domain.
double bregman_univariate(DivergenceFamily f, double z, double theta);

// d_psi(z, theta), summed over coordinates.
double eval_bregman(DivergenceFamily f, std::span<const double> z,
                    std::span<const double> theta);

struct DivergenceDomain {
  double lo, hi;  // open interval for z and theta
};
DivergenceDomain divergence_domain(DivergenceFamily f);

// The coupling density kappa_rho(z, theta):
//   kernel source:      kappa_rho(z,theta) = rho^{-d} K(rho^{-1}(theta - z))
//   divergence source:  kappa_rho(z,theta) prop. exp(-phi(z,theta)/rho)
class SmoothingDensity {
 public:
  static SmoothingDensity kernel(KernelFamily k, double rho, int dim);
  static SmoothingDensity divergence(DivergenceFamily f, double rho, int dim);

  bool is_kernel() const { return is_kernel_; }
  KernelFamily kernel_family() const;
  DivergenceFamily divergence_family() const;
  double rho() const { return rho_; }
  int dim() const { return dim_; }

  // log kappa_rho(z, theta), normalized as a density in z.
  double log_density(std::span<const double> z,
                     std::span<const double> theta) const;

  // One draw z ~ kappa_rho(., theta); unsupported sources throw.
  std::vector<double> sample(std::span<const double> theta,
                             RngStream& rng) const;

 private:
  SmoothingDensity(bool k, int fam, double rho, int dim);
  double divergence_log_normalizer(double theta) const;

  struct NormalizerCache {
    std::mutex mutex;
    std::map<double, double> values;  // theta -> log Z
  };

  bool is_kernel_;
  int family_;
  double rho_;
  int dim_;
  std::shared_ptr<NormalizerCache> cache_;  // shared by copies (same rho)
};

double eval_log_kappa(const SmoothingDensity& sd, std::span<const double> z,
                      std::span<const double> theta);
std::vector<double> sample_kappa(const SmoothingDensity& sd,
                                 std::span<const double> theta,
                                 RngStream& rng);

}  // namespace axda

#endif
