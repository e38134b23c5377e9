#ifndef AXDA_BOUNDS_HPP
#define AXDA_BOUNDS_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>

#include "axda/kernels.hpp"

namespace axda {

// Regularity constants of the potential f = -log pi.
struct RegularityProfile {
  int dim = 1;
  std::optional<double> lipschitz;            // L_f
  std::optional<double> grad_lipschitz;       // M_f
  std::optional<double> grad_second_moment;   // E_pi ||grad f||^2
  bool convex = false;
};

// Evaluated non-asymptotic bounds at one tolerance.
struct BoundReport {
  double rho = 0;
  std::optional<double> tv_lipschitz;
  std::optional<double> tv_lipschitz_asymptote;
  std::optional<double> tv_smooth;
  std::optional<double> tv_smooth_asymptote;
  std::optional<double> wasserstein_p;
  std::optional<std::pair<double, double>> potential_gap;
  std::optional<std::pair<double, double>> coverage;
};

// log D_{-d}(z) where
//   D_{-d}(z) = exp(-z^2/4)/Gamma(d) * int_0^inf exp(-x z - x^2/2) x^{d-1} dx.
// The integral is evaluated on a mode-centered trapezoid grid after the
// substitution x = e^t, which keeps the integrand smooth and decaying at both
// ends for every d > 0.  Stable for d up to 1e6 and |z| up to 1e3.
double log_parabolic_cylinder(double d, double z);

// log[ D_{-d}(z) / D_{-d}(-z) ] computed on one shared grid so that the
// quadrature error cancels; the exp(-z^2/4) prefactors cancel exactly.
double log_pcf_ratio(double d, double z);

struct LipschitzBlock {
  double lipschitz;
  double rho;
};

// Theorem-1 / multi-split TV bound 1 - prod_j D_{-d}(L_j rho_j)/D_{-d}(-L_j rho_j).
// Values are already in [0,1]; a single block reproduces the one-split bound.
double tv_bound_lipschitz(std::span<const LipschitzBlock> blocks, double d);

// Small-rho asymptote rho L 2 sqrt(2) Gamma((d+1)/2) / Gamma(d/2).
double tv_bound_lipschitz_asymptote(double lipschitz, double rho, double d);

// Convex gradient-Lipschitz TV bound, clamped to [0,1].
double tv_bound_smooth_convex(const RegularityProfile& rp, double rho);
// Same without the clamp (the raw curve, which can exceed 1).
double tv_bound_smooth_convex_raw(const RegularityProfile& rp, double rho);
// Small-rho asymptote rho^2 d M_f.
double tv_bound_smooth_convex_asymptote(const RegularityProfile& rp,
                                        double rho);

// W_p(pi, pi_rho) <= rho m_p; nullopt when the kernel moment is undefined.
std::optional<double> wasserstein_bound(KernelFamily k, int d, int p,
                                        double rho);

// Uniform sandwich on potentials: L_rho <= f_rho - f <= U_rho.
std::pair<double, double> potential_gap_bounds(double lipschitz, double d,
                                               double rho);

// Coverage of a (1-alpha) credibility region of pi_rho under pi.
std::pair<double, double> coverage_interval(double lipschitz, double d,
                                            double rho, double alpha);

// Leading-order pointwise bias (rho/2) Trace(H_pi H_div^{-1}) for a
// divergence-built smoothing density.
double bregman_bias_leading(const Eigen::MatrixXd& hessian_pi,
                            const Eigen::MatrixXd& hessian_div, double rho);

// Evaluates every bound the profile supports at one tolerance: TV bounds and
// asymptotes when the constants are present, the Wasserstein bound for the
// given kernel and order, the potential gap and the coverage interval when a
// Lipschitz constant is known.
BoundReport evaluate_bounds(const RegularityProfile& rp, double rho,
                            KernelFamily kernel = KernelFamily::Gaussian,
                            int wasserstein_order = 2, double alpha = 0.05);

}  // namespace axda

#endif
