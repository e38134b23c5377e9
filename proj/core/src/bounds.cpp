#include "axda/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "axda/numerics.hpp"

namespace axda {

namespace {

constexpr int kGridPoints = 2001;
constexpr double kGridHalfWidth = 50.0;  // in units of the local curvature

// After x = e^t the integrand of the D_{-d} integral is exp(g(t)) with
//   g(t) = d t - z e^t - e^{2t}/2,
// whose mode solves x^2 + z x - d = 0.
double integrand_mode(double d, double z) {
  return (-z + std::sqrt(z * z + 4 * d)) / 2;
}

double curvature_scale(double d, double z) {
  double x = integrand_mode(d, z);
  return 1.0 / std::sqrt(z * x + 2 * x * x);
}

// log of int exp(d t - z e^t - e^{2t}/2) dt over a trapezoid grid on
// [lo, hi]; the result includes the log of the grid spacing.
double log_integral_on_grid(double d, double z, double lo, double hi, int n) {
  double h = (hi - lo) / (n - 1);
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double t = lo + i * h;
    double x = std::exp(t);
    g[i] = d * t - z * x - 0.5 * x * x;
    m = std::max(m, g[i]);
  }
  double s = 0;
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * std::exp(g[i] - m);
  }
  return m + std::log(s) + std::log(h);
}

}  // namespace

double log_parabolic_cylinder(double d, double z) {
  if (!(d > 0)) throw std::domain_error("log_parabolic_cylinder: d <= 0");
  double tstar = std::log(integrand_mode(d, z));
  double sig = curvature_scale(d, z);
  double lo = tstar - kGridHalfWidth * sig;
  double hi = tstar + kGridHalfWidth * sig;
  return -z * z / 4 - std::lgamma(d) +
         log_integral_on_grid(d, z, lo, hi, kGridPoints);
}

double log_pcf_ratio(double d, double z) {
  if (!(d > 0)) throw std::domain_error("log_pcf_ratio: d <= 0");
  if (z == 0) return 0.0;
  // One grid spanning both modes; the trapezoid error then cancels in the
  // difference, which matters when z is tiny and the ratio is 1 - O(z).
  double tp = std::log(integrand_mode(d, std::abs(z)));
  double tm = std::log(integrand_mode(d, -std::abs(z)));
  double sig = std::max(curvature_scale(d, std::abs(z)),
                        curvature_scale(d, -std::abs(z)));
  double lo = std::min(tp, tm) - kGridHalfWidth * sig;
  double hi = std::max(tp, tm) + kGridHalfWidth * sig;
  int n = 2 * kGridPoints - 1;
  double la = log_integral_on_grid(d, z, lo, hi, n);
  double lb = log_integral_on_grid(d, -z, lo, hi, n);
  return la - lb;
}

double tv_bound_lipschitz(std::span<const LipschitzBlock> blocks, double d) {
  if (blocks.empty())
    throw std::domain_error("tv_bound_lipschitz: no blocks given");
  double log_prod = 0;
  for (const auto& b : blocks) {
    if (b.lipschitz < 0 || b.rho < 0)
      throw std::domain_error("tv_bound_lipschitz: negative constant");
    log_prod += log_pcf_ratio(d, b.lipschitz * b.rho);
  }
  return std::clamp(-std::expm1(log_prod), 0.0, 1.0);
}

double tv_bound_lipschitz_asymptote(double lipschitz, double rho, double d) {
  double logc = std::log(2.0) + 0.5 * std::log(2.0) +
                std::lgamma((d + 1) / 2) - std::lgamma(d / 2);
  return rho * lipschitz * std::exp(logc);
}

double tv_bound_smooth_convex_raw(const RegularityProfile& rp, double rho) {
  if (!rp.grad_lipschitz || !rp.grad_second_moment || !rp.convex)
    throw std::invalid_argument(
        "tv_bound_smooth_convex: needs grad_lipschitz, grad_second_moment and "
        "convexity");
  double M = *rp.grad_lipschitz, Ms = *rp.grad_second_moment;
  double r2M = 2 * rho * rho * M;
  double y = rho * rho * rho * rho * M * Ms / (1 + r2M);
  // 1 - (1+2 rho^2 M)^{-d/2} (1 - y), evaluated with log1p for small rho
  if (y < 1) {
    return -std::expm1(-0.5 * rp.dim * std::log1p(r2M) + std::log1p(-y));
  }
  return 1 + std::exp(-0.5 * rp.dim * std::log1p(r2M)) * (y - 1);
}

double tv_bound_smooth_convex(const RegularityProfile& rp, double rho) {
  return std::clamp(tv_bound_smooth_convex_raw(rp, rho), 0.0, 1.0);
}

double tv_bound_smooth_convex_asymptote(const RegularityProfile& rp,
                                        double rho) {
  if (!rp.grad_lipschitz)
    throw std::invalid_argument("asymptote needs grad_lipschitz");
  return rho * rho * rp.dim * *rp.grad_lipschitz;
}

std::optional<double> wasserstein_bound(KernelFamily k, int d, int p,
                                        double rho) {
  auto m = kernel_moment(k, d, p);
  if (!m) return std::nullopt;
  return rho * *m;
}

namespace {

double log_n_rho(double lipschitz, double d, double rho) {
  return (d / 2 - 1) * std::log(2.0) + std::lgamma(d / 2) - std::lgamma(d) -
         lipschitz * lipschitz * rho * rho / 4;
}

}  // namespace

std::pair<double, double> potential_gap_bounds(double lipschitz, double d,
                                               double rho) {
  if (lipschitz < 0 || rho < 0)
    throw std::domain_error("potential_gap_bounds: negative constant");
  double ln = log_n_rho(lipschitz, d, rho);
  double lo = ln - log_parabolic_cylinder(d, -lipschitz * rho);
  double hi = ln - log_parabolic_cylinder(d, lipschitz * rho);
  return {lo, hi};
}

std::pair<double, double> coverage_interval(double lipschitz, double d,
                                            double rho, double alpha) {
  if (!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("coverage_interval: alpha outside (0,1)");
  double ln = log_n_rho(lipschitz, d, rho);
  double lo =
      (1 - alpha) * std::exp(ln - log_parabolic_cylinder(d, -lipschitz * rho));
  double hi = std::min(
      1.0,
      (1 - alpha) * std::exp(ln - log_parabolic_cylinder(d, lipschitz * rho)));
  return {lo, hi};
}

BoundReport evaluate_bounds(const RegularityProfile& rp, double rho,
                            KernelFamily kernel, int wasserstein_order,
                            double alpha) {
  BoundReport rep;
  rep.rho = rho;
  double d = rp.dim;
  if (rp.lipschitz) {
    LipschitzBlock b{*rp.lipschitz, rho};
    rep.tv_lipschitz = tv_bound_lipschitz(std::span(&b, 1), d);
    rep.tv_lipschitz_asymptote =
        tv_bound_lipschitz_asymptote(*rp.lipschitz, rho, d);
    rep.potential_gap = potential_gap_bounds(*rp.lipschitz, d, rho);
    rep.coverage = coverage_interval(*rp.lipschitz, d, rho, alpha);
  }
  if (rp.convex && rp.grad_lipschitz && rp.grad_second_moment) {
    rep.tv_smooth = tv_bound_smooth_convex(rp, rho);
    rep.tv_smooth_asymptote = tv_bound_smooth_convex_asymptote(rp, rho);
  }
  rep.wasserstein_p = wasserstein_bound(kernel, rp.dim, wasserstein_order, rho);
  return rep;
}

double bregman_bias_leading(const Eigen::MatrixXd& hessian_pi,
                            const Eigen::MatrixXd& hessian_div, double rho) {
  if (hessian_pi.rows() != hessian_pi.cols() ||
      hessian_div.rows() != hessian_div.cols() ||
      hessian_pi.rows() != hessian_div.rows())
    throw std::invalid_argument("bregman_bias_leading: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(hessian_div);
  if (llt.info() != Eigen::Success)
    throw std::domain_error(
        "bregman_bias_leading: divergence Hessian not positive definite");
  return 0.5 * rho * llt.solve(hessian_pi).trace();
}

}  // namespace axda
