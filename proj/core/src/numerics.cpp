#include "axda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace axda {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double erfcx(double x) {
  if (x < 0) {
    // erfcx(x) = 2 exp(x^2) - erfcx(-x); overflows where the function does.
    return 2 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 6) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series 1/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k,
  // truncated at the smallest term.  Relative error < 3e-16 for x >= 6.
  const double inv2x2 = 1.0 / (2 * x * x);
  double mag = 1.0, sum = 1.0;
  int sign = -1;
  for (int k = 1; k < 60; ++k) {
    double next = mag * (2 * k - 1) * inv2x2;
    if (next >= mag) break;  // smallest term reached
    mag = next;
    sum += sign * mag;
    sign = -sign;
    if (mag < 1e-17 * sum) break;
  }
  return sum / (x * 1.77245385090551602730);
}

double log_erfc(double x) {
  if (x < 6) return std::log(std::erfc(x));
  return -x * x + std::log(erfcx(x));
}

double log_normal_cdf(double x) {
  return std::log(0.5) + log_erfc(-x * 0.70710678118654752440);
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   double abs_tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 ||
      std::abs(delta) <= 15 * std::max(abs_tol, tol * std::abs(left + right)))
    return left + right + delta / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol, abs_tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol, abs_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, double abs_tol,
                        int max_depth) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("adaptive_simpson: empty interval");
  }
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, max_depth);
}

}  // namespace axda
