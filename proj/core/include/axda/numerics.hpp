#ifndef AXDA_NUMERICS_HPP
#define AXDA_NUMERICS_HPP

#include <functional>
#include <span>

namespace axda {

double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> v);

// Scaled complementary error function exp(x^2) erfc(x).  Overflows to +inf
// only for x below about -26.6, where the true value does overflow.
double erfcx(double x);

// log(erfc(x)), finite for all x where erfc does not underflow logically
// (i.e. for every finite x).
double log_erfc(double x);

// log of the standard normal CDF.
double log_normal_cdf(double x);

// Adaptive Simpson quadrature on a finite interval.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-10,
                        double abs_tol = 1e-300, int max_depth = 48);

}  // namespace axda

#endif
