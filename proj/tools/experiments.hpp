#ifndef AXDA_EXPERIMENTS_HPP
#define AXDA_EXPERIMENTS_HPP

#include <filesystem>

#include "axda/io.hpp"

namespace axda::experiments {

// Each runner validates its config keys, runs the experiment and writes
// CSV/PGM outputs named <experiment>_<name>.{csv,pgm} under out_dir.
// All randomness is controlled by the 'seed' key.

void run_bounds(const Config& cfg, const std::filesystem::path& out_dir);
void run_gaussian(const Config& cfg, const std::filesystem::path& out_dir);
void run_lasso(const Config& cfg, const std::filesystem::path& out_dir);
void run_inpaint(const Config& cfg, const std::filesystem::path& out_dir);
void run_logistic(const Config& cfg, const std::filesystem::path& out_dir);
void run_optimize(const Config& cfg, const std::filesystem::path& out_dir);

// The 32x32 piecewise-constant phantom used when no input image is given.
std::vector<double> synthetic_phantom(int size);

// Grid-quadrature lasso HPD machinery shared with the acceptance suite.
struct LassoHpdRow {
  double rho;
  double hpd_lo, hpd_hi;   // endpoints of the HPD interval of pi_rho
  double coverage;         // mass of pi over that interval
  double interval_lo, interval_hi;  // theoretical coverage interval
};
// Univariate y=1, x=2, sigma=1, tau=1, B=1 posterior; grid step 0.01.
LassoHpdRow lasso_table_row(double rho, double alpha, double lipschitz);

}  // namespace axda::experiments

#endif
