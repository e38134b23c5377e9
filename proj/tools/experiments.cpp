#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "axda/bounds.hpp"
#include "axda/kernels.hpp"
#include "axda/models.hpp"
#include "axda/numerics.hpp"
#include "axda/optimize.hpp"
#include "axda/samplers.hpp"

namespace axda::experiments {

namespace fs = std::filesystem;

namespace {

fs::path out_file(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  return dir / name;
}

const std::vector<std::string> kBoundsKeys = {"d-list", "L",        "M",
                                              "Msf",    "rho-grid", "seed"};
const std::vector<std::string> kGaussianKeys = {"d", "a", "rho-grid",
                                                "n-samples", "seed"};
const std::vector<std::string> kLassoKeys = {
    "rho-list",  "rho-list-table", "theta-min", "theta-max",
    "theta-count", "alpha",        "L",         "seed"};
const std::vector<std::string> kInpaintKeys = {
    "image", "size",  "observed-fraction", "sigma",    "tau", "rho",
    "eta",   "iters", "burnin",            "thinning", "seed"};
const std::vector<std::string> kLogisticKeys = {
    "n", "d", "tau", "rho", "iters", "burnin", "seed", "n-list", "rho-grid"};
const std::vector<std::string> kOptimizeKeys = {
    "y",   "x",      "sigma",     "tau",        "rho-final", "levels",
    "tol", "inner-max", "seed",   "mcem-iters", "mcem-nmc",  "mcem-rho"};

}  // namespace

void run_bounds(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kBoundsKeys);
  std::vector<double> ds =
      cfg.get_double_list("d-list", {1, 10, 100, 1e4, 1e6});
  double L = cfg.get_double("L", 1.0);
  double M = cfg.get_double("M", 1.0);
  double Msf = cfg.get_double("Msf", 1.0);
  std::vector<double> grid =
      cfg.get_log_grid("rho-grid", 1e-4, std::pow(10.0, 0.5), 50);

  CsvWriter csv(out_file(out_dir, "bounds_curves.csv"),
                {"d", "rho", "thm1", "cor1", "thm2", "cor2", "wasserstein"});
  for (double d : ds) {
    RegularityProfile rp;
    rp.dim = static_cast<int>(d);
    rp.grad_lipschitz = M;
    rp.grad_second_moment = Msf;
    rp.convex = true;
    for (double rho : grid) {
      LipschitzBlock blk{L, rho};
      double thm1 = tv_bound_lipschitz(std::span(&blk, 1), d);
      double cor1 = tv_bound_lipschitz_asymptote(L, rho, d);
      double thm2 = tv_bound_smooth_convex_raw(rp, rho);
      double cor2 = tv_bound_smooth_convex_asymptote(rp, rho);
      auto wb = wasserstein_bound(KernelFamily::Gaussian,
                                  static_cast<int>(d), 2, rho);
      csv.row({d, rho, thm1, cor1, thm2, cor2, *wb});
    }
  }
}

void run_gaussian(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kGaussianKeys);
  int d = static_cast<int>(cfg.get_long("d", 10));
  double a = cfg.get_double("a", 1.5);
  long n_samples = cfg.get_long("n-samples", 100000);
  std::uint64_t seed = cfg.get_seed("seed", 1);
  std::vector<double> grid = cfg.get_log_grid("rho-grid", 1e-3, 1.0, 15);

  GaussianTarget target{Eigen::VectorXd::Zero(d),
                        squared_exponential_covariance(d, a)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target.covariance);
  double lam_min = es.eigenvalues().minCoeff();
  RegularityProfile rp;
  rp.dim = d;
  rp.grad_lipschitz = 1.0 / lam_min;
  rp.grad_second_moment = es.eigenvalues().cwiseInverse().sum();
  rp.convex = true;

  Eigen::LLT<Eigen::MatrixXd> llt_pi(target.covariance);
  double logdet_pi = 0;
  for (int i = 0; i < d; ++i)
    logdet_pi += 2 * std::log(llt_pi.matrixL()(i, i));
  const double l2pi = std::log(2 * M_PI);
  auto log_gauss = [&](const Eigen::LLT<Eigen::MatrixXd>& llt, double logdet,
                       const Eigen::VectorXd& x) {
    return -0.5 * (d * l2pi + logdet + x.dot(llt.solve(x)));
  };
  Eigen::MatrixXd Lmat = llt_pi.matrixL();

  CsvWriter csv(out_file(out_dir, "gaussian_curves.csv"),
                {"rho", "w2_exact", "w2_bound", "tv_mc", "tv_bound",
                 "w2_paper"});
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double rho = grid[gi];
    double w2 = gaussian_w2_exact(target, rho);
    double w2b = *wasserstein_bound(KernelFamily::Gaussian, d, 2, rho);
    double w2p = gaussian_w2_paper_formula(target, rho);
    GaussianTarget smoothed = gaussian_marginal_exact(target, rho);
    Eigen::LLT<Eigen::MatrixXd> llt_rho(smoothed.covariance);
    double logdet_rho = 0;
    for (int i = 0; i < d; ++i)
      logdet_rho += 2 * std::log(llt_rho.matrixL()(i, i));
    RngStream rng = derive_stream(seed, 7, gi);
    double tv = estimate_tv_mc(
        [&](const Eigen::VectorXd& x) { return log_gauss(llt_pi, logdet_pi, x); },
        [&](const Eigen::VectorXd& x) {
          return log_gauss(llt_rho, logdet_rho, x);
        },
        [&](RngStream& r) {
          Eigen::VectorXd xi(d);
          for (int i = 0; i < d; ++i) xi[i] = r.normal();
          return Eigen::VectorXd(Lmat * xi);
        },
        n_samples, rng);
    double tvb = tv_bound_smooth_convex(rp, rho);
    csv.row({rho, w2, w2b, tv, tvb, w2p});
  }
}

// ---------------------------------------------------------------------------
// Lasso
// ---------------------------------------------------------------------------

namespace {

// Fixed univariate instance of the sparse-regression illustration.
LassoTarget univariate_lasso() {
  LassoTarget t;
  t.y = Eigen::VectorXd::Constant(1, 1.0);
  t.X = Eigen::MatrixXd::Constant(1, 1, 2.0);
  t.B = Eigen::MatrixXd::Identity(1, 1);
  t.tau = 1.0;
  t.sigma = 1.0;
  return t;
}

struct GridDensity {
  std::vector<double> theta;
  std::vector<double> density;  // normalized on the grid
  double step;
};

GridDensity normalized_on_grid(const std::function<double(double)>& potential,
                               double lo, double hi, double step) {
  GridDensity g;
  g.step = step;
  long n = static_cast<long>(std::llround((hi - lo) / step)) + 1;
  g.theta.resize(n);
  g.density.resize(n);
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i) {
    g.theta[i] = lo + i * step;
    g.density[i] = potential(g.theta[i]);
    best = std::min(best, g.density[i]);
  }
  double mass = 0;
  for (long i = 0; i < n; ++i) {
    g.density[i] = std::exp(best - g.density[i]);
    mass += g.density[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
  }
  mass *= step;
  for (auto& v : g.density) v /= mass;
  return g;
}

}  // namespace

LassoHpdRow lasso_table_row(double rho, double alpha, double lipschitz) {
  LassoTarget t = univariate_lasso();
  auto pot = [&](double th) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, th);
    return lasso_potential(t, v);
  };
  auto pot_rho = [&](double th) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, th);
    double r = (t.y - t.X * v).squaredNorm() / (2 * t.sigma * t.sigma);
    return r + lasso_smoothed_potential(t, v, rho);
  };
  const double step = 0.01;
  GridDensity pi = normalized_on_grid(pot, -6.0, 6.0, step);
  GridDensity pi_rho = normalized_on_grid(pot_rho, -6.0, 6.0, step);

  // HPD set by accumulating highest-density grid cells to mass 1 - alpha.
  std::vector<std::size_t> order(pi_rho.density.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pi_rho.density[a] > pi_rho.density[b];
  });
  double mass = 0;
  std::size_t i_lo = order[0], i_hi = order[0];
  for (std::size_t k = 0; k < order.size() && mass < 1 - alpha; ++k) {
    mass += pi_rho.density[order[k]] * step;
    i_lo = std::min(i_lo, order[k]);
    i_hi = std::max(i_hi, order[k]);
  }
  LassoHpdRow row;
  row.rho = rho;
  row.hpd_lo = pi_rho.theta[i_lo];
  row.hpd_hi = pi_rho.theta[i_hi];
  double cov = 0;
  for (std::size_t i = i_lo; i <= i_hi; ++i) {
    double w = (i == i_lo || i == i_hi) ? 0.5 : 1.0;
    cov += w * pi.density[i] * step;
  }
  row.coverage = cov;
  auto iv = coverage_interval(lipschitz, 1.0, rho, alpha);
  row.interval_lo = iv.first;
  row.interval_hi = iv.second;
  return row;
}

void run_lasso(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kLassoKeys);
  std::vector<double> rhos = cfg.get_double_list("rho-list", {0.01, 0.1, 1.0});
  std::vector<double> rhos_table =
      cfg.get_double_list("rho-list-table", {1e-3, 1e-2, 1e-1, 1.0});
  double lo = cfg.get_double("theta-min", -3.0);
  double hi = cfg.get_double("theta-max", 3.0);
  long count = cfg.get_long("theta-count", 601);
  double alpha = cfg.get_double("alpha", 0.05);
  double L = cfg.get_double("L", 1.0);

  LassoTarget t = univariate_lasso();
  auto g = [&](double th) { return t.tau * std::abs(th); };
  auto like = [&](double th) {
    return (1.0 - 2.0 * th) * (1.0 - 2.0 * th) / 2.0;
  };
  auto g_rho = [&](double th, double rho) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, th);
    return lasso_smoothed_potential(t, v, rho);
  };

  std::vector<std::string> header = {"theta", "g", "prior", "posterior"};
  for (double rho : rhos) {
    std::string tag = format_double(rho);
    header.push_back("g_rho_" + tag);
    header.push_back("g_plus_L_" + tag);
    header.push_back("g_plus_U_" + tag);
    header.push_back("prior_rho_" + tag);
    header.push_back("posterior_rho_" + tag);
  }

  const double step = (hi - lo) / (count - 1);
  GridDensity prior0 = normalized_on_grid(g, lo, hi, step);
  GridDensity post0 = normalized_on_grid(
      [&](double th) { return g(th) + like(th); }, lo, hi, step);
  std::vector<GridDensity> priors, posts;
  std::vector<std::pair<double, double>> gaps;
  for (double rho : rhos) {
    priors.push_back(normalized_on_grid(
        [&](double th) { return g_rho(th, rho); }, lo, hi, step));
    posts.push_back(normalized_on_grid(
        [&](double th) { return g_rho(th, rho) + like(th); }, lo, hi, step));
    gaps.push_back(potential_gap_bounds(L, 1.0, rho));
  }

  CsvWriter csv(out_file(out_dir, "lasso_curves.csv"), header);
  for (long i = 0; i < count; ++i) {
    double th = lo + i * step;
    std::vector<double> r = {th, g(th), prior0.density[i], post0.density[i]};
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      r.push_back(g_rho(th, rhos[j]));
      r.push_back(g(th) + gaps[j].first);
      r.push_back(g(th) + gaps[j].second);
      r.push_back(priors[j].density[i]);
      r.push_back(posts[j].density[i]);
    }
    csv.row(r);
  }

  CsvWriter table(out_file(out_dir, "lasso_table2.csv"),
                  {"rho", "hpd_lo", "hpd_hi", "coverage", "interval_lo",
                   "interval_hi"});
  for (double rho : rhos_table) {
    LassoHpdRow row = lasso_table_row(rho, alpha, L);
    table.row({row.rho, row.hpd_lo, row.hpd_hi, row.coverage, row.interval_lo,
               row.interval_hi});
  }
}

// ---------------------------------------------------------------------------
// Inpainting
// ---------------------------------------------------------------------------

std::vector<double> synthetic_phantom(int size) {
  std::vector<double> img(static_cast<std::size_t>(size) * size, 0.12);
  auto at = [&](int r, int c) -> double& { return img[r * size + c]; };
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double x = (c + 0.5) / size, y = (r + 0.5) / size;
      if (x > 0.15 && x < 0.85 && y > 0.2 && y < 0.8) at(r, c) = 0.45;
      double dx = x - 0.62, dy = y - 0.4;
      if (dx * dx + dy * dy < 0.22 * 0.22) at(r, c) = 0.9;
      if (x > 0.25 && x < 0.42 && y > 0.52 && y < 0.72) at(r, c) = 0.7;
    }
  }
  return img;
}

void run_inpaint(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kInpaintKeys);
  std::uint64_t seed = cfg.get_seed("seed", 1);
  double frac = cfg.get_double("observed-fraction", 0.9);
  if (!(frac > 0 && frac < 1))
    throw ConfigError("observed-fraction must be in (0,1)");

  std::vector<double> truth;
  int h, w;
  std::string image = cfg.get_string("image", "");
  if (!image.empty()) {
    Pgm in = read_pgm(image);
    truth = pgm_to_unit(in);
    h = in.height;
    w = in.width;
  } else {
    int size = static_cast<int>(cfg.get_long("size", 32));
    truth = synthetic_phantom(size);
    h = w = size;
    write_pgm(out_file(out_dir, "inpaint_truth.pgm"),
              unit_to_pgm(h, w, truth));
  }
  const int d = h * w;

  auto model = std::make_shared<InpaintingModel>();
  model->height = h;
  model->width = w;
  model->sigma = cfg.get_double("sigma", 7e-2);
  model->tau = cfg.get_double("tau", 5.0);
  model->rho = cfg.get_double("rho", 0.1);
  model->eta = cfg.get_double("eta", 0.0);

  // random decimation mask and noisy observation
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream mask_rng = derive_stream(seed, 1000, 0);
  for (int i = d - 1; i > 0; --i) {
    int j = static_cast<int>(mask_rng.uniform() * (i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }
  int n_obs = static_cast<int>(std::lround(frac * d));
  n_obs = std::clamp(n_obs, 1, d - 1);
  model->mask.assign(perm.begin(), perm.begin() + n_obs);
  std::sort(model->mask.begin(), model->mask.end());
  RngStream noise_rng = derive_stream(seed, 1001, 0);
  model->y.resize(n_obs);
  for (int j = 0; j < n_obs; ++j)
    model->y[j] = truth[model->mask[j]] + model->sigma * noise_rng.normal();

  std::vector<double> damaged(d, 0.0);
  for (int j = 0; j < n_obs; ++j) damaged[model->mask[j]] = model->y[j];
  write_pgm(out_file(out_dir, "inpaint_observed.pgm"),
            unit_to_pgm(h, w, damaged));

  GibbsOptions opts;
  opts.iters = cfg.get_long("iters", 10000);
  opts.burnin = cfg.get_long("burnin", -1);
  opts.thinning = static_cast<int>(cfg.get_long("thinning", 1));
  opts.seed = seed;
  SplitModel split = inpainting_split_model(model);
  ChainOutput chain = run_split_gibbs(split, initial_state(split), opts);

  Eigen::VectorXd mmse = chain.samples.colwise().mean();
  write_pgm(out_file(out_dir, "inpaint_mmse.pgm"),
            unit_to_pgm(h, w, std::span<const double>(mmse.data(),
                                                      static_cast<std::size_t>(d))));

  // Absolute-bias map against the dense-oracle chain at small scale; a zero
  // placeholder otherwise.
  std::vector<double> bias(d, 0.0);
  if (d <= 256) {
    SplitModel dense = inpainting_split_model_dense(model);
    ChainOutput oracle = run_split_gibbs(dense, initial_state(dense), opts);
    Eigen::VectorXd mmse_oracle = oracle.samples.colwise().mean();
    for (int i = 0; i < d; ++i) bias[i] = std::abs(mmse[i] - mmse_oracle[i]);
  }
  write_pgm(out_file(out_dir, "inpaint_bias.pgm"), unit_to_pgm(h, w, bias));

  CsvWriter trace(out_file(out_dir, "inpaint_potential.csv"),
                  {"iteration", "potential"});
  for (std::size_t i = 0; i < chain.potential_trace.size(); ++i)
    trace.row({static_cast<double>(i + 1), chain.potential_trace[i]});

  CsvWriter gcsv(out_file(out_dir, "inpaint_gamma.csv"), {"alpha", "gamma"});
  std::vector<double> post_burn(chain.potential_trace.begin() + chain.burnin,
                                chain.potential_trace.end());
  for (int ai = 1; ai <= 99; ++ai) {
    double alpha = ai / 100.0;
    gcsv.row({alpha, hpd_threshold(post_burn, alpha)});
  }
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

void run_logistic(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kLogisticKeys);
  std::uint64_t seed = cfg.get_seed("seed", 1);
  int n = static_cast<int>(cfg.get_long("n", 20));
  int d = static_cast<int>(cfg.get_long("d", 2));
  double tau = cfg.get_double("tau", 1.0);
  double rho = cfg.get_double("rho", 0.1);

  // Corollary-3 bound curves with unit-normalized features (L_j = 1).
  std::vector<double> ns =
      cfg.get_double_list("n-list", {1, 10, 100, 1000, 10000});
  std::vector<double> grid = cfg.get_log_grid("rho-grid", 1e-4, 1.0, 20);
  CsvWriter bcsv(out_file(out_dir, "logistic_bound.csv"),
                 {"n", "rho", "cor3_bound"});
  for (double r : grid) {
    double log_delta = log_pcf_ratio(d, r);
    for (double nn : ns) {
      double bound = std::clamp(-std::expm1(nn * log_delta), 0.0, 1.0);
      bcsv.row({nn, r, bound});
    }
  }

  // One chain summary at (n, d): features uniform on [0,1].
  LogisticModel m;
  m.tau = tau;
  m.rho = rho;
  m.X.resize(n, d);
  m.y.resize(n);
  RngStream data_rng = derive_stream(seed, 2000, 0);
  Eigen::VectorXd theta_true(d);
  for (int i = 0; i < d; ++i) theta_true[i] = data_rng.normal();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) m.X(j, i) = data_rng.uniform();
    double t = m.X.row(j).dot(theta_true);
    double p_plus = 1.0 / (1.0 + std::exp(t));  // printed-sign convention
    m.y[j] = data_rng.uniform() < p_plus ? 1.0 : -1.0;
  }

  GibbsOptions opts;
  opts.iters = cfg.get_long("iters", 20000);
  opts.burnin = cfg.get_long("burnin", -1);
  opts.seed = seed;
  SplitModel split = logistic_split_model(m);
  ChainOutput chain = run_split_gibbs(split, initial_state(split), opts);

  CsvWriter ccsv(out_file(out_dir, "logistic_chain.csv"),
                 {"component", "posterior_mean", "ess"});
  for (int i = 0; i < d; ++i) {
    std::vector<double> comp(chain.samples.rows());
    for (long r = 0; r < chain.samples.rows(); ++r)
      comp[r] = chain.samples(r, i);
    ccsv.row({static_cast<double>(i), chain.samples.col(i).mean(), ess(comp)});
  }
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

void run_optimize(const Config& cfg, const fs::path& out_dir) {
  cfg.require_known_keys(kOptimizeKeys);
  double y = cfg.get_double("y", 1.0);
  double x = cfg.get_double("x", 2.0);
  double sigma = cfg.get_double("sigma", 1.0);
  double tau = cfg.get_double("tau", 1.0);
  double rho_final = cfg.get_double("rho-final", 1e-4);
  int levels = static_cast<int>(cfg.get_long("levels", 9));
  long inner = cfg.get_long("inner-max", 2000000);
  double tol = cfg.get_double("tol", 1e-12);
  std::uint64_t seed = cfg.get_seed("seed", 1);

  PenaltyProblem p;
  p.theta_dim = 1;
  PenaltyBlock like;
  like.A = Eigen::MatrixXd::Constant(1, 1, x);
  like.rho = rho_final;
  like.f = [y, sigma](const Eigen::VectorXd& z) {
    return (y - z[0]) * (y - z[0]) / (2 * sigma * sigma);
  };
  like.prox = [y, sigma](const Eigen::VectorXd& v, double rho2) {
    double zz = (y * rho2 + v[0] * sigma * sigma) / (sigma * sigma + rho2);
    return Eigen::VectorXd::Constant(1, zz);
  };
  PenaltyBlock prior;
  prior.A = Eigen::MatrixXd::Identity(1, 1);
  prior.rho = rho_final;
  prior.f = [tau](const Eigen::VectorXd& z) { return tau * std::abs(z[0]); };
  prior.prox = [tau](const Eigen::VectorXd& v, double rho2) {
    double t = tau * rho2;
    double zz = std::copysign(std::max(0.0, std::abs(v[0]) - t), v[0]);
    return Eigen::VectorXd::Constant(1, zz);
  };
  p.blocks = {like, prior};

  std::vector<double> scales(levels);
  for (int i = 0; i < levels; ++i)
    scales[i] = std::pow(1.0 / rho_final,
                         1.0 - static_cast<double>(i) / (levels - 1));
  ContinuationResult res = quadratic_penalty_continuation(p, scales, inner, tol);

  CsvWriter trace(out_file(out_dir, "optimize_trace.csv"),
                  {"level", "rho", "iteration", "objective"});
  for (std::size_t lvl = 0; lvl < res.level_traces.size(); ++lvl) {
    for (std::size_t it = 0; it < res.level_traces[lvl].size(); ++it)
      trace.row({static_cast<double>(lvl), rho_final * res.rho_scales[lvl],
                 static_cast<double>(it), res.level_traces[lvl][it]});
  }

  double a = x * x / (sigma * sigma), b = x * y / (sigma * sigma);
  double oracle = std::copysign(std::max(0.0, std::abs(b) - tau), b) / a;
  CsvWriter rcsv(out_file(out_dir, "optimize_result.csv"),
                 {"theta", "soft_threshold_oracle", "abs_error"});
  rcsv.row({res.final.theta[0], oracle, std::abs(res.final.theta[0] - oracle)});

  // MCEM on the matching lasso split model.
  LassoTarget t;
  t.y = Eigen::VectorXd::Constant(1, y);
  t.X = Eigen::MatrixXd::Constant(1, 1, x);
  t.B = Eigen::MatrixXd::Identity(1, 1);
  t.tau = tau;
  t.sigma = sigma;
  double mcem_rho = cfg.get_double("mcem-rho", 0.1);
  SplitModel split = lasso_split_model(t, mcem_rho);
  McemOptions mo;
  mo.n_mc_per_estep = static_cast<int>(cfg.get_long("mcem-nmc", 200));
  mo.max_iters = cfg.get_long("mcem-iters", 30);
  mo.seed = seed;
  Eigen::MatrixXd iterates = mcem_run(split, Eigen::VectorXd::Zero(1), mo);
  CsvWriter mcsv(out_file(out_dir, "optimize_mcem.csv"),
                 {"iteration", "theta"});
  for (long i = 0; i < iterates.rows(); ++i)
    mcsv.row({static_cast<double>(i), iterates(i, 0)});
}

}  // namespace axda::experiments
