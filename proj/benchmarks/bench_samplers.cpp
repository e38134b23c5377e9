#include <benchmark/benchmark.h>

#include "axda/models.hpp"
#include "axda/numerics.hpp"
#include "axda/samplers.hpp"

using namespace axda;

static void BM_InverseGaussian(benchmark::State& state) {
  RngStream rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_inverse_gaussian(2.0, 3.0, rng));
  }
}
BENCHMARK(BM_InverseGaussian);

static void BM_LassoZConditional(benchmark::State& state) {
  RngStream rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_lasso_z_conditional(0.4, 1.0, 0.1, rng));
  }
}
BENCHMARK(BM_LassoZConditional);

static void BM_LogConcave1d(benchmark::State& state) {
  RngStream rng(3);
  auto neg_log = [](double z) { return log_sum_exp(0.0, z) + z * z / 2; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_log_concave_1d(neg_log, 0.0, rng));
  }
}
BENCHMARK(BM_LogConcave1d);

static void BM_CirculantDraw(benchmark::State& state) {
  int side = static_cast<int>(state.range(0));
  CirculantGaussianSampler sampler(side, side, 0.9 * 0.07 * 0.07, 0.1);
  Eigen::VectorXd lin = Eigen::VectorXd::Constant(side * side, 0.3);
  RngStream rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(lin, rng));
  }
  state.SetComplexityN(side * side);
}
BENCHMARK(BM_CirculantDraw)->Arg(8)->Arg(32)->Arg(128)->Complexity();

static void BM_GaussianPrecision(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d, d) * 2.0;
  Eigen::VectorXd b = Eigen::VectorXd::Ones(d);
  RngStream rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_precision(Q, b, rng));
  }
}
BENCHMARK(BM_GaussianPrecision)->Arg(16)->Arg(64);

static void BM_SplitGibbsInpaintSweep(benchmark::State& state) {
  auto model = std::make_shared<InpaintingModel>();
  model->height = model->width = 32;
  model->sigma = 0.07;
  model->tau = 5.0;
  model->rho = 0.1;
  const int d = 32 * 32;
  for (int i = 0; i < d - 103; ++i) model->mask.push_back(i);
  model->y = Eigen::VectorXd::Constant(d - 103, 0.5);
  SplitModel split = inpainting_split_model(model);
  GibbsState st = initial_state(split);
  GibbsOptions opts;
  opts.iters = 1;
  opts.burnin = 0;
  opts.seed = 6;
  long iter = 0;
  for (auto _ : state) {
    opts.seed = 6 + iter++;
    benchmark::DoNotOptimize(run_split_gibbs(split, st, opts));
  }
}
BENCHMARK(BM_SplitGibbsInpaintSweep);

static void BM_Ess(benchmark::State& state) {
  RngStream rng(7);
  std::vector<double> x(100000);
  double prev = 0;
  for (auto& v : x) {
    prev = 0.5 * prev + rng.normal();
    v = prev;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ess(x));
  }
}
BENCHMARK(BM_Ess);
