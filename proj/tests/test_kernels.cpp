#include <doctest.h>

#include <cmath>
#include <vector>

#include "axda/kernels.hpp"
#include "axda/numerics.hpp"
#include "support/oracles.hpp"

using namespace axda;

namespace {

double lk1(const SmoothingDensity& sd, double z, double theta) {
  return eval_log_kappa(sd, std::span(&z, 1), std::span(&theta, 1));
}

// Numerically integrates exp(log kappa) over the z line for d = 1 sources,
// with exact tail corrections for the two heavy-tailed kernels.
double total_mass(const SmoothingDensity& sd, double theta) {
  if (sd.is_kernel()) {
    KernelFamily k = sd.kernel_family();
    double rho = sd.rho();
    if (k == KernelFamily::Cauchy) {
      double R = 50 * rho;
      double inner = oracles::gauss_legendre(
          [&](double z) { return std::exp(lk1(sd, z, theta)); }, theta - R,
          theta + R, 400);
      double tail = (1 - 2 / M_PI * std::atan(50.0));
      return inner + tail;
    }
    if (k == KernelFamily::Dirichlet) {
      double R = 1e4;  // in kernel units; mean-value tail is 1/(pi R)
      double inner = oracles::gauss_legendre(
          [&](double z) { return std::exp(lk1(sd, z, theta)); },
          theta - R * rho, theta + R * rho, 20000);
      return inner + 1.0 / (M_PI * R);
    }
    double R = kernel_compact_support(k) ? 1.0 : 45.0;
    return oracles::gauss_legendre(
        [&](double z) { return std::exp(lk1(sd, z, theta)); },
        theta - R * rho, theta + R * rho, 600);
  }
  auto dom = divergence_domain(sd.divergence_family());
  double lo = std::isinf(dom.lo) ? theta - 50 * std::sqrt(sd.rho()) - 50 * sd.rho()
                                 : dom.lo + 1e-12;
  double hi = std::isinf(dom.hi) ? theta + 50 * std::sqrt(sd.rho()) + 50 * sd.rho()
                                 : dom.hi - 1e-12;
  if (sd.divergence_family() == DivergenceFamily::ItakuraSaito)
    hi = theta * (1 + 80 * std::sqrt(sd.rho())) + 80 * sd.rho();
  return oracles::gauss_legendre(
      [&](double z) { return std::exp(lk1(sd, z, theta)); }, lo, hi, 2000);
}

}  // namespace

TEST_CASE("eval_log_kappa closed-form anchors") {
  auto gauss = SmoothingDensity::kernel(KernelFamily::Gaussian, 1.0, 1);
  CHECK(lk1(gauss, 0.7, 0.7) ==
        doctest::Approx(-0.5 * std::log(2 * M_PI)).epsilon(1e-12));

  auto unif = SmoothingDensity::kernel(KernelFamily::Uniform, 0.5, 1);
  CHECK(lk1(unif, 1.6, 1.0) == -std::numeric_limits<double>::infinity());
  CHECK(lk1(unif, 1.4, 1.0) == doctest::Approx(std::log(1.0)));  // 1/(2*0.5)

  // Itakura-Saito at z = theta: divergence term 0, so the value is
  // -log(normalizer); oracle normalizer from quadrature on (0, inf).
  auto is = SmoothingDensity::divergence(DivergenceFamily::ItakuraSaito, 1.0, 1);
  double theta = 2.0;
  double Z = oracles::gauss_legendre(
      [&](double z) {
        return std::exp(-bregman_univariate(DivergenceFamily::ItakuraSaito, z,
                                            theta));
      },
      1e-10, 120.0, 4000);
  CHECK(lk1(is, theta, theta) == doctest::Approx(-std::log(Z)).epsilon(1e-9));
}

TEST_CASE("eval_log_kappa rejects bad input") {
  auto is = SmoothingDensity::divergence(DivergenceFamily::ItakuraSaito, 1.0, 1);
  CHECK_THROWS_AS(lk1(is, -1.0, 2.0), std::domain_error);
  auto kl = SmoothingDensity::divergence(DivergenceFamily::KullbackLeibler, 1.0, 1);
  CHECK_THROWS_AS(lk1(kl, 1.5, 0.5), std::domain_error);
  auto g2 = SmoothingDensity::kernel(KernelFamily::Gaussian, 1.0, 2);
  double z = 0;
  CHECK_THROWS_AS(eval_log_kappa(g2, std::span(&z, 1), std::span(&z, 1)),
                  std::invalid_argument);
}

TEST_CASE("sample_kappa moment anchors") {
  SUBCASE("Gaussian d=2 rho=0.1 unbiased") {
    auto sd = SmoothingDensity::kernel(KernelFamily::Gaussian, 0.1, 2);
    std::vector<double> theta{1.0, -2.0};
    RngStream rng(7);
    const int n = 100000;
    double s0 = 0, s1 = 0;
    for (int i = 0; i < n; ++i) {
      auto z = sample_kappa(sd, theta, rng);
      s0 += z[0];
      s1 += z[1];
    }
    double tol = 3 * 0.1 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(s0 / n - theta[0]) < tol);
    CHECK(std::abs(s1 / n - theta[1]) < tol);
  }
  SUBCASE("Uniform support") {
    auto sd = SmoothingDensity::kernel(KernelFamily::Uniform, 1.0, 1);
    std::vector<double> theta{0.3};
    RngStream rng(8);
    for (int i = 0; i < 20000; ++i) {
      auto z = sample_kappa(sd, theta, rng);
      CHECK(std::abs(z[0] - 0.3) <= 1.0);
    }
  }
  SUBCASE("Triangular variance 1/6") {
    auto sd = SmoothingDensity::kernel(KernelFamily::Triangular, 1.0, 1);
    std::vector<double> theta{0.0};
    RngStream rng(9);
    const int n = 100000;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = sample_kappa(sd, theta, rng)[0];
    // sd of the variance estimate: sqrt((mu4 - var^2)/n), mu4 = 1/15
    double mc_sd = std::sqrt((1.0 / 15 - 1.0 / 36) / n);
    CHECK(std::abs(oracles::variance(z) - 1.0 / 6) < 3 * mc_sd);
  }
  SUBCASE("unsupported sources throw") {
    auto dir = SmoothingDensity::kernel(KernelFamily::Dirichlet, 1.0, 1);
    std::vector<double> theta{0.0};
    RngStream rng(1);
    CHECK_THROWS_AS(sample_kappa(dir, theta, rng), std::runtime_error);
    auto kl =
        SmoothingDensity::divergence(DivergenceFamily::KullbackLeibler, 1.0, 1);
    std::vector<double> t2{0.5};
    CHECK_THROWS_AS(sample_kappa(kl, t2, rng), std::runtime_error);
  }
}

TEST_CASE("kernel_moment closed forms and undefined cases") {
  CHECK(*kernel_moment(KernelFamily::Gaussian, 4, 2) == doctest::Approx(2.0));
  CHECK(*kernel_moment(KernelFamily::Uniform, 3, 2) == doctest::Approx(1.0));
  CHECK(!kernel_moment(KernelFamily::Cauchy, 1, 2).has_value());
  CHECK(!kernel_moment(KernelFamily::Dirichlet, 2, 2).has_value());
  CHECK_THROWS_AS(kernel_moment(KernelFamily::Gaussian, 1, 0),
                  std::invalid_argument);

  // p = 1, d = 1: E|u| for the Gaussian kernel is sqrt(2/pi)
  CHECK(*kernel_moment(KernelFamily::Gaussian, 1, 1) ==
        doctest::Approx(std::sqrt(2 / M_PI)).epsilon(1e-8));
  // p = 1, d = 3 via MC: chi distribution mean sqrt(2) Gamma(2)/Gamma(1.5)
  double chi3 = std::sqrt(2.0) / std::tgamma(1.5);
  CHECK(*kernel_moment(KernelFamily::Gaussian, 3, 1) ==
        doctest::Approx(chi3).epsilon(5e-3));
}

TEST_CASE("kernel moments match d-scaled quadrature for d=1..5") {
  const KernelFamily fams[] = {KernelFamily::Gaussian, KernelFamily::Laplace,
                               KernelFamily::Uniform, KernelFamily::Triangular,
                               KernelFamily::Epanechnikov};
  for (auto k : fams) {
    double lim = kernel_compact_support(k) ? 1.0 : 45.0;
    double var1 = oracles::gauss_legendre(
        [&](double u) {
          double l = kernel_log_density(k, u);
          return std::isfinite(l) ? u * u * std::exp(l) : 0.0;
        },
        -lim, lim, 800);
    for (int d = 1; d <= 5; ++d) {
      CHECK(*kernel_moment(k, d, 2) ==
            doctest::Approx(std::sqrt(d * var1)).epsilon(1e-8));
    }
  }
}

TEST_CASE("eval_bregman values") {
  // SquaredLoss is the Bregman divergence of psi = z^2/2
  std::vector<double> z{3.0}, th{1.0};
  CHECK(eval_bregman(DivergenceFamily::SquaredLoss, z, th) ==
        doctest::Approx(2.0));
  std::vector<double> z2{2.0}, th2{2.0};
  CHECK(eval_bregman(DivergenceFamily::ItakuraSaito, z2, th2) ==
        doctest::Approx(0.0));
  // anchored Kullback-Leibler: z log(z/theta) - z + theta
  std::vector<double> z3{0.5}, th3{0.25};
  CHECK(eval_bregman(DivergenceFamily::KullbackLeibler, z3, th3) ==
        doctest::Approx(0.5 * std::log(2.0) - 0.25).epsilon(1e-12));
  std::vector<double> z4{3.0}, th4{1.0};
  CHECK(eval_bregman(DivergenceFamily::AbsoluteLoss, z4, th4) ==
        doctest::Approx(2.0));
  std::vector<double> zneg{-1.0};
  CHECK_THROWS_AS(eval_bregman(DivergenceFamily::ItakuraSaito, zneg, th4),
                  std::domain_error);
}

TEST_CASE("divergences vanish at z=theta and are positive elsewhere") {
  struct Probe {
    DivergenceFamily f;
    std::vector<double> points;
  };
  const Probe probes[] = {
      {DivergenceFamily::SquaredLoss, {-2.0, 0.1, 3.0}},
      {DivergenceFamily::AbsoluteLoss, {-2.0, 0.1, 3.0}},
      {DivergenceFamily::LogisticLoss, {0.1, 0.5, 0.9}},
      {DivergenceFamily::ItakuraSaito, {0.3, 1.0, 7.0}},
      {DivergenceFamily::KullbackLeibler, {0.1, 0.5, 0.9}},
  };
  for (const auto& p : probes) {
    for (double t : p.points) {
      CHECK(bregman_univariate(p.f, t, t) == doctest::Approx(0.0));
      for (double zz : p.points) {
        if (zz != t) CHECK(bregman_univariate(p.f, zz, t) > 0.0);
      }
    }
  }
}

TEST_CASE("normalization of every d=1 smoothing density") {
  RngStream rng(3);
  const KernelFamily kfams[] = {
      KernelFamily::Gaussian,  KernelFamily::Cauchy,
      KernelFamily::Laplace,   KernelFamily::Dirichlet,
      KernelFamily::Uniform,   KernelFamily::Triangular,
      KernelFamily::Epanechnikov};
  for (auto k : kfams) {
    auto sd = SmoothingDensity::kernel(k, 0.7, 1);
    for (int rep = 0; rep < 5; ++rep) {
      double theta = 4 * rng.uniform() - 2;
      CHECK(total_mass(sd, theta) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  const DivergenceFamily dfams[] = {
      DivergenceFamily::SquaredLoss, DivergenceFamily::AbsoluteLoss,
      DivergenceFamily::LogisticLoss, DivergenceFamily::ItakuraSaito,
      DivergenceFamily::KullbackLeibler};
  for (auto f : dfams) {
    auto sd = SmoothingDensity::divergence(f, 0.2, 1);
    auto dom = divergence_domain(f);
    for (int rep = 0; rep < 5; ++rep) {
      double theta = std::isinf(dom.hi) ? 2 * rng.uniform() + 0.5
                                        : 0.8 * rng.uniform() + 0.1;
      CHECK(total_mass(sd, theta) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("kernel sources are exactly symmetric about theta") {
  // points on a dyadic grid so 2 theta - z is computed without rounding
  RngStream rng(11);
  const KernelFamily fams[] = {KernelFamily::Gaussian, KernelFamily::Cauchy,
                               KernelFamily::Laplace, KernelFamily::Dirichlet,
                               KernelFamily::Uniform, KernelFamily::Triangular,
                               KernelFamily::Epanechnikov};
  for (auto k : fams) {
    auto sd = SmoothingDensity::kernel(k, 0.37, 1);
    for (int rep = 0; rep < 20; ++rep) {
      double theta = std::floor(128 * (2 * rng.uniform() - 1)) / 64.0;
      double z = theta + std::floor(64 * (rng.uniform() - 0.5)) / 64.0;
      double m = 2 * theta - z;
      CHECK(lk1(sd, z, theta) == lk1(sd, m, theta));
    }
  }
}

TEST_CASE("halving rho shifts the log-density by d log 2 at z = theta") {
  for (int d : {1, 3}) {
    auto a = SmoothingDensity::kernel(KernelFamily::Epanechnikov, 0.8, d);
    auto b = SmoothingDensity::kernel(KernelFamily::Epanechnikov, 0.4, d);
    std::vector<double> theta(d, 0.25);
    CHECK(eval_log_kappa(b, theta, theta) -
              eval_log_kappa(a, theta, theta) ==
          doctest::Approx(d * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("samplers agree with eval_log_kappa through a KS test") {
  struct Source {
    SmoothingDensity sd;
    double lo, hi;
  };
  const double rho = 0.6;
  std::vector<Source> sources;
  sources.push_back({SmoothingDensity::kernel(KernelFamily::Gaussian, rho, 1),
                     -8 * rho, 8 * rho});
  sources.push_back({SmoothingDensity::kernel(KernelFamily::Laplace, rho, 1),
                     -25 * rho, 25 * rho});
  sources.push_back({SmoothingDensity::kernel(KernelFamily::Uniform, rho, 1),
                     -1.01 * rho, 1.01 * rho});
  sources.push_back({SmoothingDensity::kernel(KernelFamily::Triangular, rho, 1),
                     -1.01 * rho, 1.01 * rho});
  sources.push_back(
      {SmoothingDensity::kernel(KernelFamily::Epanechnikov, rho, 1),
       -1.01 * rho, 1.01 * rho});
  sources.push_back(
      {SmoothingDensity::divergence(DivergenceFamily::SquaredLoss, rho, 1),
       -8 * std::sqrt(rho), 8 * std::sqrt(rho)});

  const double theta = 0.4;
  const int n = 100000;
  for (std::size_t source_id = 0; source_id < sources.size(); ++source_id) {
    const auto& s = sources[source_id];
    auto cdf = oracles::grid_cdf(
        [&](double z) {
          double v = lk1(s.sd, z, theta);
          return std::isfinite(v) ? v : -745.0;
        },
        theta + s.lo, theta + s.hi, 40001);
    RngStream rng = derive_stream(100, source_id, 0);
    std::vector<double> draws(n);
    std::vector<double> t{theta};
    for (int i = 0; i < n; ++i) draws[i] = sample_kappa(s.sd, t, rng)[0];
    double stat = oracles::ks_statistic(draws, [&](double v) { return cdf(v); });
    CAPTURE(source_id);
    CHECK(stat < oracles::ks_critical(n, 0.01));
  }

  // The Cauchy tails need the arctan substitution: the CDF is integrated on
  // a uniform grid in w with z = theta + rho tan(w), still driven by
  // eval_log_kappa.
  {
    auto sd = SmoothingDensity::kernel(KernelFamily::Cauchy, rho, 1);
    const int gw = 40001;
    std::vector<double> w(gw), mass(gw);
    const double wlim = M_PI / 2 - 1e-6;
    for (int i = 0; i < gw; ++i) {
      w[i] = -wlim + 2 * wlim * i / (gw - 1);
      double tanw = std::tan(w[i]);
      double z = theta + rho * tanw;
      mass[i] = std::exp(lk1(sd, z, theta)) * rho * (1 + tanw * tanw);
    }
    std::vector<double> cum(gw, 0.0);
    for (int i = 1; i < gw; ++i)
      cum[i] = cum[i - 1] + 0.5 * (mass[i] + mass[i - 1]) * (w[i] - w[i - 1]);
    for (auto& c : cum) c /= cum.back();
    auto cdf = [&](double v) {
      double wq = std::atan((v - theta) / rho);
      double pos = (wq + wlim) / (2 * wlim) * (gw - 1);
      int i = std::clamp(static_cast<int>(pos), 0, gw - 2);
      double fr = pos - i;
      return cum[i] + fr * (cum[i + 1] - cum[i]);
    };
    RngStream rng = derive_stream(100, 17, 0);
    std::vector<double> draws(n);
    std::vector<double> t{theta};
    for (int i = 0; i < n; ++i) draws[i] = sample_kappa(sd, t, rng)[0];
    CHECK(oracles::ks_statistic(draws, cdf) < oracles::ks_critical(n, 0.01));
  }
}
