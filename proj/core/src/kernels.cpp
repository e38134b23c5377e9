#include "axda/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "axda/numerics.hpp"

namespace axda {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double dirichlet_log_density(double u) {
  // sin^2(u) / (pi u^2); the u -> 0 limit is 1/pi.
  double au = std::abs(u);
  if (au < 1e-8) return -std::log(M_PI);
  double s = std::sin(u) / u;
  if (s == 0.0) return kNegInf;
  return 2 * std::log(std::abs(s)) - std::log(M_PI);
}

// Second moment of the univariate kernel (the Table-of-m2 values are
// sqrt(d * this)).
std::optional<double> kernel_univariate_variance(KernelFamily k) {
  switch (k) {
    case KernelFamily::Gaussian: return 1.0;
    case KernelFamily::Laplace: return 2.0;
    case KernelFamily::Uniform: return 1.0 / 3.0;
    case KernelFamily::Triangular: return 1.0 / 6.0;
    case KernelFamily::Epanechnikov: return 1.0 / 5.0;
    case KernelFamily::Cauchy:
    case KernelFamily::Dirichlet: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

double kernel_log_density(KernelFamily k, double u) {
  switch (k) {
    case KernelFamily::Gaussian: return -0.5 * u * u - 0.5 * kLog2Pi;
    case KernelFamily::Cauchy: return -std::log(M_PI * (1 + u * u));
    case KernelFamily::Laplace: return -std::abs(u) - std::log(2.0);
    case KernelFamily::Dirichlet: return dirichlet_log_density(u);
    case KernelFamily::Uniform:
      return std::abs(u) <= 1 ? -std::log(2.0) : kNegInf;
    case KernelFamily::Triangular:
      return std::abs(u) < 1 ? std::log(1 - std::abs(u)) : kNegInf;
    case KernelFamily::Epanechnikov:
      return std::abs(u) < 1 ? std::log(0.75 * (1 - u * u)) : kNegInf;
  }
  throw std::logic_error("unknown kernel family");
}

bool kernel_compact_support(KernelFamily k) {
  return k == KernelFamily::Uniform || k == KernelFamily::Triangular ||
         k == KernelFamily::Epanechnikov;
}

double kernel_sample(KernelFamily k, RngStream& rng) {
  switch (k) {
    case KernelFamily::Gaussian: return rng.normal();
    case KernelFamily::Cauchy: {
      // ratio of two independent standard normals
      double num = rng.normal(), den = rng.normal();
      while (den == 0.0) den = rng.normal();
      return num / den;
    }
    case KernelFamily::Laplace: {
      double u = rng.uniform() - 0.5;
      return (u < 0 ? 1.0 : -1.0) * std::log1p(-2 * std::abs(u));
    }
    case KernelFamily::Uniform: return 2 * rng.uniform() - 1;
    case KernelFamily::Triangular: {
      double u = rng.uniform();
      return u < 0.5 ? std::sqrt(2 * u) - 1 : 1 - std::sqrt(2 * (1 - u));
    }
    case KernelFamily::Epanechnikov: {
      // median of three uniforms on [-1,1]
      double a = 2 * rng.uniform() - 1;
      double b = 2 * rng.uniform() - 1;
      double c = 2 * rng.uniform() - 1;
      double lo = std::min(a, std::min(b, c));
      double hi = std::max(a, std::max(b, c));
      return a + b + c - lo - hi;
    }
    case KernelFamily::Dirichlet:
      throw std::runtime_error("Dirichlet kernel is eval-only (no sampler)");
  }
  throw std::logic_error("unknown kernel family");
}

std::optional<double> kernel_moment(KernelFamily k, int d, int p) {
  if (p < 1) throw std::invalid_argument("kernel_moment: p must be >= 1");
  if (d < 1) throw std::invalid_argument("kernel_moment: d must be >= 1");
  if (k == KernelFamily::Cauchy || k == KernelFamily::Dirichlet)
    return std::nullopt;  // no finite moments of order >= 1
  if (p == 2) {
    return std::sqrt(static_cast<double>(d) * *kernel_univariate_variance(k));
  }
  if (d == 1) {
    double lim = kernel_compact_support(k) ? 1.0 : 60.0;
    double m = 2 * adaptive_simpson(
                       [&](double u) {
                         double lk = kernel_log_density(k, u);
                         return std::isfinite(lk)
                                    ? std::pow(u, p) * std::exp(lk)
                                    : 0.0;
                       },
                       0.0, lim, 1e-12, 1e-300);
    return std::pow(m, 1.0 / p);
  }
  // d > 1, p != 2: Monte Carlo with a fixed internal seed.
  RngStream rng = derive_stream(0x6d6f6d656e74ULL, static_cast<unsigned>(k),
                                static_cast<std::uint64_t>(d) * 131 + p);
  const int n = 200000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    double s2 = 0;
    for (int j = 0; j < d; ++j) {
      double u = kernel_sample(k, rng);
      s2 += u * u;
    }
    acc += std::pow(s2, p / 2.0);
  }
  return std::pow(acc / n, 1.0 / p);
}

DivergenceDomain divergence_domain(DivergenceFamily f) {
  switch (f) {
    case DivergenceFamily::SquaredLoss:
    case DivergenceFamily::AbsoluteLoss:
      return {-std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
    case DivergenceFamily::ItakuraSaito:
      return {0.0, std::numeric_limits<double>::infinity()};
    case DivergenceFamily::LogisticLoss:
    case DivergenceFamily::KullbackLeibler: return {0.0, 1.0};
  }
  throw std::logic_error("unknown divergence family");
}

double bregman_univariate(DivergenceFamily f, double z, double theta) {
  auto dom = divergence_domain(f);
  if (!(z > dom.lo && z < dom.hi && theta > dom.lo && theta < dom.hi)) {
    // unbounded domains admit the endpoints
    bool ok = std::isinf(dom.lo) || (z > dom.lo && theta > dom.lo);
    ok = ok && (std::isinf(dom.hi) || (z < dom.hi && theta < dom.hi));
    if (!ok) throw std::domain_error("divergence argument outside domain");
  }
  switch (f) {
    case DivergenceFamily::SquaredLoss: {
      double r = z - theta;
      return 0.5 * r * r;  // Bregman divergence of psi(z) = z^2/2
    }
    case DivergenceFamily::AbsoluteLoss: return std::abs(z - theta);
    case DivergenceFamily::LogisticLoss: {
      auto xlogx = [](double a, double b) {
        return a == 0.0 ? 0.0 : a * std::log(a / b);
      };
      return xlogx(z, theta) + xlogx(1 - z, 1 - theta);
    }
    case DivergenceFamily::ItakuraSaito: {
      double r = z / theta;
      return r - std::log(r) - 1;
    }
    case DivergenceFamily::KullbackLeibler: {
      // Bregman divergence of psi(z) = z log z
      double t = z == 0.0 ? 0.0 : z * std::log(z / theta);
      return t - z + theta;
    }
  }
  throw std::logic_error("unknown divergence family");
}

double eval_bregman(DivergenceFamily f, std::span<const double> z,
                    std::span<const double> theta) {
  if (z.size() != theta.size())
    throw std::invalid_argument("eval_bregman: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    s += bregman_univariate(f, z[i], theta[i]);
  return s;
}

SmoothingDensity::SmoothingDensity(bool k, int fam, double rho, int dim)
    : is_kernel_(k),
      family_(fam),
      rho_(rho),
      dim_(dim),
      cache_(std::make_shared<NormalizerCache>()) {
  if (!(rho > 0)) throw std::invalid_argument("SmoothingDensity: rho <= 0");
  if (dim < 1) throw std::invalid_argument("SmoothingDensity: dim < 1");
}

SmoothingDensity SmoothingDensity::kernel(KernelFamily k, double rho,
                                          int dim) {
  return SmoothingDensity(true, static_cast<int>(k), rho, dim);
}

SmoothingDensity SmoothingDensity::divergence(DivergenceFamily f, double rho,
                                              int dim) {
  return SmoothingDensity(false, static_cast<int>(f), rho, dim);
}

KernelFamily SmoothingDensity::kernel_family() const {
  if (!is_kernel_) throw std::logic_error("not a kernel source");
  return static_cast<KernelFamily>(family_);
}

DivergenceFamily SmoothingDensity::divergence_family() const {
  if (is_kernel_) throw std::logic_error("not a divergence source");
  return static_cast<DivergenceFamily>(family_);
}

double SmoothingDensity::divergence_log_normalizer(double theta) const {
  auto f = static_cast<DivergenceFamily>(family_);
  switch (f) {
    case DivergenceFamily::SquaredLoss:
      // Gaussian with variance rho
      return 0.5 * std::log(2 * M_PI * rho_);
    case DivergenceFamily::AbsoluteLoss:
      // Laplace with scale rho
      return std::log(2 * rho_);
    case DivergenceFamily::ItakuraSaito:
      // exp(-phi/rho) = Gamma(1/rho + 1, theta rho) kernel, closed form
      return std::lgamma(1 / rho_ + 1) + std::log(theta) +
             (1 / rho_ + 1) * std::log(rho_) + 1 / rho_;
    case DivergenceFamily::LogisticLoss:
    case DivergenceFamily::KullbackLeibler: {
      // theta-dependent; cache the [0,1] quadrature
      {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(theta);
        if (it != cache_->values.end()) return it->second;
      }
      double Z = adaptive_simpson(
          [&](double z) {
            return std::exp(-bregman_univariate(f, z, theta) / rho_);
          },
          1e-14, 1.0 - 1e-14, 1e-10, 1e-300);
      if (!(Z > 0) || !std::isfinite(Z))
        throw std::runtime_error(
            "smoothing density not normalizable for this configuration");
      double lz = std::log(Z);
      std::lock_guard<std::mutex> lock(cache_->mutex);
      cache_->values.emplace(theta, lz);
      return lz;
    }
  }
  throw std::logic_error("unknown divergence family");
}

double SmoothingDensity::log_density(std::span<const double> z,
                                     std::span<const double> theta) const {
  if (static_cast<int>(z.size()) != dim_ ||
      static_cast<int>(theta.size()) != dim_)
    throw std::invalid_argument("eval_log_kappa: dimension mismatch");
  double acc = 0;
  if (is_kernel_) {
    auto k = static_cast<KernelFamily>(family_);
    for (int i = 0; i < dim_; ++i) {
      acc += kernel_log_density(k, (theta[i] - z[i]) / rho_);
    }
    return acc - dim_ * std::log(rho_);
  }
  auto f = static_cast<DivergenceFamily>(family_);
  for (int i = 0; i < dim_; ++i) {
    acc += -bregman_univariate(f, z[i], theta[i]) / rho_ -
           divergence_log_normalizer(theta[i]);
  }
  return acc;
}

std::vector<double> SmoothingDensity::sample(std::span<const double> theta,
                                             RngStream& rng) const {
  if (static_cast<int>(theta.size()) != dim_)
    throw std::invalid_argument("sample_kappa: dimension mismatch");
  std::vector<double> z(dim_);
  if (is_kernel_) {
    auto k = static_cast<KernelFamily>(family_);
    for (int i = 0; i < dim_; ++i) z[i] = theta[i] + rho_ * kernel_sample(k, rng);
    return z;
  }
  if (static_cast<DivergenceFamily>(family_) == DivergenceFamily::SquaredLoss) {
    double s = std::sqrt(rho_);
    for (int i = 0; i < dim_; ++i) z[i] = theta[i] + s * rng.normal();
    return z;
  }
  throw std::runtime_error("sample_kappa: unsupported source");
}

double eval_log_kappa(const SmoothingDensity& sd, std::span<const double> z,
                      std::span<const double> theta) {
  return sd.log_density(z, theta);
}

std::vector<double> sample_kappa(const SmoothingDensity& sd,
                                 std::span<const double> theta,
                                 RngStream& rng) {
  return sd.sample(theta, rng);
}

}  // namespace axda
