#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "axda/samplers.hpp"

namespace axda {

namespace {
// FFTW plan creation is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct CirculantGaussianSampler::Impl {
  int h, w, n;
  std::vector<double> prec_eig;  // eigenvalues of I/eta + D^T D / rho^2
  fftw_complex* buf_a;
  fftw_complex* buf_b;
  fftw_plan fwd_a;
  fftw_plan fwd_b;
  fftw_plan bwd_a;

  Impl(int height, int width, double eta, double rho)
      : h(height), w(width), n(height * width) {
    if (!(eta > 0)) throw std::domain_error("circulant sampler: eta <= 0");
    if (!(rho > 0)) throw std::domain_error("circulant sampler: rho <= 0");
    prec_eig.resize(n);
    for (int r = 0; r < h; ++r) {
      double s1 = 2 * std::sin(M_PI * r / h);
      for (int c = 0; c < w; ++c) {
        double s2 = 2 * std::sin(M_PI * c / w);
        prec_eig[r * w + c] = 1.0 / eta + (s1 * s1 + s2 * s2) / (rho * rho);
      }
    }
    buf_a = fftw_alloc_complex(n);
    buf_b = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_a = fftw_plan_dft_2d(h, w, buf_a, buf_a, FFTW_FORWARD, FFTW_ESTIMATE);
    fwd_b = fftw_plan_dft_2d(h, w, buf_b, buf_b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_a = fftw_plan_dft_2d(h, w, buf_a, buf_a, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(bwd_a);
    fftw_free(buf_a);
    fftw_free(buf_b);
  }

  void load(fftw_complex* buf, const Eigen::VectorXd& v) {
    for (int i = 0; i < n; ++i) {
      buf[i][0] = v[i];
      buf[i][1] = 0.0;
    }
  }

  Eigen::VectorXd unload_scaled(const fftw_complex* buf) {
    Eigen::VectorXd out(n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] = buf[i][0] * inv_n;
    return out;
  }
};

CirculantGaussianSampler::CirculantGaussianSampler(int height, int width,
                                                   double eta, double rho)
    : impl_(new Impl(height, width, eta, rho)) {}

CirculantGaussianSampler::~CirculantGaussianSampler() = default;

Eigen::VectorXd CirculantGaussianSampler::mean(
    const Eigen::VectorXd& linear_term) {
  auto& im = *impl_;
  if (linear_term.size() != im.n)
    throw std::invalid_argument("circulant sampler: size mismatch");
  im.load(im.buf_a, linear_term);
  fftw_execute(im.fwd_a);
  for (int i = 0; i < im.n; ++i) {
    im.buf_a[i][0] /= im.prec_eig[i];
    im.buf_a[i][1] /= im.prec_eig[i];
  }
  fftw_execute(im.bwd_a);
  return im.unload_scaled(im.buf_a);
}

Eigen::VectorXd CirculantGaussianSampler::draw(
    const Eigen::VectorXd& linear_term, RngStream& rng) {
  auto& im = *impl_;
  if (linear_term.size() != im.n)
    throw std::invalid_argument("circulant sampler: size mismatch");
  // White noise in the pixel domain keeps the Hermitian symmetry of its DFT,
  // so P^{-1/2} applied in the frequency domain yields a real field with
  // covariance P^{-1}.
  im.load(im.buf_a, linear_term);
  Eigen::VectorXd e(im.n);
  for (int i = 0; i < im.n; ++i) e[i] = rng.normal();
  im.load(im.buf_b, e);
  fftw_execute(im.fwd_a);
  fftw_execute(im.fwd_b);
  for (int i = 0; i < im.n; ++i) {
    double p = im.prec_eig[i];
    double sq = std::sqrt(p);
    im.buf_a[i][0] = im.buf_a[i][0] / p + im.buf_b[i][0] / sq;
    im.buf_a[i][1] = im.buf_a[i][1] / p + im.buf_b[i][1] / sq;
  }
  fftw_execute(im.bwd_a);
  return im.unload_scaled(im.buf_a);
}

Eigen::VectorXd sample_gaussian_circulant_fft(int height, int width,
                                              double eta, double rho,
                                              const Eigen::VectorXd& linear_term,
                                              RngStream& rng) {
  CirculantGaussianSampler sampler(height, width, eta, rho);
  return sampler.draw(linear_term, rng);
}

}  // namespace axda
