#include "axda/models.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "axda/numerics.hpp"

namespace axda {

// ---------------------------------------------------------------------------
// Gaussian target
// ---------------------------------------------------------------------------

GaussianTarget gaussian_marginal_exact(const GaussianTarget& t, double rho) {
  GaussianTarget out = t;
  out.covariance.diagonal().array() += rho * rho;
  return out;
}

double gaussian_w2_exact(const GaussianTarget& t, double rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.covariance);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gaussian_w2_exact: eigendecomposition failed");
  double acc = 0;
  for (double lam : es.eigenvalues()) {
    double r = std::sqrt(lam + rho * rho) - std::sqrt(std::max(lam, 0.0));
    acc += r * r;
  }
  return std::sqrt(acc);
}

double gaussian_w2_paper_formula(const GaussianTarget& t, double rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.covariance);
  double acc = 0;
  for (double lam : es.eigenvalues()) {
    acc += lam + rho * rho - 2 * rho * std::sqrt(std::max(lam, 0.0));
  }
  return std::sqrt(std::max(acc, 0.0));
}

Eigen::MatrixXd squared_exponential_covariance(int d, double a) {
  Eigen::MatrixXd S(d, d);
  for (int i = 0; i < d; ++i) {
    double si = d == 1 ? 0.0 : -3.0 + 6.0 * i / (d - 1);
    for (int j = 0; j <= i; ++j) {
      double sj = d == 1 ? 0.0 : -3.0 + 6.0 * j / (d - 1);
      double v = 2 * std::exp(-(si - sj) * (si - sj) / (2 * a * a));
      S(i, j) = v;
      S(j, i) = v;
    }
    S(i, i) += 1e-6;
  }
  return S;
}

// ---------------------------------------------------------------------------
// Generalized lasso
// ---------------------------------------------------------------------------

double lasso_prior_potential(const LassoTarget& t,
                             const Eigen::VectorXd& theta) {
  return t.tau * (t.B * theta).lpNorm<1>();
}

double lasso_potential(const LassoTarget& t, const Eigen::VectorXd& theta) {
  double r = (t.y - t.X * theta).squaredNorm() / (2 * t.sigma * t.sigma);
  return r + lasso_prior_potential(t, theta);
}

double lasso_smoothed_potential(const LassoTarget& t,
                                const Eigen::VectorXd& theta, double rho) {
  // g_rho = (k/2) log(2 pi rho^2) - sum_i log I_i with
  // I_i = sqrt(pi rho^2/2) exp(tau^2 rho^2/2)
  //       [exp(-tau m) erfc(b_i) + exp(tau m) erfc(c_i)],  m = b_i' theta.
  const double tau = t.tau;
  const Eigen::VectorXd m = t.B * theta;
  const double inv_sqrt2 = 0.70710678118654752440;
  double acc = 0;
  for (int i = 0; i < m.size(); ++i) {
    double b = (rho * tau - m[i] / rho) * inv_sqrt2;
    double c = (rho * tau + m[i] / rho) * inv_sqrt2;
    double la = log_sum_exp(-tau * m[i] + log_erfc(b), tau * m[i] + log_erfc(c));
    double logI =
        0.5 * std::log(M_PI * rho * rho / 2) + tau * tau * rho * rho / 2 + la;
    acc += logI;
  }
  return 0.5 * m.size() * std::log(2 * M_PI * rho * rho) - acc;
}

double sample_lasso_z_conditional(double mu, double tau, double rho,
                                  RngStream& rng) {
  const double inv_sqrt2 = 0.70710678118654752440;
  double b = (rho * tau - mu / rho) * inv_sqrt2;
  double c = (rho * tau + mu / rho) * inv_sqrt2;
  double lwp = -tau * mu + log_erfc(b);  // z >= 0 branch
  double lwm = tau * mu + log_erfc(c);   // z <  0 branch
  double lz = log_sum_exp(lwp, lwm);
  if (std::log(rng.uniform()) <= lwp - lz) {
    return sample_truncated_normal_lower(mu - tau * rho * rho, rho, 0.0, rng);
  }
  return -sample_truncated_normal_lower(-(mu + tau * rho * rho), rho, 0.0, rng);
}

SplitModel lasso_split_model(const LassoTarget& t, double rho) {
  const int d = static_cast<int>(t.X.cols());
  const int k = static_cast<int>(t.B.rows());
  if (t.B.cols() != d || t.X.rows() != t.y.size())
    throw std::domain_error("lasso_split_model: dimension mismatch");
  if (!(t.tau >= 0) || !(t.sigma > 0) || !(rho > 0))
    throw std::domain_error("lasso_split_model: bad parameters");

  SplitModel model;
  model.theta_dim = d;

  SplitBlock blk;
  blk.z_dim = k;
  blk.coupling = GaussianCoupling{t.B, rho};
  double tau = t.tau;
  blk.potential = [tau](const Eigen::VectorXd& z) {
    return tau * z.lpNorm<1>();
  };
  Eigen::MatrixXd B = t.B;
  blk.sample_z = [B, tau, rho](const Eigen::VectorXd& theta, Eigen::VectorXd& z,
                               Eigen::VectorXd&, RngStream& rng) {
    Eigen::VectorXd mu = B * theta;
    for (int i = 0; i < mu.size(); ++i)
      z[i] = sample_lasso_z_conditional(mu[i], tau, rho, rng);
  };
  model.blocks.push_back(std::move(blk));

  Eigen::MatrixXd precision =
      t.X.transpose() * t.X / (t.sigma * t.sigma) + t.B.transpose() * t.B / (rho * rho);
  Eigen::VectorXd b0 = t.X.transpose() * t.y / (t.sigma * t.sigma);
  model.theta_prior =
      ThetaPriorQuadratic{t.X.transpose() * t.X / (t.sigma * t.sigma), b0};
  Eigen::MatrixXd Bt = t.B.transpose();
  model.sample_theta = [precision, b0, Bt, rho](
                           const Eigen::VectorXd&,
                           const std::vector<Eigen::VectorXd>& z,
                           RngStream& rng) {
    return sample_gaussian_precision(precision, b0 + Bt * z[0] / (rho * rho),
                                     rng);
  };

  LassoTarget tc = t;
  model.target_potential = [tc](const Eigen::VectorXd& theta) {
    return lasso_potential(tc, theta);
  };
  return model;
}

PenaltyProblem lasso_penalty_problem(const LassoTarget& t, double rho) {
  PenaltyProblem p;
  p.theta_dim = static_cast<int>(t.X.cols());

  PenaltyBlock like;
  like.A = t.X;
  like.rho = rho;
  Eigen::VectorXd y = t.y;
  double s2 = t.sigma * t.sigma;
  like.f = [y, s2](const Eigen::VectorXd& z) {
    return (y - z).squaredNorm() / (2 * s2);
  };
  like.prox = [y, s2](const Eigen::VectorXd& v, double rho2) {
    return Eigen::VectorXd((rho2 * y + s2 * v) / (s2 + rho2));
  };
  p.blocks.push_back(std::move(like));

  PenaltyBlock prior;
  prior.A = t.B;
  prior.rho = rho;
  double tau = t.tau;
  prior.f = [tau](const Eigen::VectorXd& z) { return tau * z.lpNorm<1>(); };
  prior.prox = [tau](const Eigen::VectorXd& v, double rho2) {
    Eigen::VectorXd z(v.size());
    double thr = tau * rho2;
    for (int i = 0; i < v.size(); ++i)
      z[i] = std::copysign(std::max(0.0, std::abs(v[i]) - thr), v[i]);
    return z;
  };
  p.blocks.push_back(std::move(prior));
  return p;
}

// ---------------------------------------------------------------------------
// Inpainting
// ---------------------------------------------------------------------------

double inpainting_eta(const InpaintingModel& m) {
  return m.eta > 0 ? m.eta : 0.9 * m.sigma * m.sigma;
}

void validate(const InpaintingModel& m) {
  const int d = m.height * m.width;
  if (m.height < 2 || m.width < 2)
    throw std::domain_error("inpainting: image must be at least 2x2");
  if (static_cast<int>(m.mask.size()) != m.y.size())
    throw std::domain_error("inpainting: mask/observation size mismatch");
  if (static_cast<int>(m.mask.size()) >= d)
    throw std::domain_error("inpainting: n must be < d");
  std::set<int> uniq(m.mask.begin(), m.mask.end());
  if (uniq.size() != m.mask.size() || *uniq.begin() < 0 || *uniq.rbegin() >= d)
    throw std::domain_error("inpainting: mask entries must be unique pixel ids");
  if (!(m.sigma > 0) || !(m.tau > 0) || !(m.rho > 0))
    throw std::domain_error("inpainting: non-positive parameter");
  // binary decimation mask has ||H'H||_S = 1
  if (!(inpainting_eta(m) < m.sigma * m.sigma))
    throw std::domain_error("inpainting: eta ||H'H||_S < sigma^2 violated");
}

void image_gradient(int height, int width, const Eigen::VectorXd& theta,
                    Eigen::VectorXd& d1, Eigen::VectorXd& d2) {
  const int d = height * width;
  d1.resize(d);
  d2.resize(d);
  for (int r = 0; r < height; ++r) {
    int rn = (r + 1) % height;
    for (int c = 0; c < width; ++c) {
      int cn = (c + 1) % width;
      int i = r * width + c;
      d1[i] = theta[rn * width + c] - theta[i];
      d2[i] = theta[r * width + cn] - theta[i];
    }
  }
}

Eigen::VectorXd image_gradient_adjoint(int height, int width,
                                       const Eigen::VectorXd& z1,
                                       const Eigen::VectorXd& z2) {
  Eigen::VectorXd out(height * width);
  for (int r = 0; r < height; ++r) {
    int rp = (r - 1 + height) % height;
    for (int c = 0; c < width; ++c) {
      int cp = (c - 1 + width) % width;
      int i = r * width + c;
      out[i] = z1[rp * width + c] - z1[i] + z2[r * width + cp] - z2[i];
    }
  }
  return out;
}

double inpainting_potential(const InpaintingModel& m,
                            const Eigen::VectorXd& theta) {
  double acc = 0;
  for (std::size_t j = 0; j < m.mask.size(); ++j) {
    double r = m.y[j] - theta[m.mask[j]];
    acc += r * r;
  }
  acc /= 2 * m.sigma * m.sigma;
  Eigen::VectorXd d1, d2;
  image_gradient(m.height, m.width, theta, d1, d2);
  for (int i = 0; i < d1.size(); ++i)
    acc += m.tau * std::hypot(d1[i], d2[i]);
  return acc;
}

void inpainting_step_z(const InpaintingModel& m, const Eigen::VectorXd& theta,
                       Eigen::VectorXd& z1, Eigen::VectorXd& z2,
                       Eigen::VectorXd& gamma, RngStream& rng) {
  const double rho2 = m.rho * m.rho;
  Eigen::VectorXd d1, d2;
  image_gradient(m.height, m.width, theta, d1, d2);
  const int d = m.height * m.width;
  for (int i = 0; i < d; ++i) {
    double nz = std::hypot(z1[i], z2[i]);
    double winv = nz > 0
                      ? sample_inverse_gaussian(m.tau / nz, m.tau * m.tau, rng)
                      : sample_inverse_gaussian(1.5, m.tau * m.tau / 2, rng);
    double g = 1.0 / winv;
    gamma[i] = g;
    double denom = rho2 + g;
    double sd = std::sqrt(rho2 * g / denom);
    z1[i] = g * d1[i] / denom + sd * rng.normal();
    z2[i] = g * d2[i] / denom + sd * rng.normal();
  }
}

Eigen::VectorXd inpainting_step_theta(const InpaintingModel& m,
                                      CirculantGaussianSampler& sampler,
                                      const Eigen::VectorXd& z1,
                                      const Eigen::VectorXd& z2,
                                      const Eigen::VectorXd& theta_prev,
                                      RngStream& rng) {
  const int d = m.height * m.width;
  const double eta = inpainting_eta(m);
  const double s2 = m.sigma * m.sigma;
  const double rho2 = m.rho * m.rho;
  // R = I/eta - H'H/sigma^2 is diagonal for a binary decimation mask.
  Eigen::VectorXd r_diag = Eigen::VectorXd::Constant(d, 1.0 / eta);
  for (int idx : m.mask) r_diag[idx] -= 1.0 / s2;
  Eigen::VectorXd lin(d);
  for (int i = 0; i < d; ++i) {
    if (!(r_diag[i] > 0))
      throw std::domain_error("inpainting theta step: eta constraint violated");
    lin[i] = r_diag[i] * theta_prev[i] + std::sqrt(r_diag[i]) * rng.normal();
  }
  for (std::size_t j = 0; j < m.mask.size(); ++j) lin[m.mask[j]] += m.y[j] / s2;
  lin += image_gradient_adjoint(m.height, m.width, z1, z2) / rho2;
  return sampler.draw(lin, rng);
}

namespace {

SplitModel inpainting_model_common(std::shared_ptr<InpaintingModel> m) {
  validate(*m);
  const int d = m->height * m->width;
  SplitModel model;
  model.theta_dim = d;

  SplitBlock blk;
  blk.z_dim = 2 * d;  // stacked [z1; z2]
  blk.latent_dim = d;
  double tau = m->tau;
  blk.potential = [d, tau](const Eigen::VectorXd& z) {
    double acc = 0;
    for (int i = 0; i < d; ++i) acc += tau * std::hypot(z[i], z[d + i]);
    return acc;
  };
  blk.sample_z = [m, d](const Eigen::VectorXd& theta, Eigen::VectorXd& z,
                        Eigen::VectorXd& latent, RngStream& rng) {
    Eigen::VectorXd z1 = z.head(d), z2 = z.tail(d);
    inpainting_step_z(*m, theta, z1, z2, latent, rng);
    z.head(d) = z1;
    z.tail(d) = z2;
  };
  model.blocks.push_back(std::move(blk));

  model.target_potential = [m](const Eigen::VectorXd& theta) {
    return inpainting_potential(*m, theta);
  };
  return model;
}

}  // namespace

SplitModel inpainting_split_model(std::shared_ptr<InpaintingModel> m) {
  SplitModel model = inpainting_model_common(m);
  const int d = m->height * m->width;
  auto sampler = std::make_shared<CirculantGaussianSampler>(
      m->height, m->width, inpainting_eta(*m), m->rho);
  model.sample_theta = [m, sampler, d](const Eigen::VectorXd& theta_prev,
                                       const std::vector<Eigen::VectorXd>& z,
                                       RngStream& rng) {
    Eigen::VectorXd z1 = z[0].head(d), z2 = z[0].tail(d);
    return inpainting_step_theta(*m, *sampler, z1, z2, theta_prev, rng);
  };
  return model;
}

SplitModel inpainting_split_model_dense(std::shared_ptr<InpaintingModel> m) {
  SplitModel model = inpainting_model_common(m);
  const int d = m->height * m->width;
  // Dense precision H'H/sigma^2 + D'D/rho^2, assembled once.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
  {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d), d1, d2;
    Eigen::MatrixXd D1(d, d), D2(d, d);
    for (int i = 0; i < d; ++i) {
      e.setZero();
      e[i] = 1;
      image_gradient(m->height, m->width, e, d1, d2);
      D1.col(i) = d1;
      D2.col(i) = d2;
    }
    Q = (D1.transpose() * D1 + D2.transpose() * D2) / (m->rho * m->rho);
    for (int idx : m->mask) Q(idx, idx) += 1.0 / (m->sigma * m->sigma);
  }
  Eigen::VectorXd hty = Eigen::VectorXd::Zero(d);
  for (std::size_t j = 0; j < m->mask.size(); ++j)
    hty[m->mask[j]] = m->y[j] / (m->sigma * m->sigma);
  model.sample_theta = [m, Q, hty, d](const Eigen::VectorXd&,
                                      const std::vector<Eigen::VectorXd>& z,
                                      RngStream& rng) {
    Eigen::VectorXd lin =
        hty + image_gradient_adjoint(m->height, m->width, z[0].head(d),
                                     z[0].tail(d)) /
                  (m->rho * m->rho);
    return sample_gaussian_precision(Q, lin, rng);
  };
  return model;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

double logistic_block_potential(const LogisticModel& m, int j, double zj) {
  double s = m.flip_sign ? -m.y[j] : m.y[j];
  return log_sum_exp(0.0, s * zj);
}

double logistic_potential(const LogisticModel& m, const Eigen::VectorXd& theta) {
  double acc = m.tau * theta.squaredNorm();
  Eigen::VectorXd t = m.X * theta;
  for (int j = 0; j < t.size(); ++j) {
    double s = m.flip_sign ? -m.y[j] : m.y[j];
    acc += log_sum_exp(0.0, s * t[j]);
  }
  return acc;
}

SplitModel logistic_split_model(const LogisticModel& m) {
  const int n = static_cast<int>(m.X.rows());
  const int d = static_cast<int>(m.X.cols());
  if (m.y.size() != n)
    throw std::domain_error("logistic_split_model: label/feature mismatch");
  for (int j = 0; j < n; ++j)
    if (m.y[j] != 1.0 && m.y[j] != -1.0)
      throw std::domain_error("logistic_split_model: labels must be in {-1,+1}");

  SplitModel model;
  model.theta_dim = d;
  const double rho = m.rho;
  for (int j = 0; j < n; ++j) {
    SplitBlock blk;
    blk.z_dim = 1;
    blk.coupling = GaussianCoupling{m.X.row(j), rho};
    double s = m.flip_sign ? -m.y[j] : m.y[j];
    blk.potential = [s](const Eigen::VectorXd& z) {
      return log_sum_exp(0.0, s * z[0]);
    };
    Eigen::RowVectorXd xj = m.X.row(j);
    blk.sample_z = [xj, s, rho](const Eigen::VectorXd& theta,
                                Eigen::VectorXd& z, Eigen::VectorXd&,
                                RngStream& rng) {
      double mu = xj.dot(theta);
      auto neg_log = [s, mu, rho](double zj) {
        return log_sum_exp(0.0, s * zj) +
               (zj - mu) * (zj - mu) / (2 * rho * rho);
      };
      z[0] = sample_log_concave_1d(neg_log, mu, rng);
    };
    model.blocks.push_back(std::move(blk));
  }

  Eigen::MatrixXd P0 = 2 * m.tau * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd precision = P0 + m.X.transpose() * m.X / (rho * rho);
  Eigen::MatrixXd Xt = m.X.transpose();
  model.theta_prior = ThetaPriorQuadratic{P0, Eigen::VectorXd::Zero(d)};
  model.sample_theta = [precision, Xt, rho, n](
                           const Eigen::VectorXd&,
                           const std::vector<Eigen::VectorXd>& z,
                           RngStream& rng) {
    Eigen::VectorXd zvec(n);
    for (int j = 0; j < n; ++j) zvec[j] = z[j][0];
    return sample_gaussian_precision(precision, Xt * zvec / (rho * rho), rng);
  };

  LogisticModel mc = m;
  model.target_potential = [mc](const Eigen::VectorXd& theta) {
    return logistic_potential(mc, theta);
  };
  return model;
}

PenaltyProblem logistic_penalty_problem(const LogisticModel& m) {
  const int n = static_cast<int>(m.X.rows());
  const int d = static_cast<int>(m.X.cols());
  PenaltyProblem p;
  p.theta_dim = d;
  for (int j = 0; j < n; ++j) {
    PenaltyBlock blk;
    blk.A = m.X.row(j);
    blk.rho = m.rho;
    double s = m.flip_sign ? -m.y[j] : m.y[j];
    blk.f = [s](const Eigen::VectorXd& z) {
      return log_sum_exp(0.0, s * z[0]);
    };
    blk.prox = [s](const Eigen::VectorXd& v, double rho2) {
      // guarded Newton on log(1+e^{s z}) + (z - v)^2 / (2 rho2)
      double z = v[0];
      for (int it = 0; it < 10; ++it) {
        double sig = 1.0 / (1.0 + std::exp(-s * z));
        double grad = s * sig + (z - v[0]) / rho2;
        double hess = s * s * sig * (1 - sig) + 1.0 / rho2;
        double step = grad / hess;
        step = std::clamp(step, -10.0, 10.0);
        z -= step;
      }
      return Eigen::VectorXd::Constant(1, z);
    };
    p.blocks.push_back(std::move(blk));
  }
  // ridge prior tau ||theta||^2 as a quadratic block with A = I
  PenaltyBlock prior;
  prior.A = Eigen::MatrixXd::Identity(d, d);
  prior.rho = m.rho;
  double tau = m.tau;
  prior.f = [tau](const Eigen::VectorXd& z) { return tau * z.squaredNorm(); };
  prior.prox = [tau](const Eigen::VectorXd& v, double rho2) {
    return Eigen::VectorXd(v / (1 + 2 * tau * rho2));
  };
  p.blocks.push_back(std::move(prior));
  return p;
}

// ---------------------------------------------------------------------------
// Lipschitz losses
// ---------------------------------------------------------------------------

LossValue loss_eval(const LipschitzLoss& l, double y, double t) {
  switch (l.tag) {
    case LossTag::Hinge:
      if (y != 1.0 && y != -1.0)
        throw std::domain_error("hinge loss: label must be in {-1,+1}");
      return {std::max(0.0, 1 - y * t), 1.0};
    case LossTag::Huber: {
      if (!(l.delta > 0)) throw std::domain_error("huber loss: delta <= 0");
      double r = std::abs(y - t);
      double v = r <= l.delta ? r * r / (2 * l.delta) : r - l.delta / 2;
      return {v, 1.0};
    }
    case LossTag::Logistic:
      if (y != 1.0 && y != -1.0)
        throw std::domain_error("logistic loss: label must be in {-1,+1}");
      return {log_sum_exp(0.0, -y * t), 1.0};
    case LossTag::Pinball: {
      if (!(l.pinball_tau > 0 && l.pinball_tau < 1))
        throw std::domain_error("pinball loss: tau outside (0,1)");
      double v = l.pinball_tau * std::max(0.0, t - y) +
                 (1 - l.pinball_tau) * std::max(0.0, y - t);
      return {v, 1.0};
    }
    case LossTag::Absolute: return {std::abs(y - t), 1.0};
  }
  throw std::logic_error("unknown loss tag");
}

}  // namespace axda
