#include "axda/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

#include "axda/numerics.hpp"

namespace axda {

double sample_inverse_gaussian(double mu, double lambda, RngStream& rng) {
  if (!(mu > 0) || !(lambda > 0))
    throw std::domain_error("sample_inverse_gaussian: non-positive parameter");
  double nu = rng.normal();
  double y = nu * nu;
  double muy = mu * y;
  double x = mu + mu / (2 * lambda) * (muy - std::sqrt(muy * (4 * lambda + muy)));
  if (!(x > 0)) x = std::numeric_limits<double>::min();  // fp underflow guard
  double u = rng.uniform();
  if (u <= mu / (mu + x)) return x;
  return mu * mu / x;
}

// ---------------------------------------------------------------------------
// Log-concave rejection sampler (derivative-free upper hull from chords)
// ---------------------------------------------------------------------------

namespace {

struct HullPoint {
  double x, g;  // g = log density (unnormalized)
};

struct Segment {
  double lo, hi;   // interval, may be infinite on the outside
  double a, b;     // envelope line g <= a + b (x - x0), anchored at x0
  double x0;
  double log_mass; // log int_lo^hi exp(a + b (x - x0)) dx
};

double chord_slope(const HullPoint& p, const HullPoint& q) {
  return (q.g - p.g) / (q.x - p.x);
}

// log(exp(y) - 1) without overflow, y > 0.
double log_expm1(double y) {
  return y > 0.7 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

double segment_log_mass(double a, double b, double x0, double lo, double hi) {
  // int exp(a + b(x - x0)) over [lo,hi]
  if (std::isinf(lo) && lo < 0) {
    if (!(b > 0)) return std::numeric_limits<double>::infinity();
    return a + b * (hi - x0) - std::log(b);
  }
  if (std::isinf(hi)) {
    if (!(b < 0)) return std::numeric_limits<double>::infinity();
    return a + b * (lo - x0) - std::log(-b);
  }
  double w = hi - lo;
  if (std::abs(b) * w < 1e-12) return a + b * (0.5 * (lo + hi) - x0) + std::log(w);
  if (b > 0) return a + b * (lo - x0) + log_expm1(b * w) - std::log(b);
  return a + b * (hi - x0) + log_expm1(-b * w) - std::log(-b);
}

// Inverse-CDF draw within one piecewise-exponential segment.
double segment_draw(const Segment& s, double u) {
  if (std::isinf(s.lo) && s.lo < 0) return s.hi + std::log(u) / s.b;
  if (std::isinf(s.hi)) return s.lo + std::log1p(-u) / s.b;
  double w = s.hi - s.lo;
  if (std::abs(s.b) * w < 1e-12) return s.lo + u * w;
  if (s.b * w > 30) {
    // log(1 + u (e^{bw} - 1)) = bw + log(u + (1 - u) e^{-bw})
    return s.lo + (s.b * w + std::log(u + (1 - u) * std::exp(-s.b * w))) / s.b;
  }
  return s.lo + std::log1p(u * std::expm1(s.b * w)) / s.b;
}

// Builds the chord upper hull over the current points.  For concave g the
// chord through two points lies above g outside their interval, so each
// interval is covered by the extended chords of its neighbours.
std::vector<Segment> build_hull(const std::vector<HullPoint>& pts) {
  const int k = static_cast<int>(pts.size());
  std::vector<Segment> segs;
  auto add = [&](double lo, double hi, const HullPoint& p, double slope) {
    if (!(hi > lo)) return;
    Segment s{lo, hi, p.g, slope, p.x, 0};
    s.log_mass = segment_log_mass(s.a, s.b, s.x0, lo, hi);
    segs.push_back(s);
  };
  const double inf = std::numeric_limits<double>::infinity();
  // leftmost: extended chord (p0,p1); rightmost: extended chord (p_{k-2},p_{k-1})
  add(-inf, pts[0].x, pts[0], chord_slope(pts[0], pts[1]));
  for (int i = 0; i + 1 < k; ++i) {
    double lo = pts[i].x, hi = pts[i + 1].x;
    bool has_left = i >= 1, has_right = i + 2 < k;
    if (has_left && has_right) {
      // pointwise min of the two covering chords; they cross at most once
      double bl = chord_slope(pts[i - 1], pts[i]);
      double br = chord_slope(pts[i + 1], pts[i + 2]);
      double al = pts[i].g, ar = pts[i + 1].g;
      // line L(x) = al + bl (x - lo) vs R(x) = ar + br (x - hi)
      double denom = bl - br;
      double xc = std::abs(denom) > 0
                      ? (ar - br * hi - al + bl * lo) / denom
                      : lo;
      if (xc > lo && xc < hi) {
        // decide which line is lower on each side of the crossing by
        // comparing at the left endpoint (they are equal at xc itself)
        double Llo = al;
        double Rlo = ar + br * (lo - hi);
        if (Llo <= Rlo) {
          add(lo, xc, pts[i], bl);
          add(xc, hi, pts[i + 1], br);
        } else {
          add(lo, xc, pts[i + 1], br);
          add(xc, hi, pts[i], bl);
        }
      } else {
        double Lm = al + bl * (0.5 * (lo + hi) - lo);
        double Rm = ar + br * (0.5 * (lo + hi) - hi);
        if (Lm <= Rm) add(lo, hi, pts[i], bl);
        else add(lo, hi, pts[i + 1], br);
      }
    } else if (has_right) {
      add(lo, hi, pts[i + 1], chord_slope(pts[i + 1], pts[i + 2]));
    } else if (has_left) {
      add(lo, hi, pts[i], chord_slope(pts[i - 1], pts[i]));
    } else {
      // k == 2: cover with the flat chord (valid upper bound for concave g)
      add(lo, hi, pts[i], chord_slope(pts[i], pts[i + 1]));
    }
  }
  add(pts[k - 1].x, inf, pts[k - 1], chord_slope(pts[k - 2], pts[k - 1]));
  return segs;
}

}  // namespace

double sample_log_concave_1d(const std::function<double(double)>& neg_log_density,
                             double mode_hint, RngStream& rng) {
  auto g = [&](double x) { return -neg_log_density(x); };
  if (!std::isfinite(g(mode_hint)))
    throw std::invalid_argument(
        "sample_log_concave_1d: density not finite at mode_hint");

  std::vector<HullPoint> pts = {{mode_hint - 1, g(mode_hint - 1)},
                                {mode_hint, g(mode_hint)},
                                {mode_hint + 1, g(mode_hint + 1)}};
  // expand until the ends slope downwards (integrable tails)
  double step = 2;
  for (int i = 0; i < 200 && pts.front().g >= pts[1].g; ++i) {
    pts.insert(pts.begin(), {pts.front().x - step, g(pts.front().x - step)});
    step *= 2;
  }
  step = 2;
  for (int i = 0; i < 200 && pts.back().g >= pts[pts.size() - 2].g; ++i) {
    pts.push_back({pts.back().x + step, g(pts.back().x + step)});
    step *= 2;
  }
  if (pts.front().g >= pts[1].g || pts.back().g >= pts[pts.size() - 2].g)
    throw std::runtime_error("sample_log_concave_1d: tails do not decay");

  // scale so hull masses stay in range
  double gmax = -std::numeric_limits<double>::infinity();
  for (auto& p : pts) gmax = std::max(gmax, p.g);
  for (auto& p : pts) p.g -= gmax;

  for (int refinement = 0; refinement <= 50; ++refinement) {
    auto segs = build_hull(pts);
    std::vector<double> lm(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) lm[i] = segs[i].log_mass;
    double total = log_sum_exp(lm);
    if (!std::isfinite(total))
      throw std::runtime_error("sample_log_concave_1d: envelope not integrable");

    // a few proposals per hull before refining again
    for (int attempt = 0; attempt < 8; ++attempt) {
      double u = rng.uniform();
      double target = std::log(u) + total;
      std::size_t si = 0;
      double acc = -std::numeric_limits<double>::infinity();
      for (; si < segs.size(); ++si) {
        acc = log_sum_exp(acc, lm[si]);
        if (acc >= target) break;
      }
      if (si == segs.size()) si = segs.size() - 1;
      const Segment& s = segs[si];
      double x = segment_draw(s, rng.uniform());
      if (!std::isfinite(x)) continue;
      double env = s.a + s.b * (x - s.x0);
      double gx = g(x) - gmax;
      if (std::log(rng.uniform()) <= gx - env) return x;
      // refine with the rejected abscissa; skip near-duplicates, whose
      // chords would be dominated by rounding noise
      HullPoint np{x, gx};
      auto it = std::upper_bound(pts.begin(), pts.end(), np,
                                 [](const HullPoint& a, const HullPoint& b) {
                                   return a.x < b.x;
                                 });
      double gap = std::numeric_limits<double>::infinity();
      if (it != pts.end()) gap = std::min(gap, it->x - x);
      if (it != pts.begin()) gap = std::min(gap, x - std::prev(it)->x);
      if (gap > 1e-9 * (1 + std::abs(x))) {
        pts.insert(it, np);
        break;
      }
    }
  }
  throw std::runtime_error(
      "sample_log_concave_1d: no acceptance after 50 refinements");
}

double sample_truncated_normal_lower(double mu, double sigma, double lo,
                                     RngStream& rng) {
  if (!(sigma > 0))
    throw std::domain_error("sample_truncated_normal_lower: sigma <= 0");
  double a = (lo - mu) / sigma;
  if (a < 0.3) {
    for (int i = 0; i < 10000; ++i) {
      double x = rng.normal();
      if (x >= a) return mu + sigma * x;
    }
    throw std::runtime_error("truncated normal rejection failed");
  }
  // Robert's exponential proposal for the tail
  double lambda = 0.5 * (a + std::sqrt(a * a + 4));
  for (int i = 0; i < 100000; ++i) {
    double x = a + rng.exponential() / lambda;
    double diff = x - lambda;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) return mu + sigma * x;
  }
  throw std::runtime_error("truncated normal tail rejection failed");
}

Eigen::VectorXd sample_gaussian_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear_term,
                                          RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_gaussian_precision: factorization failed");
  Eigen::VectorXd mean = llt.solve(linear_term);
  Eigen::VectorXd xi(precision.rows());
  for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  // theta = mean + L^{-T} xi has covariance (L L^T)^{-1}
  Eigen::VectorXd noise =
      llt.matrixU().solve(xi);
  return mean + noise;
}

// ---------------------------------------------------------------------------
// Split Gibbs engine
// ---------------------------------------------------------------------------

GibbsState initial_state(const SplitModel& model) {
  GibbsState st;
  st.theta = Eigen::VectorXd::Zero(model.theta_dim);
  for (const auto& b : model.blocks) {
    st.z.push_back(Eigen::VectorXd::Zero(b.z_dim));
    st.latent.push_back(Eigen::VectorXd::Zero(b.latent_dim));
  }
  return st;
}

namespace {

void run_blocks(const SplitModel& model, GibbsState& st, std::uint64_t seed,
                long iter, bool parallel) {
  const std::size_t J = model.blocks.size();
  auto do_block = [&](std::size_t j) {
    RngStream rng = derive_stream(seed, j, static_cast<std::uint64_t>(iter));
    try {
      model.blocks[j].sample_z(st.theta, st.z[j], st.latent[j], rng);
    } catch (const std::exception& e) {
      throw std::runtime_error("block " + std::to_string(j) + ": " + e.what());
    }
  };
  if (!parallel || J < 2) {
    for (std::size_t j = 0; j < J; ++j) do_block(j);
    return;
  }
  unsigned n_threads =
      std::min<unsigned>(std::thread::hardware_concurrency(),
                         static_cast<unsigned>(J));
  if (n_threads < 2) {
    for (std::size_t j = 0; j < J; ++j) do_block(j);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t j = t; j < J; j += n_threads) do_block(j);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ChainOutput run_split_gibbs(const SplitModel& model, GibbsState state,
                            const GibbsOptions& opts) {
  if (model.blocks.empty() || !model.sample_theta)
    throw std::invalid_argument("run_split_gibbs: incomplete model");
  long burnin = opts.burnin >= 0 ? opts.burnin : opts.iters / 2;
  if (burnin > opts.iters)
    throw std::invalid_argument("run_split_gibbs: burnin > iters");
  int thinning = std::max(1, opts.thinning);
  const std::size_t J = model.blocks.size();

  long stored = (opts.iters - burnin) / thinning;
  ChainOutput out;
  out.samples.resize(stored, model.theta_dim);
  out.potential_trace.reserve(opts.iters);
  out.seed = opts.seed;
  out.iters = opts.iters;
  out.burnin = burnin;
  out.thinning = thinning;

  long row = 0;
  for (long t = 1; t <= opts.iters; ++t) {
    {
      RngStream rng = derive_stream(opts.seed, J, static_cast<std::uint64_t>(t));
      try {
        state.theta = model.sample_theta(state.theta, state.z, rng);
      } catch (const std::exception& e) {
        throw std::runtime_error("theta step failed at iteration " +
                                 std::to_string(t) + ": " + e.what());
      }
    }
    try {
      run_blocks(model, state, opts.seed, t, opts.parallel_blocks);
    } catch (const std::exception& e) {
      throw std::runtime_error("block step failed at iteration " +
                               std::to_string(t) + ": " + e.what());
    }
    if (model.target_potential)
      out.potential_trace.push_back(model.target_potential(state.theta));
    if (t > burnin && (t - burnin - 1) % thinning == 0 && row < stored) {
      out.samples.row(row++) = state.theta.transpose();
    }
  }
  return out;
}

bool bitwise_equal(const ChainOutput& a, const ChainOutput& b) {
  if (a.samples.rows() != b.samples.rows() ||
      a.samples.cols() != b.samples.cols() ||
      a.potential_trace.size() != b.potential_trace.size())
    return false;
  if (a.samples.size() > 0 &&
      std::memcmp(a.samples.data(), b.samples.data(),
                  sizeof(double) * a.samples.size()) != 0)
    return false;
  if (!a.potential_trace.empty() &&
      std::memcmp(a.potential_trace.data(), b.potential_trace.data(),
                  sizeof(double) * a.potential_trace.size()) != 0)
    return false;
  return true;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

double ess(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 10) throw std::invalid_argument("ess: need at least 10 points");
  double mean = 0;
  for (double x : series) mean += x;
  mean /= n;
  double c0 = 0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= n;
  if (c0 == 0) return 1.0;  // constant series, by convention

  auto autocov = [&](long k) {
    double c = 0;
    for (long t = 0; t + k < n; ++t)
      c += (series[t] - mean) * (series[t + k] - mean);
    return c / n;
  };
  // Geyer initial positive sequence: sum pair sums while positive.
  double acc = 0;
  for (long m = 0;; ++m) {
    long k1 = 2 * m + 1, k2 = 2 * m + 2;
    if (k1 >= n) break;
    double pair = autocov(k1) + (k2 < n ? autocov(k2) : 0.0);
    if (pair <= 0) break;
    acc += pair;
  }
  double denom = 1 + 2 * acc / c0;
  if (denom < 1e-12) denom = 1e-12;
  return std::max(1.0, n / denom);
}

double estimate_tv_mc(
    const std::function<double(const Eigen::VectorXd&)>& log_pi,
    const std::function<double(const Eigen::VectorXd&)>& log_pi_rho,
    const std::function<Eigen::VectorXd(RngStream&)>& sampler_pi,
    long n_samples, RngStream& rng) {
  double acc = 0;
  for (long i = 0; i < n_samples; ++i) {
    Eigen::VectorXd th = sampler_pi(rng);
    double r = log_pi_rho(th) - log_pi(th);
    if (r < 0) acc += -std::expm1(r);
  }
  return acc / n_samples;
}

double hpd_threshold(std::span<const double> potential_values, double alpha) {
  if (potential_values.empty())
    throw std::invalid_argument("hpd_threshold: empty sequence");
  if (!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("hpd_threshold: alpha outside (0,1)");
  std::vector<double> v(potential_values.begin(), potential_values.end());
  std::sort(v.begin(), v.end());
  const long n = static_cast<long>(v.size());
  long k = static_cast<long>(std::ceil((1 - alpha) * n));
  k = std::clamp(k, 1L, n);
  return v[k - 1];
}

}  // namespace axda
