#pragma once

// Seeded random streams, conjugate updates and the samplers the experiments
// draw from. Every sampler is a pure function of its parameters and the
// (seed, stream_id) pair it is handed.

#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"
#include "postproj/normal.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace postproj {

using Engine = std::mt19937_64;

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // The seed sequence mixes both words, so streams sharing a seed diverge
  // from the first draw.
  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x70726f6au};
    return Engine(seq);
  }

  RngStream child(std::uint64_t k) const { return RngStream{seed, stream_id * 1000003ULL + k + 1}; }
};

namespace rng {

inline double uniform(Engine& eng) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }

// Uniform on (0, 1]; safe to take the log of.
inline double uniform_pos(Engine& eng) { return 1.0 - uniform(eng); }

inline double standard_normal(Engine& eng) { return std::normal_distribution<double>(0.0, 1.0)(eng); }

// log of a Gamma(shape, 1) draw. Shapes below one go through
// G(shape) = G(shape + 1) U^{1/shape} so tiny shapes do not underflow.
inline double log_gamma_draw(double shape, Engine& eng) {
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(eng));
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(eng);
  return std::log(g) + std::log(uniform_pos(eng)) / shape;
}

inline double beta_draw(double a, double b, Engine& eng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(eng);
  const double y = std::gamma_distribution<double>(b, 1.0)(eng);
  return x / (x + y);
}

}  // namespace rng

struct GaussianPosterior {
  double theta_n = 0.0;
  double sigma_n2 = 1.0;

  double sigma_n() const { return std::sqrt(sigma_n2); }
  double alpha(double lower) const { return (lower - theta_n) / sigma_n(); }
  double beta(double upper) const { return (upper - theta_n) / sigma_n(); }
};

// Normal(theta0, sigma0_2) prior, Normal(theta, sigma2) likelihood with
// sigma2 known.
inline GaussianPosterior gaussian_conjugate_update(double theta0, double sigma0_2, double sigma2,
                                                   std::span<const double> data) {
  if (data.empty()) throw InvalidInput("gaussian_conjugate_update: empty data");
  if (!(sigma0_2 > 0.0) || !(sigma2 > 0.0)) throw InvalidInput("gaussian_conjugate_update: variances must be positive");
  double sum = 0.0;
  for (double x : data) sum += x;
  const double n = static_cast<double>(data.size());
  const double precision = 1.0 / sigma0_2 + n / sigma2;
  const double var = 1.0 / precision;
  return GaussianPosterior{var * (theta0 / sigma0_2 + sum / sigma2), var};
}

inline std::vector<double> sample_normal(double mu, double sigma, std::size_t n, Engine& eng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
    throw InvalidInput("sample_normal: requires finite mu and sigma > 0");
  std::vector<double> out(n);
  for (auto& x : out) x = mu + sigma * rng::standard_normal(eng);
  return out;
}

inline std::vector<double> sample_normal(double mu, double sigma, std::size_t n, const RngStream& stream) {
  Engine eng = stream.engine();
  return sample_normal(mu, sigma, n, eng);
}

namespace detail {

// Standard normal restricted to [a, b] with a > 5: exponential proposal
// (rate tuned to a) when the window is wide, uniform proposal when narrow.
inline double upper_tail_normal(double a, double b, Engine& eng) {
  if (std::isfinite(b) && a * (b - a) < 1.0) {
    for (;;) {
      const double z = a + (b - a) * rng::uniform(eng);
      if (std::log(rng::uniform_pos(eng)) <= 0.5 * (a * a - z * z)) return z;
    }
  }
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng::uniform_pos(eng)) / rate;
    if (z > b) continue;
    if (std::log(rng::uniform_pos(eng)) <= -0.5 * (z - rate) * (z - rate)) return z;
  }
}

inline double truncated_standard_normal(double a, double b, Engine& eng) {
  constexpr double kTailSwitch = 5.0;
  if (a > kTailSwitch) return upper_tail_normal(a, b, eng);
  if (b < -kTailSwitch) return -upper_tail_normal(-b, -a, eng);
  // Inverse CDF on whichever side keeps Phi away from 1.
  const bool mirror = a > 0.0;
  const double lo = mirror ? -b : a;
  const double hi = mirror ? -a : b;
  const double plo = normal::cdf(lo);
  const double phi = normal::cdf(hi);
  double u = plo + (phi - plo) * rng::uniform(eng);
  u = std::min(std::max(u, std::nextafter(0.0, 1.0)), std::nextafter(1.0, 0.0));
  double z = std::clamp(normal::quantile(u), lo, hi);
  return mirror ? -z : z;
}

}  // namespace detail

inline std::vector<double> sample_truncated_normal(double mu, double sigma, double lower, double upper, std::size_t n,
                                                   Engine& eng) {
  if (!(sigma > 0.0)) throw InvalidInput("sample_truncated_normal: sigma must be positive");
  if (!(lower < upper)) throw InvalidInput("sample_truncated_normal: requires lower < upper");
  const double a = (lower - mu) / sigma;
  const double b = (upper - mu) / sigma;
  std::vector<double> out(n);
  for (auto& x : out) x = std::clamp(mu + sigma * detail::truncated_standard_normal(a, b, eng), lower, upper);
  return out;
}

inline std::vector<double> sample_truncated_normal(double mu, double sigma, double lower, double upper, std::size_t n,
                                                   const RngStream& stream) {
  Engine eng = stream.engine();
  return sample_truncated_normal(mu, sigma, lower, upper, n, eng);
}

// One Dirichlet(alpha) draw via normalised gamma variates, combined in log
// space.
inline Vector dirichlet_draw(const Vector& alpha, Engine& eng) {
  Vector logs(alpha.size());
  for (Eigen::Index j = 0; j < alpha.size(); ++j) logs[j] = rng::log_gamma_draw(alpha[j], eng);
  const double mx = logs.maxCoeff();
  Vector w = (logs.array() - mx).exp();
  return w / w.sum();
}

inline Matrix sample_dirichlet(const Vector& alpha, std::size_t n, Engine& eng) {
  if (alpha.size() == 0) throw ShapeError("sample_dirichlet: empty alpha");
  if (!alpha.allFinite() || (alpha.array() <= 0.0).any()) throw InvalidInput("sample_dirichlet: alpha must be positive");
  Matrix out(static_cast<Eigen::Index>(n), alpha.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = dirichlet_draw(alpha, eng).transpose();
  return out;
}

inline Matrix sample_dirichlet(const Vector& alpha, std::size_t n, const RngStream& stream) {
  Engine eng = stream.engine();
  return sample_dirichlet(alpha, n, eng);
}

inline std::vector<long> sample_multinomial(long trials, const Vector& probs, Engine& eng) {
  std::vector<long> counts(static_cast<std::size_t>(probs.size()), 0);
  double remaining = 1.0;
  long left = trials;
  for (Eigen::Index j = 0; j + 1 < probs.size() && left > 0; ++j) {
    const double p = remaining > 0.0 ? std::clamp(probs[j] / remaining, 0.0, 1.0) : 0.0;
    const long k = std::binomial_distribution<long>(left, p)(eng);
    counts[static_cast<std::size_t>(j)] = k;
    left -= k;
    remaining -= probs[j];
  }
  if (probs.size() > 0) counts.back() += left;
  return counts;
}

struct VmfPosterior {
  Vector mu_n;
  double psi_n = 0.0;
};

// vMF(mu, psi) prior combined with the resultant of the rows of `data`:
// psi_n = ||n xbar + psi mu||, mu_n = (n xbar + psi mu) / psi_n.
inline VmfPosterior vmf_posterior_update(const Vector& mu, double psi, const Matrix& data) {
  if (std::abs(mu.norm() - 1.0) > 1e-10) throw InvalidInput("vmf_posterior_update: mu must be a unit vector");
  if (!(psi > 0.0)) throw InvalidInput("vmf_posterior_update: psi must be positive");
  if (data.rows() > 0 && data.cols() != mu.size()) throw ShapeError("vmf_posterior_update: data width != dim(mu)");
  Vector resultant = psi * mu;
  if (data.rows() > 0) resultant += data.colwise().sum().transpose();
  const double psi_n = resultant.norm();
  if (!(psi_n > 0.0)) throw Degenerate("vmf_posterior_update: zero resultant vector");
  return VmfPosterior{resultant / psi_n, psi_n};
}

// Wood's rejection sampler for the cosine w = mu'x, then a uniform direction
// in the orthogonal complement of mu.
inline Matrix sample_vmf(const Vector& mu, double psi, std::size_t n, Engine& eng) {
  const Eigen::Index m = mu.size();
  if (m < 2) throw ShapeError("sample_vmf: dimension must be at least 2");
  if (std::abs(mu.norm() - 1.0) > 1e-10) throw InvalidInput("sample_vmf: mu must be a unit vector");
  if (!(psi >= 0.0) || !std::isfinite(psi)) throw InvalidInput("sample_vmf: psi must be finite and >= 0");
  const double dm1 = static_cast<double>(m - 1);
  const double b = dm1 / (2.0 * psi + std::sqrt(4.0 * psi * psi + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = psi * x0 + dm1 * std::log(1.0 - x0 * x0);
  Matrix out(static_cast<Eigen::Index>(n), m);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double w;
    for (;;) {
      const double z = rng::beta_draw(0.5 * dm1, 0.5 * dm1, eng);
      w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
      if (psi * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(rng::uniform_pos(eng))) break;
    }
    Vector v(m);
    double vnorm = 0.0;
    do {
      for (Eigen::Index j = 0; j < m; ++j) v[j] = rng::standard_normal(eng);
      v -= v.dot(mu) * mu;
      vnorm = v.norm();
    } while (!(vnorm > 1e-12));
    Vector x = w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * (v / vnorm);
    out.row(i) = (x / x.norm()).transpose();
  }
  return out;
}

inline Matrix sample_vmf(const Vector& mu, double psi, std::size_t n, const RngStream& stream) {
  Engine eng = stream.engine();
  return sample_vmf(mu, psi, n, eng);
}

}  // namespace postproj
