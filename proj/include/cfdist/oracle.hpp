#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "cfdist/cf_library.hpp"
#include "cfdist/errors.hpp"

namespace cfdist {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// Fixed per-sampler stream tags: adding a sampler never perturbs the streams
// of the existing ones.
namespace stream_tag {
inline constexpr std::uint64_t bartlett = 0x4241524c45545431ULL;
inline constexpr std::uint64_t wilks = 0x57494c4b534c4d31ULL;
inline constexpr std::uint64_t wilks_cs = 0x57494c4b53435331ULL;
inline constexpr std::uint64_t quadform = 0x5155414446524d31ULL;
}  // namespace stream_tag

/// xoshiro256++ with splitmix64 seeding: a named, seedable generator whose
/// u64 stream is identical across platforms. Gamma variates use the
/// Marsaglia-Tsang squeeze method (with the shape < 1 boost), normals the
/// Box-Muller transform, betas a ratio of gammas.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t tag = 0) {
    std::uint64_t s = seed ^ detail::rotl64(tag, 17);
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape) with unit scale.
  double next_gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("next_gamma: shape must be positive");
    if (shape < 1.0)
      return next_gamma(shape + 1.0) * std::pow(next_unit(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_unit();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    const double ga = next_gamma(a);
    const double gb = next_gamma(b);
    return ga / (ga + gb);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct SimulationConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
  std::vector<double> quantile_probs;  // empirical quantiles to report
};

struct SampleSummary {
  std::vector<double> samples;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n - 1 in the denominator)
  std::vector<std::pair<double, double>> quantiles;  // (prob, order statistic)
};

namespace detail {

inline SampleSummary summarize(std::vector<double> samples, std::span<const double> probs) {
  SampleSummary s;
  s.samples = std::move(samples);
  const std::size_t n = s.samples.size();
  double mean = 0.0;
  for (double v : s.samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : s.samples) ss += (v - mean) * (v - mean);
  s.mean = mean;
  s.std_dev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

  if (!probs.empty()) {
    std::vector<double> sorted = s.samples;
    std::sort(sorted.begin(), sorted.end());
    for (double p : probs) {
      if (!(p > 0.0) || !(p < 1.0))
        throw DomainError("summarize: quantile probabilities must lie in (0, 1)");
      const auto idx = static_cast<std::size_t>(
          std::min<double>(std::ceil(p * static_cast<double>(n)) - 1.0,
                           static_cast<double>(n - 1)));
      s.quantiles.emplace_back(p, sorted[std::max<std::size_t>(idx, 0)]);
    }
  }
  return s;
}

}  // namespace detail

/// Samples the corrected variance-homogeneity statistic from its defining
/// representation: X_l ~ Gamma(nu_l / 2) independent (the common scale drops
/// out of the ratio), ratio = weighted geometric mean over arithmetic mean
/// with weights nu_l / nu, statistic = c/b - (nu/b) log(ratio).
inline SampleSummary simulate_bartlett(std::span<const double> nu, const SimulationConfig& config) {
  const auto coef = bartlett_coefficients(nu);
  if (config.n_samples < 1) throw DomainError("simulate_bartlett: need at least one sample");
  const std::size_t k = nu.size();
  const double log_k = std::log(static_cast<double>(k));

  RandomStream rng(config.seed, stream_tag::bartlett);
  std::vector<double> out(config.n_samples);
  for (auto& sample : out) {
    double log_gm = 0.0, sum = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const double x = rng.next_gamma(nu[l] / 2.0);
      log_gm += (nu[l] / coef.nu_total) * std::log(x);
      sum += x;
    }
    const double log_ratio = log_gm - (std::log(sum) - log_k);
    sample = coef.c / coef.b - (coef.nu_total / coef.b) * log_ratio;
  }
  return detail::summarize(std::move(out), config.quantile_probs);
}

/// Samples -sum_j log B_j with B_j ~ Beta((n-j+1)/2, q/2), j = 1..p.
inline SampleSummary simulate_wilks(int p, int n, int q, const SimulationConfig& config) {
  if (p < 1 || n < p || q < 1) throw DomainError("simulate_wilks: need n >= p >= 1 and q >= 1");
  if (config.n_samples < 1) throw DomainError("simulate_wilks: need at least one sample");

  RandomStream rng(config.seed, stream_tag::wilks);
  std::vector<double> out(config.n_samples);
  for (auto& sample : out) {
    double acc = 0.0;
    for (int j = 1; j <= p; ++j)
      acc -= std::log(rng.next_beta((static_cast<double>(n - j) + 1.0) / 2.0,
                                    static_cast<double>(q) / 2.0));
    sample = acc;
  }
  return detail::summarize(std::move(out), config.quantile_probs);
}

/// Samples -log B1 - (p-1) log B2 with B1 ~ Beta((n-q)/2, (q-1)/2) and
/// B2 ~ Beta((n-q)(p-1)/2, (q-1)(p-1)/2).
inline SampleSummary simulate_wilks_cs(int p, int n, int q, const SimulationConfig& config) {
  if (p < 2 || q < 2 || n <= q)
    throw DomainError("simulate_wilks_cs: need p >= 2 and n > q >= 2");
  if (config.n_samples < 1) throw DomainError("simulate_wilks_cs: need at least one sample");

  const double nq = static_cast<double>(n - q);
  const double qm1 = static_cast<double>(q - 1);
  const double pm1 = static_cast<double>(p - 1);

  RandomStream rng(config.seed, stream_tag::wilks_cs);
  std::vector<double> out(config.n_samples);
  for (auto& sample : out) {
    const double b1 = rng.next_beta(nq / 2.0, qm1 / 2.0);
    const double b2 = rng.next_beta(pm1 * nq / 2.0, pm1 * qm1 / 2.0);
    sample = -std::log(b1) - pm1 * std::log(b2);
  }
  return detail::summarize(std::move(out), config.quantile_probs);
}

/// Samples sum_j lambda_j Z_j^2 with independent standard normals Z_j.
inline SampleSummary simulate_quadform(std::span<const double> lambdas,
                                       const SimulationConfig& config) {
  if (lambdas.empty()) throw DomainError("simulate_quadform: empty eigenvalue list");
  for (double l : lambdas)
    if (l < 0.0) throw DomainError("simulate_quadform: eigenvalues must be nonnegative");
  if (config.n_samples < 1) throw DomainError("simulate_quadform: need at least one sample");

  RandomStream rng(config.seed, stream_tag::quadform);
  std::vector<double> out(config.n_samples);
  for (auto& sample : out) {
    double acc = 0.0;
    for (double l : lambdas) {
      const double z = rng.next_normal();
      acc += l * z * z;
    }
    sample = acc;
  }
  return detail::summarize(std::move(out), config.quantile_probs);
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF:
/// sup_i max(|i/n - F(x_(i))|, |(i-1)/n - F(x_(i))|) over the sorted sample.
inline double ks_distance(std::span<const double> samples,
                          const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double hi = std::abs(static_cast<double>(i + 1) / n - f);
    const double lo = std::abs(static_cast<double>(i) / n - f);
    d = std::max({d, hi, lo});
  }
  return d;
}

}  // namespace cfdist
