#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "cfdist/characteristic_function.hpp"
#include "cfdist/complex_gamma.hpp"
#include "cfdist/errors.hpp"

namespace cfdist {

namespace detail {

/// Tail sum_{j >= a} j^{-s} by explicit summation up to 64 followed by
/// Euler-Maclaurin with three Bernoulli corrections; good to ~1e-16 for
/// s in {2, 4, 6}.
inline double zeta_tail(double s, int a) {
  double head = 0.0;
  int m = a;
  while (m < 64) {
    head += std::pow(static_cast<double>(m), -s);
    ++m;
  }
  const double x = static_cast<double>(m);
  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  tail += s / 12.0 * std::pow(x, -s - 1.0);
  tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(x, -s - 3.0);
  tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * std::pow(x, -s - 5.0);
  return head + tail;
}

/// log of the CF of coef*log(B) with B ~ Beta(alpha, beta); shared by the
/// beta-product constructors so that single-factor cases reduce exactly.
inline std::complex<double> log_cf_log_beta(double t, double alpha, double beta, double coef) {
  const double s = coef * t;
  return gamma_ratio_ln({alpha, s}, {alpha, 0.0}) +
         gamma_ratio_ln({alpha + beta, 0.0}, {alpha + beta, s});
}

}  // namespace detail

/// CF of the chi-square distribution with df degrees of freedom:
/// (1 - 2it)^(-df/2) on the principal branch (Re(1 - 2it) = 1 > 0, so the
/// branch is continuous in t).
inline std::complex<double> cf_chi2(double t, double df) {
  if (!(df > 0.0)) throw DomainError("cf_chi2: df must be positive");
  if (t == 0.0) return {1.0, 0.0};
  return std::exp(-0.5 * df * std::log(std::complex<double>(1.0, -2.0 * t)));
}

/// CF of a quadratic form in standard normals, sum_j lambda_j Z_j^2:
/// prod_j (1 - 2 i lambda_j t)^(-1/2).
inline std::complex<double> cf_quadform(double t, std::span<const double> lambdas) {
  if (lambdas.empty()) throw DomainError("cf_quadform: empty eigenvalue list");
  bool any_positive = false;
  for (double l : lambdas) {
    if (l < 0.0) throw DomainError("cf_quadform: eigenvalues must be nonnegative");
    if (l > 0.0) any_positive = true;
  }
  if (!any_positive) throw DomainError("cf_quadform: all eigenvalues are zero");
  std::complex<double> log_acc{0.0, 0.0};
  for (double l : lambdas) log_acc += std::log(std::complex<double>(1.0, -2.0 * l * t));
  return std::exp(-0.5 * log_acc);
}

/// Truncated product prod_{j=1..terms} (1 - 2 i w(j) t)^(-1/2) for a weight
/// sequence w; the building block behind the weighted chi-square sums.
template <typename WeightFn>
inline std::complex<double> cf_weighted_chi2_product(double t, WeightFn weight, int terms) {
  if (terms < 1) throw DomainError("cf_weighted_chi2_product: terms must be >= 1");
  std::complex<double> log_acc{0.0, 0.0};
  for (int j = 1; j <= terms; ++j) {
    const double w = weight(j);
    if (!(w > 0.0)) throw DomainError("cf_weighted_chi2_product: weights must be positive");
    log_acc += std::log(std::complex<double>(1.0, -2.0 * w * t));
  }
  return std::exp(-0.5 * log_acc);
}

/// Truncated product for the weights 1/(j pi)^2 with the dropped tail folded
/// in through its first three cumulants; agrees with the closed form to
/// O(t^4 / terms^7).
inline std::complex<double> cf_cvm_product(double t, int terms = 10000) {
  if (terms < 1) throw DomainError("cf_cvm_product: terms must be >= 1");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::complex<double> log_acc{0.0, 0.0};
  for (int j = 1; j <= terms; ++j) {
    const double w = 1.0 / (static_cast<double>(j) * static_cast<double>(j) * pi2);
    log_acc += -0.5 * std::log(std::complex<double>(1.0, -2.0 * w * t));
  }
  const double s1 = detail::zeta_tail(2.0, terms + 1) / pi2;
  const double s2 = detail::zeta_tail(4.0, terms + 1) / (pi2 * pi2);
  const double s3 = detail::zeta_tail(6.0, terms + 1) / (pi2 * pi2 * pi2);
  log_acc += std::complex<double>(-t * t * s2, t * s1 - 4.0 / 3.0 * t * t * t * s3);
  return std::exp(log_acc);
}

/// Truncated product for the weights 1/(j(j+1)), tail folded in as above.
inline std::complex<double> cf_ad_product(double t, int terms = 10000) {
  if (terms < 1) throw DomainError("cf_ad_product: terms must be >= 1");
  std::complex<double> log_acc{0.0, 0.0};
  for (int j = 1; j <= terms; ++j) {
    const double w = 1.0 / (static_cast<double>(j) * (static_cast<double>(j) + 1.0));
    log_acc += -0.5 * std::log(std::complex<double>(1.0, -2.0 * w * t));
  }
  const double a = static_cast<double>(terms) + 1.0;
  const double s1 = 1.0 / a;
  const double s2 = detail::zeta_tail(2.0, terms + 1) + detail::zeta_tail(2.0, terms + 2) - 2.0 / a;
  const double s3 = 1.0 / (a * a * a) - 3.0 * s2;
  log_acc += std::complex<double>(-t * t * s2, t * s1 - 4.0 / 3.0 * t * t * t * s3);
  return std::exp(log_acc);
}

/// CF of the limiting Cramer-von Mises statistic, sqrt(z / sin z) with
/// z = sqrt(2it). The log of z/sin(z) is assembled from pieces that are
/// individually continuous along the ray z(t), which fixes the square-root
/// branch for all t (a principal square root flips sign once |t| grows past
/// ~39). Falls back to the truncated product near t = 0.
inline std::complex<double> cf_cvm_closed(double t) {
  if (t == 0.0) return {1.0, 0.0};
  if (t < 0.0) return std::conj(cf_cvm_closed(-t));
  if (t < 1e-8) return cf_cvm_product(t, 64);
  const std::complex<double> w = std::sqrt(std::complex<double>(0.0, 2.0 * t));
  // log sin(w) = log(1/2) + i pi/2 - i w + log(1 - e^{2iw}), Im(w) > 0
  const std::complex<double> iw(-w.imag(), w.real());
  const std::complex<double> log_sin =
      std::complex<double>(-std::numbers::ln2, std::numbers::pi / 2.0) - iw +
      std::log(1.0 - std::exp(2.0 * iw));
  return std::exp(0.5 * (std::log(w) - log_sin));
}

/// CF of the limiting Anderson-Darling statistic,
/// sqrt(-2 pi i t / cos((pi/2) sqrt(1 + 8it))), with the same
/// continuous-log treatment of the square-root branch. The closed form loses
/// relative precision in 1 + e^{2iu} below |t| ~ 1e-6, so the truncated
/// product takes over for |t| < 1e-4.
inline std::complex<double> cf_ad_closed(double t) {
  if (t == 0.0) return {1.0, 0.0};
  if (t < 0.0) return std::conj(cf_ad_closed(-t));
  if (t < 1e-4) return cf_ad_product(t, 64);
  const std::complex<double> u =
      (std::numbers::pi / 2.0) * std::sqrt(std::complex<double>(1.0, 8.0 * t));
  // log cos(u) = -log 2 - i u + log(1 + e^{2iu}), Im(u) > 0
  const std::complex<double> iu(-u.imag(), u.real());
  const std::complex<double> log_cos =
      -std::numbers::ln2 - iu + std::log(1.0 + std::exp(2.0 * iu));
  // log(-2 pi i t) = log(2 pi t) - i pi/2 for t > 0
  const std::complex<double> log_num(std::log(2.0 * std::numbers::pi * t),
                                     -std::numbers::pi / 2.0);
  return std::exp(0.5 * (log_num - log_cos));
}

/// CF of coef * log(B) for B ~ Beta(alpha, beta):
/// Gamma(alpha + i coef t)/Gamma(alpha) * Gamma(alpha+beta)/Gamma(alpha+beta + i coef t).
inline std::complex<double> cf_log_beta(double t, double alpha, double beta, double coef) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("cf_log_beta: alpha and beta must be positive");
  if (t == 0.0) return {1.0, 0.0};
  return std::exp(detail::log_cf_log_beta(t, alpha, beta, coef));
}

/// CF of coef * W where W = log(R) and R is the ratio of the weighted
/// geometric mean to the arithmetic mean of k independent Gamma(alpha_l)
/// variables with weights w_l (sum w_l = 1):
/// k^{i coef t} Gamma(sum alpha) / Gamma(sum alpha + i coef t)
///   * prod_l Gamma(alpha_l + i w_l coef t) / Gamma(alpha_l).
inline std::complex<double> cf_log_means_ratio(double t, std::span<const double> alpha,
                                               std::span<const double> weight, double coef) {
  const std::size_t k = alpha.size();
  if (k < 1) throw DomainError("cf_log_means_ratio: empty alpha list");
  if (weight.size() != k)
    throw DomainError("cf_log_means_ratio: alpha and weight lists differ in length");
  double alpha_sum = 0.0, weight_sum = 0.0;
  for (std::size_t l = 0; l < k; ++l) {
    if (!(alpha[l] > 0.0)) throw DomainError("cf_log_means_ratio: alpha must be positive");
    if (!(weight[l] > 0.0)) throw DomainError("cf_log_means_ratio: weights must be positive");
    alpha_sum += alpha[l];
    weight_sum += weight[l];
  }
  if (std::abs(weight_sum - 1.0) > 1e-10)
    throw DomainError("cf_log_means_ratio: weights must sum to 1");
  if (t == 0.0) return {1.0, 0.0};

  const double s = coef * t;
  std::complex<double> log_acc(0.0, s * std::log(static_cast<double>(k)));
  log_acc += gamma_ratio_ln({alpha_sum, 0.0}, {alpha_sum, s});
  for (std::size_t l = 0; l < k; ++l)
    log_acc += gamma_ratio_ln({alpha[l], weight[l] * s}, {alpha[l], 0.0});
  return std::exp(log_acc);
}

struct BartlettCoefficients {
  double b;         // correction factor
  double c;         // shift constant, nu * log(c_w)
  double nu_total;  // sum of the per-sample degrees of freedom
};

/// Correction factor and shift constant of the variance-homogeneity
/// statistic for k groups with degrees of freedom nu_l:
///   b = 1 + (sum 1/nu_l - 1/nu) / (3(k-1)),
///   c = nu log(k/nu) + sum nu_l log(nu_l).
inline BartlettCoefficients bartlett_coefficients(std::span<const double> nu) {
  const std::size_t k = nu.size();
  if (k < 2) throw DomainError("bartlett_coefficients: need at least two groups");
  double nu_total = 0.0, recip_sum = 0.0;
  for (double v : nu) {
    if (!(v > 0.0)) throw DomainError("bartlett_coefficients: degrees of freedom must be positive");
    nu_total += v;
    recip_sum += 1.0 / v;
  }
  const double b = 1.0 + (recip_sum - 1.0 / nu_total) / (3.0 * (static_cast<double>(k) - 1.0));
  double c = nu_total * std::log(static_cast<double>(k) / nu_total);
  for (double v : nu) c += v * std::log(v);
  return {b, c, nu_total};
}

/// Exact CF of the corrected variance-homogeneity statistic for k normal
/// groups with degrees of freedom nu_l:
///   e^{i(c/b)t} k^{-i(nu/b)t} Gamma(nu/2)/Gamma(nu/2 - i(nu/b)t)
///     * prod_l Gamma(nu_l/2 - i(nu_l/b)t)/Gamma(nu_l/2).
/// Equivalently: shift by c/b of the log-means-ratio CF with
/// alpha_l = nu_l/2, w_l = nu_l/nu and coefficient -nu/b.
inline std::complex<double> cf_bartlett(double t, std::span<const double> nu) {
  const auto coef = bartlett_coefficients(nu);
  if (t == 0.0) return {1.0, 0.0};
  const std::size_t k = nu.size();
  const double s = t / coef.b;
  std::complex<double> log_acc(0.0, coef.c * s - coef.nu_total * s *
                                        std::log(static_cast<double>(k)));
  log_acc += gamma_ratio_ln({coef.nu_total / 2.0, 0.0}, {coef.nu_total / 2.0, -coef.nu_total * s});
  for (double v : nu)
    log_acc += gamma_ratio_ln({v / 2.0, -v * s}, {v / 2.0, 0.0});
  return std::exp(log_acc);
}

/// CF of coef * log of a determinant-ratio statistic with parameters
/// (p, n, q), distributed as a product of p independent beta variables
/// B_j ~ Beta((n-j+1)/2, q/2); coef = -1 gives the usual -log transform.
inline std::complex<double> cf_wilks_log(double t, int p, int n, int q, double coef) {
  if (p < 1 || n < p || q < 1)
    throw DomainError("cf_wilks_log: need n >= p >= 1 and q >= 1");
  if (t == 0.0) return {1.0, 0.0};
  std::complex<double> log_acc{0.0, 0.0};
  for (int j = 1; j <= p; ++j)
    log_acc += detail::log_cf_log_beta(t, (static_cast<double>(n - j) + 1.0) / 2.0,
                                       static_cast<double>(q) / 2.0, coef);
  return std::exp(log_acc);
}

/// CF of the -log statistic under a compound-symmetry covariance constraint:
/// the statistic is distributed as B1 * B2^{p-1} with
/// B1 ~ Beta((n-q)/2, (q-1)/2) and B2 ~ Beta((n-q)(p-1)/2, (q-1)(p-1)/2).
inline std::complex<double> cf_wilks_cs_log(double t, int p, int n, int q) {
  if (p < 2 || q < 2 || n <= q)
    throw DomainError("cf_wilks_cs_log: need p >= 2 and n > q >= 2");
  if (t == 0.0) return {1.0, 0.0};
  const double nq = static_cast<double>(n - q);
  const double qm1 = static_cast<double>(q - 1);
  const double pm1 = static_cast<double>(p - 1);
  return std::exp(detail::log_cf_log_beta(t, nq / 2.0, qm1 / 2.0, -1.0) +
                  detail::log_cf_log_beta(t, pm1 * nq / 2.0, pm1 * qm1 / 2.0, -pm1));
}

// ---------------------------------------------------------------------------
// Factories: the same evaluators wrapped with support/moment metadata.
// ---------------------------------------------------------------------------

inline CharacteristicFunction make_chi2_cf(double df) {
  if (!(df > 0.0)) throw DomainError("make_chi2_cf: df must be positive");
  return CharacteristicFunction([df](double t) { return cf_chi2(t, df); }, 0.0,
                                MomentHint{df, std::sqrt(2.0 * df)});
}

inline CharacteristicFunction make_quadform_cf(std::vector<double> lambdas) {
  cf_quadform(0.1, lambdas);  // validate eagerly
  double mean = 0.0, var = 0.0;
  for (double l : lambdas) {
    mean += l;
    var += 2.0 * l * l;
  }
  auto lam = std::make_shared<std::vector<double>>(std::move(lambdas));
  return CharacteristicFunction([lam](double t) { return cf_quadform(t, *lam); }, 0.0,
                                MomentHint{mean, std::sqrt(var)});
}

inline CharacteristicFunction make_cvm_cf() {
  // mean = sum 1/(j pi)^2 = 1/6, var = 2 sum 1/(j pi)^4 = 1/45
  return CharacteristicFunction([](double t) { return cf_cvm_closed(t); }, 0.0,
                                MomentHint{1.0 / 6.0, std::sqrt(1.0 / 45.0)});
}

inline CharacteristicFunction make_ad_cf() {
  // mean = sum 1/(j(j+1)) = 1, var = 2(pi^2/3 - 3)
  const double var = 2.0 * (std::numbers::pi * std::numbers::pi / 3.0 - 3.0);
  return CharacteristicFunction([](double t) { return cf_ad_closed(t); }, 0.0,
                                MomentHint{1.0, std::sqrt(var)});
}

inline CharacteristicFunction make_log_beta_cf(double alpha, double beta, double coef) {
  cf_log_beta(0.1, alpha, beta, coef);  // validate eagerly
  std::optional<double> support;
  if (coef <= 0.0) support = 0.0;  // log(B) <= 0, so coef*log(B) >= 0
  return CharacteristicFunction(
      [alpha, beta, coef](double t) { return cf_log_beta(t, alpha, beta, coef); }, support);
}

inline CharacteristicFunction make_log_means_ratio_cf(std::vector<double> alpha,
                                                      std::vector<double> weight, double coef) {
  cf_log_means_ratio(0.1, alpha, weight, coef);  // validate eagerly
  auto a = std::make_shared<std::vector<double>>(std::move(alpha));
  auto w = std::make_shared<std::vector<double>>(std::move(weight));
  return CharacteristicFunction(
      [a, w, coef](double t) { return cf_log_means_ratio(t, *a, *w, coef); });
}

inline CharacteristicFunction make_bartlett_cf(std::vector<double> nu) {
  bartlett_coefficients(nu);  // validate eagerly
  auto v = std::make_shared<std::vector<double>>(std::move(nu));
  // statistic = -(nu/b) log(ratio of means) >= 0
  return CharacteristicFunction([v](double t) { return cf_bartlett(t, *v); }, 0.0);
}

inline CharacteristicFunction make_wilks_log_cf(int p, int n, int q, double coef = -1.0) {
  cf_wilks_log(0.1, p, n, q, coef);  // validate eagerly
  std::optional<double> support;
  if (coef <= 0.0) support = 0.0;
  return CharacteristicFunction(
      [p, n, q, coef](double t) { return cf_wilks_log(t, p, n, q, coef); }, support);
}

inline CharacteristicFunction make_wilks_cs_log_cf(int p, int n, int q) {
  cf_wilks_cs_log(0.1, p, n, q);  // validate eagerly
  return CharacteristicFunction([p, n, q](double t) { return cf_wilks_cs_log(t, p, n, q); }, 0.0);
}

}  // namespace cfdist
