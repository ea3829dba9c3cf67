#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfdist/cf_library.hpp"
#include "cfdist/characteristic_function.hpp"
#include "cfdist/errors.hpp"

namespace cfdist {

/// Controls for the Gil-Pelaez trapezoidal inversion.
struct InversionOptions {
  int n_nodes = 1000;                 // N: quadrature nodes minus one (t_0 = 0 .. t_N = T)
  std::optional<double> x_min;        // override for the domain lower end A
  std::optional<double> x_max;        // override for the domain upper end B
  double sigma_rule = 6.0;            // (A,B) = mean -+ sigma_rule * std when not overridden
  double quantile_tol = 1e-8;         // |cdf(q) - p| target for quantiles
  int max_newton_iters = 100;
  double tail_epsilon = 1e-12;        // warn when |cf(T)| exceeds this

  void validate() const {
    if (n_nodes < 16) throw DomainError("InversionOptions: n_nodes must be >= 16");
    if (!(sigma_rule > 0.0)) throw DomainError("InversionOptions: sigma_rule must be positive");
    if (!(quantile_tol > 0.0)) throw DomainError("InversionOptions: quantile_tol must be positive");
    if (!(tail_epsilon > 0.0)) throw DomainError("InversionOptions: tail_epsilon must be positive");
    if (max_newton_iters < 1) throw DomainError("InversionOptions: max_newton_iters must be >= 1");
  }
};

/// Fully determined quadrature plan: equidistant nodes t_j = j * delta_t on
/// (0, T), trapezoidal weights (half at both ends), the distribution domain
/// (A, B) that fixed the step delta_t = 2 pi / (B - A), the moments used for
/// the domain, and the CF samples at the nodes.
struct ResolvedGrid {
  double delta_t = 0.0;
  double t_max = 0.0;  // T = n_nodes * delta_t
  std::vector<double> nodes;
  std::vector<double> weights;
  double domain_lo = 0.0;  // A
  double domain_hi = 0.0;  // B
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<std::complex<double>> cf_values;  // cf(t_j), j = 0..N
  double tail_cf_magnitude = 0.0;               // |cf(T)|
};

struct Diagnostics {
  double tail_cf_magnitude = 0.0;
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  int n_nodes = 0;
  double raw_pdf_min = 0.0;  // most negative raw PDF value before clipping
  double raw_cdf_min = 0.0;
  double raw_cdf_max = 0.0;
  std::vector<std::string> warnings;
};

struct DistributionResult {
  std::vector<double> x;
  std::vector<double> pdf;
  std::vector<double> cdf;
  std::vector<std::pair<double, double>> quantiles;  // (prob, value)
  Diagnostics diagnostics;
};

/// Mean and standard deviation of the underlying variable. Returns the
/// attached moment hint when present; otherwise estimates
///   mean = Im cf(h) / h,   E[Y^2] = 2 (1 - Re cf(h)) / h^2
/// with a scale-aware step: an initial scale guess from the decay of |cf|
/// (smallest t with |cf(t)| < 0.9, found by doubling), h = 1e-4 / std_guess,
/// refined once with the first std estimate.
inline std::pair<double, double> estimate_moments(const CharacteristicFunction& cf) {
  if (cf.moment_hint().has_value())
    return {cf.moment_hint()->mean, cf.moment_hint()->stddev};

  double t = 1e-8;
  while (std::abs(cf(t)) >= 0.9) {
    t *= 2.0;
    if (t > 1e160)
      throw MomentError("estimate_moments: |cf| does not decay (degenerate distribution?)");
  }
  double std_guess = 1.0 / t;

  double mean = 0.0, var = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const double h = 1e-4 / std_guess;
    const std::complex<double> v = cf(h);
    mean = v.imag() / h;
    const double second_raw = 2.0 * (1.0 - v.real()) / (h * h);
    var = second_raw - mean * mean;
    if (!(var > 0.0))
      throw MomentError("estimate_moments: non-positive variance estimate");
    std_guess = std::sqrt(var);
  }
  return {mean, std_guess};
}

/// Builds the quadrature plan. The domain is (A, B) = mean -+ sigma_rule*std;
/// a known lower support bound raises A when no explicit x_min is given, and
/// x_min / x_max replace the corresponding endpoint outright.
inline ResolvedGrid resolve_grid(const CharacteristicFunction& cf, const InversionOptions& opts) {
  opts.validate();

  double mean = 0.0, sd = 0.0;
  try {
    std::tie(mean, sd) = estimate_moments(cf);
  } catch (const MomentError&) {
    // A fully specified domain still works; fall back to domain midpoint.
    if (!opts.x_min.has_value() || !opts.x_max.has_value()) throw;
    mean = 0.5 * (*opts.x_min + *opts.x_max);
    sd = (*opts.x_max - *opts.x_min) / (2.0 * opts.sigma_rule);
  }

  double lo = mean - opts.sigma_rule * sd;
  double hi = mean + opts.sigma_rule * sd;
  if (!opts.x_min.has_value() && cf.support_min().has_value())
    lo = std::max(lo, *cf.support_min());
  if (opts.x_min.has_value()) lo = *opts.x_min;
  if (opts.x_max.has_value()) hi = *opts.x_max;
  if (!(hi > lo)) throw DomainError("resolve_grid: domain upper end must exceed lower end");

  ResolvedGrid grid;
  grid.domain_lo = lo;
  grid.domain_hi = hi;
  grid.mean = mean;
  grid.std_dev = sd;
  grid.delta_t = 2.0 * std::numbers::pi / (hi - lo);
  const int n = opts.n_nodes;
  grid.t_max = n * grid.delta_t;
  grid.nodes.resize(n + 1);
  grid.weights.assign(n + 1, 1.0);
  grid.weights.front() = 0.5;
  grid.weights.back() = 0.5;
  grid.cf_values.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    grid.nodes[j] = j * grid.delta_t;
    grid.cf_values[j] = cf(grid.nodes[j]);
  }
  grid.tail_cf_magnitude = std::abs(grid.cf_values.back());
  return grid;
}

namespace detail {

// e^{-i t_j x} is advanced by complex rotation, re-anchored with an exact
// polar every 256 steps to stop drift; summation order is fixed, so results
// are deterministic.
inline constexpr unsigned rotation_resync = 256;

inline double pdf_at(const ResolvedGrid& grid, double x) {
  const std::size_t n = grid.nodes.size() - 1;
  const std::complex<double> step = std::polar(1.0, -grid.delta_t * x);
  std::complex<double> rot{1.0, 0.0};
  double acc = 0.5;  // j = 0: w_0 * Re(cf(0)) = 1/2
  for (std::size_t j = 1; j <= n; ++j) {
    if ((j & (rotation_resync - 1)) == 0)
      rot = std::polar(1.0, -grid.nodes[j] * x);
    else
      rot *= step;
    const std::complex<double>& v = grid.cf_values[j];
    const double term = rot.real() * v.real() - rot.imag() * v.imag();  // Re(e^{-itx} cf)
    acc += (j == n) ? 0.5 * term : term;
  }
  return grid.delta_t / std::numbers::pi * acc;
}

inline double cdf_at(const ResolvedGrid& grid, double x) {
  const std::size_t n = grid.nodes.size() - 1;
  const std::complex<double> step = std::polar(1.0, -grid.delta_t * x);
  std::complex<double> rot{1.0, 0.0};
  // j = 0: lim_{t->0} Im(e^{-itx} cf(t))/t = mean - x, with weight 1/2.
  double acc = 0.5 * (grid.mean - x);
  for (std::size_t j = 1; j <= n; ++j) {
    if ((j & (rotation_resync - 1)) == 0)
      rot = std::polar(1.0, -grid.nodes[j] * x);
    else
      rot *= step;
    const std::complex<double>& v = grid.cf_values[j];
    const double term = (rot.real() * v.imag() + rot.imag() * v.real()) / grid.nodes[j];
    acc += (j == n) ? 0.5 * term : term;
  }
  return 0.5 - grid.delta_t / std::numbers::pi * acc;
}

}  // namespace detail

/// PDF at the given points by the trapezoidal Gil-Pelaez sum
///   pdf(x) ~ (delta_t/pi) sum_j w_j Re(e^{-i t_j x} cf(t_j)).
/// Raw values; negative quadrature excursions are not clipped here.
inline std::vector<double> invert_pdf(std::span<const double> x, const ResolvedGrid& grid) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw DomainError("invert_pdf: non-finite evaluation point");
    out[i] = detail::pdf_at(grid, x[i]);
  }
  return out;
}

/// CDF at the given points by the trapezoidal Gil-Pelaez sum
///   cdf(x) ~ 1/2 - (delta_t/pi) sum_j w_j Im(e^{-i t_j x} cf(t_j)) / t_j,
/// with the j = 0 term replaced by its analytic limit (mean - x) w_0.
/// Values are clipped to [0, 1].
inline std::vector<double> invert_cdf(std::span<const double> x, const ResolvedGrid& grid) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw DomainError("invert_cdf: non-finite evaluation point");
    out[i] = std::clamp(detail::cdf_at(grid, x[i]), 0.0, 1.0);
  }
  return out;
}

/// Quantiles by safeguarded Newton iteration on the inverted CDF: start at
/// the grid mean, fall back to bisection of [A, B] whenever a Newton step
/// leaves the bracket or the local PDF is below 1e-12. Converged when
/// |cdf(q) - p| <= opts.quantile_tol.
inline std::vector<std::pair<double, double>> quantile(std::span<const double> probs,
                                                       const ResolvedGrid& grid,
                                                       const InversionOptions& opts) {
  std::vector<std::pair<double, double>> out;
  out.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0.0) || !(p < 1.0))
      throw DomainError("quantile: probabilities must lie strictly inside (0, 1)");

    double lo = grid.domain_lo, hi = grid.domain_hi;
    double q = std::clamp(grid.mean, lo, hi);
    bool converged = false;
    for (int it = 0; it < opts.max_newton_iters; ++it) {
      const double f = std::clamp(detail::cdf_at(grid, q), 0.0, 1.0) - p;
      if (std::abs(f) <= opts.quantile_tol) {
        converged = true;
        break;
      }
      if (f > 0.0)
        hi = q;
      else
        lo = q;
      if (hi - lo <= 1e-14 * (1.0 + std::abs(lo))) {
        q = 0.5 * (lo + hi);  // flat region: settle on the midpoint
        converged = std::abs(std::clamp(detail::cdf_at(grid, q), 0.0, 1.0) - p) <=
                    10.0 * opts.quantile_tol;
        break;
      }
      const double dens = detail::pdf_at(grid, q);
      double next = (dens > 1e-12) ? q - f / dens : 0.5 * (lo + hi);
      if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
      q = next;
    }
    if (!converged)
      throw ConvergenceError("quantile: no convergence for p = " + std::to_string(p));
    out.emplace_back(p, q);
  }
  return out;
}

/// One-call inversion: moments -> grid -> PDF/CDF on the x grid -> quantiles.
/// When x is not supplied, a 100-point linear grid over (A, B) is used.
/// The reported PDF is clipped at 0 and the CDF is made nondecreasing inside
/// [0, 1]; raw extremes land in the diagnostics.
inline DistributionResult cf2dist(const CharacteristicFunction& cf,
                                  std::optional<std::vector<double>> x,
                                  const std::vector<double>& probs,
                                  const InversionOptions& opts = {}) {
  if (x.has_value() && x->empty() && probs.empty())
    throw DomainError("cf2dist: need at least one evaluation point or probability");

  const ResolvedGrid grid = resolve_grid(cf, opts);

  DistributionResult result;
  result.diagnostics.tail_cf_magnitude = grid.tail_cf_magnitude;
  result.diagnostics.domain_lo = grid.domain_lo;
  result.diagnostics.domain_hi = grid.domain_hi;
  result.diagnostics.n_nodes = opts.n_nodes;
  if (grid.tail_cf_magnitude > opts.tail_epsilon)
    result.diagnostics.warnings.push_back(
        "|cf(T)| = " + std::to_string(grid.tail_cf_magnitude) +
        " exceeds tail_epsilon; consider more nodes or a wider domain");

  if (x.has_value()) {
    result.x = std::move(*x);
  } else {
    result.x.resize(100);
    for (int i = 0; i < 100; ++i)
      result.x[i] = grid.domain_lo +
                    (grid.domain_hi - grid.domain_lo) * static_cast<double>(i) / 99.0;
  }

  if (!result.x.empty()) {
    result.pdf = invert_pdf(result.x, grid);
    result.cdf.resize(result.x.size());

    double raw_pdf_min = 0.0, raw_cdf_min = 1.0, raw_cdf_max = 0.0;
    bool clipped_pdf = false, clipped_cdf = false;
    for (std::size_t i = 0; i < result.x.size(); ++i) {
      raw_pdf_min = std::min(raw_pdf_min, result.pdf[i]);
      if (result.pdf[i] < 0.0) {
        result.pdf[i] = 0.0;
        clipped_pdf = true;
      }
      const double raw = detail::cdf_at(grid, result.x[i]);
      raw_cdf_min = std::min(raw_cdf_min, raw);
      raw_cdf_max = std::max(raw_cdf_max, raw);
      double v = std::clamp(raw, 0.0, 1.0);
      if (i > 0 && v < result.cdf[i - 1]) {
        v = result.cdf[i - 1];  // running max keeps the reported CDF monotone
        clipped_cdf = true;
      }
      result.cdf[i] = v;
    }
    result.diagnostics.raw_pdf_min = raw_pdf_min;
    result.diagnostics.raw_cdf_min = raw_cdf_min;
    result.diagnostics.raw_cdf_max = raw_cdf_max;
    if (clipped_pdf)
      result.diagnostics.warnings.push_back("negative PDF excursions clipped to 0");
    if (clipped_cdf)
      result.diagnostics.warnings.push_back("CDF monotonized against quadrature ripple");
  }

  if (!probs.empty()) result.quantiles = quantile(probs, grid, opts);
  return result;
}

/// Chi-square quantile computed by this module's own inversion of the
/// chi-square CF (no incomplete-gamma dependency; doubles as a self test).
/// Accuracy target ~1e-4 across df >= 1 with the internal grid below.
inline double chi2_quantile(double prob, double df) {
  if (!(prob > 0.0) || !(prob < 1.0))
    throw DomainError("chi2_quantile: prob must lie strictly inside (0, 1)");
  InversionOptions opts;
  opts.n_nodes = 4000;
  opts.sigma_rule = 14.0;  // exponential tails need a wide window
  opts.x_min = 0.0;
  const ResolvedGrid grid = resolve_grid(make_chi2_cf(df), opts);
  const double p[] = {prob};
  return quantile(p, grid, opts).front().second;
}

/// Approximate quantile of the -log determinant-ratio statistic implied by
/// the degrees-of-freedom-corrected chi-square limit:
///   (n - (p - q + 1)/2) * lambda ~ chi^2_{p q}.
inline double wilks_chi2_approx_quantile(double prob, int p, int n, int q) {
  if (p < 1 || n < p || q < 1)
    throw DomainError("wilks_chi2_approx_quantile: need n >= p >= 1 and q >= 1");
  const double denom = static_cast<double>(n) - (static_cast<double>(p - q) + 1.0) / 2.0;
  if (!(denom > 0.0))
    throw DomainError("wilks_chi2_approx_quantile: correction denominator must be positive");
  return chi2_quantile(prob, static_cast<double>(p) * static_cast<double>(q)) / denom;
}

}  // namespace cfdist
