#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "cfdist/errors.hpp"

namespace cfdist {

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coef[9] = {
    0.99999999999980993,     676.5203681218851,      -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};

inline constexpr double log_sqrt_2pi = 0.91893853320467274178032973640562;

/// log(1 + z) without loss of significance for small |z|.
inline std::complex<double> clog1p(std::complex<double> z) {
  const std::complex<double> u = 1.0 + z;
  if (u == std::complex<double>(1.0, 0.0)) return z;
  return std::log(u) * (z / (u - 1.0));
}

/// Lanczos partial-fraction series evaluated at zm1 = z - 1.
inline std::complex<double> lanczos_series(std::complex<double> zm1) {
  std::complex<double> s = lanczos_coef[0];
  for (int k = 1; k < 9; ++k) s += lanczos_coef[k] / (zm1 + static_cast<double>(k));
  return s;
}

/// Difference of two Lanczos series, written so the leading 1's cancel
/// analytically: series(a) - series(b) = sum_k c_k (b - a) / ((a+k)(b+k)).
inline std::complex<double> lanczos_series_diff(std::complex<double> am1,
                                                std::complex<double> bm1) {
  std::complex<double> s = 0.0;
  const std::complex<double> neg_d = bm1 - am1;
  for (int k = 1; k < 9; ++k) {
    const double kk = static_cast<double>(k);
    s += lanczos_coef[k] * neg_d / ((am1 + kk) * (bm1 + kk));
  }
  return s;
}

/// log(sin(pi z)), continuous in Im(z) along a fixed Re(z) and stable for
/// large |Im(z)| (never forms e^{pi |Im z|} directly).
inline std::complex<double> log_sin_pi(std::complex<double> z) {
  const double pi = std::numbers::pi;
  if (z.imag() > 0.0) {
    // sin(w) = (i/2) e^{-iw} (1 - e^{2iw}) with w = pi z; |e^{2iw}| < 1 here.
    const std::complex<double> iw(-pi * z.imag(), pi * z.real());
    return std::complex<double>(-std::numbers::ln2, pi / 2.0) - iw +
           std::log(1.0 - std::exp(2.0 * iw));
  }
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  return std::log(std::complex<double>(std::sin(pi * z.real()), 0.0));
}

}  // namespace detail

/// log Gamma(z) for complex z.
///
/// Principal branch in the half plane Re(z) >= 0.5 (Lanczos, g = 7, nine
/// coefficients); for Re(z) < 0.5 the reflection formula is used with a
/// log-sin that is continuous in Im(z), so the imaginary part is continuous
/// along rays parallel to the real axis. Downstream code only consumes
/// differences of these logs, for which any consistent branch suffices.
///
/// Throws PoleError at non-positive integers and OverflowError if the input
/// or result is not finite.
inline std::complex<double> cgamma_ln(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw OverflowError("cgamma_ln: non-finite argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw PoleError("cgamma_ln: pole at z = " + std::to_string(z.real()));

  std::complex<double> out;
  if (z.real() < 0.5) {
    out = std::log(std::numbers::pi) - detail::log_sin_pi(z) - cgamma_ln(1.0 - z);
  } else {
    const std::complex<double> zm1 = z - 1.0;
    const std::complex<double> t = zm1 + (detail::lanczos_g + 0.5);
    out = detail::log_sqrt_2pi + (zm1 + 0.5) * std::log(t) - t +
          std::log(detail::lanczos_series(zm1));
  }
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
    throw OverflowError("cgamma_ln: result not finite");
  return out;
}

/// log Gamma(num) - log Gamma(den).
///
/// When the two arguments are close and both lie in the Lanczos main region,
/// the difference is assembled from cancellation-free pieces (log1p of the
/// argument gap) instead of subtracting two large logs.
inline std::complex<double> gamma_ratio_ln(std::complex<double> num, std::complex<double> den) {
  if (num == den) return {0.0, 0.0};

  const std::complex<double> d = num - den;
  if (num.real() >= 0.5 && den.real() >= 0.5 &&
      std::abs(d) <= 1e-3 * (1.0 + std::abs(den))) {
    const std::complex<double> am1 = num - 1.0;
    const std::complex<double> bm1 = den - 1.0;
    const std::complex<double> ta = am1 + (detail::lanczos_g + 0.5);
    const std::complex<double> tb = bm1 + (detail::lanczos_g + 0.5);
    const std::complex<double> sb = detail::lanczos_series(bm1);
    const std::complex<double> out = d * std::log(ta) +
                                     (bm1 + 0.5) * detail::clog1p(d / tb) - d +
                                     detail::clog1p(detail::lanczos_series_diff(am1, bm1) / sb);
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
      throw OverflowError("gamma_ratio_ln: result not finite");
    return out;
  }
  return cgamma_ln(num) - cgamma_ln(den);
}

}  // namespace cfdist
