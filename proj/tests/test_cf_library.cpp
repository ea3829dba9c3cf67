#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cfdist/cf_library.hpp"
#include "cfdist/characteristic_function.hpp"
#include "cfdist/oracle.hpp"
#include "support/reference.hpp"

using namespace cfdist;
using Catch::Matchers::WithinAbs;

namespace {

const std::vector<double> k15_nu = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3};

/// cf(0) = 1, |cf| <= 1 + 1e-12, cf(-t) = conj(cf(t)) on a seeded random grid.
void check_cf_invariants(const CharacteristicFunction& cf, unsigned seed,
                         double t_span = 50.0, int n = 1000) {
  REQUIRE(cf(0.0) == std::complex<double>(1.0, 0.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ts(-t_span, t_span);
  for (int i = 0; i < n; ++i) {
    const double t = ts(rng);
    const std::complex<double> v = cf(t);
    CHECK(std::abs(v) <= 1.0 + 1e-12);
    CHECK(std::abs(cf(-t) - std::conj(v)) <= 1e-12);
  }
}

}  // namespace

TEST_CASE("cf_chi2: values and errors") {
  CHECK(cf_chi2(0.0, 3.0) == std::complex<double>(1.0, 0.0));
  // df = 2, t = 1: 1/(1 - 2i) = 0.2 + 0.4i
  const auto v = cf_chi2(1.0, 2.0);
  CHECK_THAT(v.real(), WithinAbs(0.2, 1e-15));
  CHECK_THAT(v.imag(), WithinAbs(0.4, 1e-15));
  // df = 1: (1 - 2it)^(-1/2)
  for (double t : {0.3, -1.7, 12.0}) {
    const auto direct = 1.0 / std::sqrt(std::complex<double>(1.0, -2.0 * t));
    CHECK(std::abs(cf_chi2(t, 1.0) - direct) <= 1e-14);
  }
  CHECK_THROWS_AS(cf_chi2(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(cf_chi2(1.0, -2.0), DomainError);
}

TEST_CASE("cf_quadform: products and errors") {
  const std::vector<double> one = {1.0};
  const std::vector<double> three = {1.0, 1.0, 1.0};
  for (double t : {0.1, -2.0, 7.5}) {
    CHECK(std::abs(cf_quadform(t, one) - cf_chi2(t, 1.0)) <= 1e-15);
    CHECK(std::abs(cf_quadform(t, three) - cf_chi2(t, 3.0)) <= 1e-14);
  }
  // independent term-by-term product oracle
  const std::vector<double> lam = {2.0, 1.0, 0.5};
  CHECK(std::abs(cf_quadform(0.5, lam) - testref::cf_quadform_ref(0.5, lam)) <= 1e-14);

  CHECK_THROWS_AS(cf_quadform(1.0, std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(cf_quadform(1.0, std::vector<double>{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(cf_quadform(1.0, std::vector<double>{1.0, -0.5}), DomainError);
}

TEST_CASE("cf_weighted_chi2_product: single term and plain-truncation convergence") {
  auto unit = [](int) { return 1.0; };
  for (double t : {0.25, -3.0}) CHECK(std::abs(cf_weighted_chi2_product(t, unit, 1) - cf_chi2(t, 1.0)) <= 1e-15);
  CHECK_THROWS_AS(cf_weighted_chi2_product(1.0, unit, 0), DomainError);

  // the bare product converges to the closed forms at rate O(1/terms)
  auto cvm_w = [](int j) { return 1.0 / (j * std::numbers::pi * j * std::numbers::pi); };
  auto ad_w = [](int j) { return 1.0 / (static_cast<double>(j) * (j + 1.0)); };
  double prev = 1.0;
  for (int terms : {100, 1000, 10000}) {
    const double err = std::abs(cf_weighted_chi2_product(1.0, cvm_w, terms) - cf_cvm_closed(1.0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
  prev = 1.0;
  for (int terms : {100, 1000, 10000}) {
    const double err = std::abs(cf_weighted_chi2_product(1.0, ad_w, terms) - cf_ad_closed(1.0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("cf_cvm_closed: closed form against the tail-folded product") {
  CHECK(cf_cvm_closed(0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(cf_cvm_closed(1.0) - cf_cvm_product(1.0, 10000)) <= 1e-8);
  CHECK(std::abs(cf_cvm_closed(-1.0) - std::conj(cf_cvm_closed(1.0))) <= 1e-15);

  double worst = 0.0;
  for (int i = -200; i <= 200; ++i) {
    const double t = 0.25 * i;
    worst = std::max(worst, std::abs(cf_cvm_closed(t) - cf_cvm_product(t, 10000)));
  }
  CHECK(worst < 1e-6);

  // tail-folded truncation error decreases monotonically in the term count
  double prev = 1.0;
  for (int terms : {16, 64, 256}) {
    const double err = std::abs(cf_cvm_product(50.0, terms) - cf_cvm_closed(50.0));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("cf_ad_closed: closed form against the tail-folded product") {
  CHECK(cf_ad_closed(0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(cf_ad_closed(1.0) - cf_ad_product(1.0, 10000)) <= 1e-8);
  CHECK(std::abs(cf_ad_closed(-2.0) - std::conj(cf_ad_closed(2.0))) <= 1e-15);

  double worst = 0.0;
  for (int i = -200; i <= 200; ++i) {
    const double t = 0.25 * i;
    worst = std::max(worst, std::abs(cf_ad_closed(t) - cf_ad_product(t, 10000)));
  }
  CHECK(worst < 1e-6);

  double prev = 1.0;
  for (int terms : {16, 64, 256}) {
    const double err = std::abs(cf_ad_product(50.0, terms) - cf_ad_closed(50.0));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("cf_log_beta: values, Monte Carlo oracle, errors") {
  CHECK(cf_log_beta(0.0, 2.0, 3.0, 1.0) == std::complex<double>(1.0, 0.0));
  CHECK_THROWS_AS(cf_log_beta(1.0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cf_log_beta(1.0, 1.0, -1.0, 1.0), DomainError);

  // mean of e^{it log B} over beta draws, alpha=2, beta=3, coef=1, t=0.7
  RandomStream rng(424242);
  const auto est = testref::mc_cf(0.7, 200000, [&rng]() { return std::log(rng.next_beta(2.0, 3.0)); });
  const auto exact = cf_log_beta(0.7, 2.0, 3.0, 1.0);
  CHECK(std::abs(exact.real() - est.value.real()) <= 3.0 * est.stderr_re);
  CHECK(std::abs(exact.imag() - est.value.imag()) <= 3.0 * est.stderr_im);
}

TEST_CASE("cf_log_beta: large-draw Monte Carlo oracle", "[.slow]") {
  RandomStream rng(424242);
  const auto est = testref::mc_cf(0.7, 10000000, [&rng]() { return std::log(rng.next_beta(2.0, 3.0)); });
  const auto exact = cf_log_beta(0.7, 2.0, 3.0, 1.0);
  CHECK(std::abs(exact.real() - est.value.real()) <= 3.0 * est.stderr_re);
  CHECK(std::abs(exact.imag() - est.value.imag()) <= 3.0 * est.stderr_im);
}

TEST_CASE("cf_log_means_ratio: degenerate single group and Monte Carlo oracle") {
  const std::vector<double> a1 = {2.0}, w1 = {1.0};
  // one variable over its own mean: the ratio is identically 1
  for (double t : {0.5, -4.0, 17.0}) {
    CHECK(std::abs(cf_log_means_ratio(t, a1, w1, 1.0) - 1.0) <= 1e-13);
    CHECK_THAT(std::abs(cf_log_means_ratio(t, a1, w1, -2.5)), WithinAbs(1.0, 1e-13));
  }

  const std::vector<double> a2 = {1.0, 1.0}, w2 = {0.5, 0.5};
  CHECK(cf_log_means_ratio(0.0, a2, w2, 1.0) == std::complex<double>(1.0, 0.0));

  // W = log of (weighted geometric mean / arithmetic mean) of gamma draws
  RandomStream rng(777);
  auto draw_w = [&rng, &a2, &w2]() {
    double log_gm = 0.0, sum = 0.0;
    for (std::size_t l = 0; l < a2.size(); ++l) {
      const double x = rng.next_gamma(a2[l]);
      log_gm += w2[l] * std::log(x);
      sum += x;
    }
    return log_gm - std::log(sum / static_cast<double>(a2.size()));
  };
  const auto est = testref::mc_cf(1.0, 200000, draw_w);
  const auto exact = cf_log_means_ratio(1.0, a2, w2, 1.0);
  CHECK(std::abs(exact.real() - est.value.real()) <= 3.0 * est.stderr_re);
  CHECK(std::abs(exact.imag() - est.value.imag()) <= 3.0 * est.stderr_im);

  const std::vector<double> bad_w = {0.6, 0.6};
  CHECK_THROWS_AS(cf_log_means_ratio(1.0, a2, bad_w, 1.0), DomainError);
}

TEST_CASE("bartlett_coefficients: closed forms") {
  const auto c = bartlett_coefficients(k15_nu);
  CHECK_THAT(c.nu_total, WithinAbs(30.0, 1e-12));
  // exact fractions: b = 1 + 137/630, c = 15 log 3 - 20 log 2
  CHECK_THAT(c.b, WithinAbs(1.0 + 137.0 / 630.0, 1e-14));
  CHECK_THAT(c.c, WithinAbs(15.0 * std::log(3.0) - 20.0 * std::log(2.0), 1e-12));

  for (double n : {3.0, 8.0, 25.0}) {
    const std::vector<double> nu2 = {n, n};
    CHECK_THAT(bartlett_coefficients(nu2).b, WithinAbs(1.0 + 1.0 / (2.0 * n), 1e-13));
  }

  const std::vector<double> nu3 = {5.0, 5.0, 5.0};
  const auto c3 = bartlett_coefficients(nu3);
  CHECK_THAT(c3.b, WithinAbs(1.0 + 4.0 / 45.0, 1e-14));
  CHECK_THAT(c3.c, WithinAbs(0.0, 1e-12));  // 15 log(3/15) + 15 log 5

  CHECK_THROWS_AS(bartlett_coefficients(std::vector<double>{5.0}), DomainError);
  CHECK_THROWS_AS(bartlett_coefficients(std::vector<double>{1.0, 0.0}), DomainError);
}

TEST_CASE("cf_bartlett: decomposition identity and extended-precision value") {
  CHECK(cf_bartlett(0.0, k15_nu) == std::complex<double>(1.0, 0.0));

  const auto coef = bartlett_coefficients(k15_nu);
  std::vector<double> alpha, weight;
  for (double v : k15_nu) {
    alpha.push_back(v / 2.0);
    weight.push_back(v / coef.nu_total);
  }

  // direct form == shift of the log-means-ratio CF, pointwise
  const auto composed = shift_scale(
      make_log_means_ratio_cf(alpha, weight, -coef.nu_total / coef.b), coef.c / coef.b, 1.0);
  for (int i = -40; i <= 40; ++i) {
    const double t = 0.35 * i;
    CHECK(std::abs(cf_bartlett(t, k15_nu) - composed(t)) <= 1e-12);
  }

  // long double evaluation of the same gamma-ratio expression at t = 1
  {
    const long double t = 1.0L;
    const long double b = coef.b, c = coef.c, nu = coef.nu_total;
    const long double k = static_cast<long double>(k15_nu.size());
    testref::complex_ld acc{0.0L, c / b * t - nu / b * t * std::log(k)};
    acc += testref::lgamma_ref({nu / 2.0L, 0.0L}) -
           testref::lgamma_ref({nu / 2.0L, -nu / b * t});
    for (double v : k15_nu)
      acc += testref::lgamma_ref({v / 2.0L, -v / b * t}) -
             testref::lgamma_ref({v / 2.0L, 0.0L});
    const testref::complex_ld want = std::exp(acc);
    const std::complex<double> got = cf_bartlett(1.0, k15_nu);
    CHECK(std::abs(got - std::complex<double>(static_cast<double>(want.real()),
                                              static_cast<double>(want.imag()))) <= 1e-13);
  }
}

TEST_CASE("cf_wilks_log: reductions and Monte Carlo oracle") {
  CHECK(cf_wilks_log(0.0, 10, 23, 6, -1.0) == std::complex<double>(1.0, 0.0));

  // p = 1 is a single beta factor, bit-for-bit
  for (double t : {0.2, -3.3, 11.0}) {
    CHECK(cf_wilks_log(t, 1, 12, 4, -1.0) == cf_log_beta(t, 6.0, 2.0, -1.0));
    CHECK(cf_wilks_log(t, 1, 12, 4, 2.0) == cf_log_beta(t, 6.0, 2.0, 2.0));
  }

  CHECK_THROWS_AS(cf_wilks_log(1.0, 5, 4, 2, -1.0), DomainError);  // n < p
  CHECK_THROWS_AS(cf_wilks_log(1.0, 0, 4, 2, -1.0), DomainError);
  CHECK_THROWS_AS(cf_wilks_log(1.0, 2, 4, 0, -1.0), DomainError);

  // -sum log B_j over p = 10 independent beta draws, t = 0.5
  RandomStream rng(20240902);
  auto draw = [&rng]() {
    double acc = 0.0;
    for (int j = 1; j <= 10; ++j)
      acc -= std::log(rng.next_beta((23.0 - j + 1.0) / 2.0, 3.0));
    return acc;
  };
  const auto est = testref::mc_cf(0.5, 200000, draw);
  const auto exact = cf_wilks_log(0.5, 10, 23, 6, -1.0);
  CHECK(std::abs(exact.real() - est.value.real()) <= 3.0 * est.stderr_re);
  CHECK(std::abs(exact.imag() - est.value.imag()) <= 3.0 * est.stderr_im);
}

TEST_CASE("cf_wilks_cs_log: p = 2 symmetry and Monte Carlo oracle") {
  CHECK(cf_wilks_cs_log(0.0, 10, 30, 7) == std::complex<double>(1.0, 0.0));

  // p = 2: both beta factors carry the same parameters and unit coefficients
  for (double t : {0.4, -2.0}) {
    const auto factor = cf_log_beta(t, (20.0 - 4.0) / 2.0, 3.0 / 2.0, -1.0);
    CHECK(std::abs(cf_wilks_cs_log(t, 2, 20, 4) - factor * factor) <= 1e-15);
  }

  CHECK_THROWS_AS(cf_wilks_cs_log(1.0, 1, 30, 7), DomainError);
  CHECK_THROWS_AS(cf_wilks_cs_log(1.0, 10, 7, 7), DomainError);
  CHECK_THROWS_AS(cf_wilks_cs_log(1.0, 10, 30, 1), DomainError);

  // B1 B2^{p-1} representation, p=10, n=30, q=7, t = 1
  RandomStream rng(31337);
  auto draw = [&rng]() {
    const double b1 = rng.next_beta(23.0 / 2.0, 3.0);
    const double b2 = rng.next_beta(9.0 * 23.0 / 2.0, 9.0 * 3.0);
    return -std::log(b1) - 9.0 * std::log(b2);
  };
  const auto est = testref::mc_cf(1.0, 200000, draw);
  const auto exact = cf_wilks_cs_log(1.0, 10, 30, 7);
  CHECK(std::abs(exact.real() - est.value.real()) <= 3.0 * est.stderr_re);
  CHECK(std::abs(exact.imag() - est.value.imag()) <= 3.0 * est.stderr_im);
}

TEST_CASE("shift_scale: evaluation and metadata") {
  const auto base = make_chi2_cf(3.0);
  const auto same = shift_scale(base, 0.0, 1.0);
  for (double t : {0.7, -5.0}) CHECK(std::abs(same(t) - base(t)) <= 1e-15);

  const auto moved = shift_scale(base, 2.5, -0.5);
  REQUIRE(moved.moment_hint().has_value());
  CHECK_THAT(moved.moment_hint()->mean, WithinAbs(2.5 - 0.5 * 3.0, 1e-14));
  CHECK_THAT(moved.moment_hint()->stddev, WithinAbs(0.5 * std::sqrt(6.0), 1e-14));
  CHECK_FALSE(moved.support_min().has_value());  // negative scale flips the bound

  const auto up = shift_scale(base, 2.5, 2.0);
  REQUIRE(up.support_min().has_value());
  CHECK_THAT(*up.support_min(), WithinAbs(2.5, 1e-14));
  for (double t : {0.7, -5.0})
    CHECK(std::abs(up(t) - std::polar(1.0, 2.5 * t) * base(2.0 * t)) <= 1e-15);

  CHECK_THROWS_AS(shift_scale(base, 1.0, 0.0), DomainError);
}

TEST_CASE("product: chi-square additivity and metadata") {
  const auto combined = product({make_chi2_cf(1.0), make_chi2_cf(2.0)});
  for (int i = -30; i <= 30; ++i) {
    const double t = 0.5 * i;
    CHECK(std::abs(combined(t) - cf_chi2(t, 3.0)) <= 1e-14);
  }
  REQUIRE(combined.moment_hint().has_value());
  CHECK_THAT(combined.moment_hint()->mean, WithinAbs(3.0, 1e-14));
  CHECK_THAT(combined.moment_hint()->stddev, WithinAbs(std::sqrt(6.0), 1e-14));
  REQUIRE(combined.support_min().has_value());
  CHECK_THAT(*combined.support_min(), WithinAbs(0.0, 1e-14));

  const auto single = product({make_chi2_cf(4.0)});
  for (double t : {0.3, -9.0}) CHECK(std::abs(single(t) - cf_chi2(t, 4.0)) <= 1e-15);

  CHECK_THROWS_AS(product({}), DomainError);
}

TEST_CASE("every constructor satisfies the CF invariants") {
  check_cf_invariants(make_chi2_cf(5.0), 1);
  check_cf_invariants(make_quadform_cf({2.0, 1.0, 0.5}), 2);
  check_cf_invariants(make_cvm_cf(), 3);
  check_cf_invariants(make_ad_cf(), 4);
  check_cf_invariants(make_log_beta_cf(2.0, 3.0, -1.0), 5);
  check_cf_invariants(make_log_means_ratio_cf({1.0, 2.0, 1.5}, {0.25, 0.5, 0.25}, -1.0), 6);
  check_cf_invariants(make_bartlett_cf(k15_nu), 7);
  check_cf_invariants(make_wilks_log_cf(10, 23, 6), 8);
  check_cf_invariants(make_wilks_cs_log_cf(10, 30, 7), 9);
}
