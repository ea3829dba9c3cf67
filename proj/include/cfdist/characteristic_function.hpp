#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cfdist/errors.hpp"

namespace cfdist {

struct MomentHint {
  double mean = 0.0;
  double stddev = 0.0;
};

/// An evaluatable characteristic function t -> E[e^{itY}] with optional
/// metadata consumed by the inversion grid builder:
///   - support_min: lower bound of the support of Y, when known;
///   - moment_hint: analytically known mean and standard deviation.
///
/// Immutable after construction; evaluation is pure and safe to call from
/// any number of threads. cf(0) = 1 is enforced by construction.
class CharacteristicFunction {
 public:
  using Eval = std::function<std::complex<double>(double)>;

  explicit CharacteristicFunction(Eval eval,
                                  std::optional<double> support_min = std::nullopt,
                                  std::optional<MomentHint> moment_hint = std::nullopt)
      : eval_(std::move(eval)), support_min_(support_min), moment_hint_(moment_hint) {
    if (!eval_) throw DomainError("CharacteristicFunction: empty evaluator");
  }

  std::complex<double> operator()(double t) const {
    if (t == 0.0) return {1.0, 0.0};
    return eval_(t);
  }

  const std::optional<double>& support_min() const noexcept { return support_min_; }
  const std::optional<MomentHint>& moment_hint() const noexcept { return moment_hint_; }

 private:
  Eval eval_;
  std::optional<double> support_min_;
  std::optional<MomentHint> moment_hint_;
};

/// CF of shift + scale * Y: t -> e^{i shift t} cf(scale t).
/// Metadata transforms with the variable; the lower support bound is lost
/// when scale < 0 (it would become an upper bound).
inline CharacteristicFunction shift_scale(CharacteristicFunction cf, double shift, double scale) {
  if (scale == 0.0) throw DomainError("shift_scale: scale must be nonzero");

  std::optional<double> support;
  if (cf.support_min().has_value() && scale > 0.0)
    support = shift + scale * *cf.support_min();

  std::optional<MomentHint> hint;
  if (cf.moment_hint().has_value())
    hint = MomentHint{shift + scale * cf.moment_hint()->mean,
                      std::abs(scale) * cf.moment_hint()->stddev};

  auto inner = std::make_shared<CharacteristicFunction>(std::move(cf));
  return CharacteristicFunction(
      [inner, shift, scale](double t) {
        return std::polar(1.0, shift * t) * (*inner)(scale * t);
      },
      support, hint);
}

/// CF of a sum of independent variables: the pointwise product.
/// support_min adds when all components carry one; hinted means add and
/// hinted standard deviations add in quadrature.
inline CharacteristicFunction product(std::vector<CharacteristicFunction> cfs) {
  if (cfs.empty()) throw DomainError("product: empty list of characteristic functions");

  bool all_support = true, all_hints = true;
  double support_sum = 0.0, mean_sum = 0.0, var_sum = 0.0;
  for (const auto& cf : cfs) {
    if (cf.support_min().has_value())
      support_sum += *cf.support_min();
    else
      all_support = false;
    if (cf.moment_hint().has_value()) {
      mean_sum += cf.moment_hint()->mean;
      var_sum += cf.moment_hint()->stddev * cf.moment_hint()->stddev;
    } else {
      all_hints = false;
    }
  }

  std::optional<double> support;
  if (all_support) support = support_sum;
  std::optional<MomentHint> hint;
  if (all_hints) hint = MomentHint{mean_sum, std::sqrt(var_sum)};

  auto parts = std::make_shared<std::vector<CharacteristicFunction>>(std::move(cfs));
  return CharacteristicFunction(
      [parts](double t) {
        std::complex<double> acc{1.0, 0.0};
        for (const auto& cf : *parts) acc *= cf(t);
        return acc;
      },
      support, hint);
}

}  // namespace cfdist
