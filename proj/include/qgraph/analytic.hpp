#pragma once

#include <cmath>
#include <functional>

#include "qgraph/types.hpp"

namespace qgraph {

/// A complex number carried as mantissa * exp(log_scale), so that values far
/// outside double range keep an exact phase.
struct ScaledValue {
  Complex mantissa{0.0, 0.0};
  Complex log_scale{0.0, 0.0};

  Complex value() const { return mantissa * std::exp(log_scale); }
  double phase() const { return std::arg(mantissa) + log_scale.imag(); }

  /// value() * exp(-reference); useful when comparing values sharing an anchor.
  Complex relative_to(Complex reference) const { return mantissa * std::exp(log_scale - reference); }
};

/// Holomorphic function evaluated through an anchor point. For a fixed anchor
/// the map z -> eval(z, anchor).value() is holomorphic; all non-holomorphic
/// normalisation choices are frozen at the anchor. eval(z, z).mantissa is
/// normalised so that its modulus is a size-independent closeness-to-zero
/// measure.
struct AnalyticFunction {
  std::function<ScaledValue(Complex z, Complex anchor)> eval;
  /// Rough bound on |d arg f / dz| away from zeros; seeds contour sampling.
  double oscillation_rate = 0.0;

  ScaledValue operator()(Complex z) const { return eval(z, z); }
};

/// Wraps a plain function; values are used unnormalised.
inline AnalyticFunction make_analytic(std::function<Complex(Complex)> f, double oscillation_rate = 0.0) {
  return AnalyticFunction{[f = std::move(f)](Complex z, Complex) { return ScaledValue{f(z), 0.0}; },
                          oscillation_rate};
}

}  // namespace qgraph
