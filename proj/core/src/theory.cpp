#include "dyner/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dyner/errors.hpp"

namespace dyner {

TheoryCurves::TheoryCurves(EdgeParams params) : params_(params) {
  const double lo = std::min(params.p0(), params.rho());
  const double hi = std::max(params.p0(), params.rho());
  p_minus_ = std::max(lo * (1.0 - 1e-12), std::numeric_limits<double>::min());
  p_plus_ = std::min(hi * (1.0 + 1e-12), std::nextafter(1.0, 0.0));
}

double TheoryCurves::p(double t) const { return edge_prob(params_, t); }

double TheoryCurves::q(double t) const {
  const double pt = p(t);
  return pt / (1.0 - pt);
}

double TheoryCurves::entry_bound_constant() const noexcept {
  return 1.0 / std::sqrt(p_minus_ * (1.0 - p_plus_));
}

double limit_cov(const EdgeParams& params, double t1, double t2) {
  if (t1 > t2) throw DomainError("limit_cov: requires t1 <= t2");
  return 2.0 * edge_cov(params, t1, t2);
}

double mean_expansion(const EdgeParams& params, int n, double t) {
  if (n < 1) throw DomainError("mean_expansion: n must be >= 1");
  const double p = edge_prob(params, t);
  return static_cast<double>(n) * p + (1.0 - p);
}

double normalized_mean_expansion(const EdgeParams& params, int n, double t) {
  if (n < 1) throw DomainError("normalized_mean_expansion: n must be >= 1");
  const double p = edge_prob(params, t);
  const double root = std::sqrt(static_cast<double>(n) * p / (1.0 - p));
  return root + 1.0 / root;
}

double tightness_bound(const EdgeParams& params, double r, double t) {
  if (r > t) throw DomainError("tightness_bound: requires r <= t");
  const double df = 35.0 * params.kappa() * (t - r);
  return df * df;
}

double tightness_intermediate_bound(const EdgeParams& params, double r, double t) {
  if (r > t) throw DomainError("tightness_intermediate_bound: requires r <= t");
  const double k = params.kappa();
  return 1176.0 * k * k * (t - r) * (t - r);
}

double representation_remainder_scale(int n) {
  if (n < 2) throw DomainError("representation_remainder_scale: n must be >= 2");
  const double l = std::log(static_cast<double>(n));
  return (l * l) * (l * l) / std::sqrt(static_cast<double>(n));
}

double norm_bound(int n) {
  if (n < 2) throw DomainError("norm_bound: n must be >= 2");
  const double l = std::log(static_cast<double>(n));
  return 2.0 + l * l / std::pow(static_cast<double>(n), 0.25);
}

double quadratic_form_deviation_bound(const TheoryCurves& curves, int n, int k) {
  if (n < 2 || k < 0) throw DomainError("quadratic_form_deviation_bound: need n >= 2, k >= 0");
  const double c = 4.0 * std::numbers::e * std::max(1.0, curves.entry_bound_constant());
  const double l = std::log(static_cast<double>(n));
  return std::pow(c * l * l, k) / std::sqrt(static_cast<double>(n));
}

}  // namespace dyner
