#pragma once

#include "dyner/edge_dynamics.hpp"

namespace dyner {

/// Deterministic curves of the model: p(t), q(t) = p/(1-p) and their bounds on
/// [0, T]. Because p(t) relaxes monotonically from p0 to rho, the bounds are
/// min/max of {p0, rho}, widened by a relative 1e-12 and clamped to (0,1).
class TheoryCurves {
 public:
  explicit TheoryCurves(EdgeParams params);

  const EdgeParams& params() const noexcept { return params_; }
  double p(double t) const;
  double q(double t) const;
  double rho() const noexcept { return params_.rho(); }
  double kappa() const noexcept { return params_.kappa(); }
  double p_minus() const noexcept { return p_minus_; }
  double p_plus() const noexcept { return p_plus_; }
  double q_minus() const noexcept { return p_minus_ / (1.0 - p_minus_); }
  double q_plus() const noexcept { return p_plus_ / (1.0 - p_plus_); }

  /// Entry bound constant C1 = 1 / sqrt(p- (1 - p+)): |h_ij| <= C1 / sqrt(N).
  double entry_bound_constant() const noexcept;

 private:
  EdgeParams params_;
  double p_minus_;
  double p_plus_;
};

/// Covariance of the limiting Gaussian eigenvalue process:
/// 2 p(t1)(1 - p(t1)) exp(-(lambda_on + lambda_off)(t2 - t1)), t1 <= t2.
double limit_cov(const EdgeParams& params, double t1, double t2);

/// N p(t) + (1 - p(t)), the expansion of E[mu_N(t)] up to O(1/N).
double mean_expansion(const EdgeParams& params, int n, double t);

/// sqrt(N q) + 1/sqrt(N q), the same expansion for the normalized eigenvalue.
/// Multiplying by sqrt(N p (1-p)) gives mean_expansion exactly.
double normalized_mean_expansion(const EdgeParams& params, int n, double t);

/// (F(t) - F(r))^2 with F(t) = 35 kappa t.
double tightness_bound(const EdgeParams& params, double r, double t);

/// The sharper 1176 kappa^2 (t - r)^2 (= (384 + 792) kappa^2 (t - r)^2).
double tightness_intermediate_bound(const EdgeParams& params, double r, double t);

/// (log n)^4 / sqrt(n), the scale of the representation remainder.
double representation_remainder_scale(int n);

/// 2 + (log N)^2 / N^{1/4}, the uniform high-probability bound on ||H_N(t)||.
double norm_bound(int n);

/// c^k (log N)^{2k} / sqrt(N) with c = 4 e max(1, C2), C2 = 1/sqrt(p-(1-p+)):
/// the deviation bound for <e, H^k e> around its mean.
double quadratic_form_deviation_bound(const TheoryCurves& curves, int n, int k);

}  // namespace dyner
