#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dyner/random.hpp"

namespace dyner {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample mean with se = sd / sqrt(R) (sd with the R-1 denominator).
Estimate mean_estimate(std::span<const double> x);

/// Covariance of the columns of an R x G sample matrix, unbiased (R-1), with
/// delete-one jackknife standard errors. With R == 2 the jackknife is
/// undefined and se entries are NaN. Throws DomainError for R < 2.
struct CovarianceEstimate {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd se;
};
CovarianceEstimate estimate_centered_cov(const Eigen::MatrixXd& samples);

/// Per-column skewness g1 = m3/m2^{3/2} and excess kurtosis g2 = m4/m2^2 - 3
/// with jackknife standard errors. Refuses (DomainError) below 50 rows.
struct NormalityDiagnostics {
  std::vector<double> skew;
  std::vector<double> skew_se;
  std::vector<double> excess_kurtosis;
  std::vector<double> excess_kurtosis_se;
};
inline constexpr int kMinNormalityReplicates = 50;
NormalityDiagnostics normality_diagnostics(const Eigen::MatrixXd& samples);

/// Linear-interpolation quantile (Hyndman-Fan type 7). Throws on empty input.
double quantile(std::span<const double> x, double prob);
inline double median(std::span<const double> x) { return quantile(x, 0.5); }

/// Statistic with a bootstrap standard error from `resamples` resamples drawn
/// from `rng`.
Estimate bootstrap_estimate(std::span<const double> x,
                            const std::function<double(std::span<const double>)>& statistic,
                            Stream rng, int resamples = 200);

/// Mann-Kendall trend statistic S = sum_{i<j} sign(x_j - x_i). p-values are
/// exact (permutation enumeration) for n <= 9 and normal-approximated with
/// continuity and tie correction above.
struct MannKendall {
  int s = 0;
  double p_two_sided = 1.0;
  double p_increasing = 1.0;  // one-sided, alternative: upward trend
};
MannKendall mann_kendall(std::span<const double> x);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace dyner
