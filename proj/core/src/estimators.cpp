#include "dyner/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dyner/errors.hpp"

namespace dyner {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double jackknife_se(std::span<const double> leave_one_out) {
  const double n = static_cast<double>(leave_one_out.size());
  const double mean = std::accumulate(leave_one_out.begin(), leave_one_out.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt((n - 1.0) / n * ss);
}

// Central moments 2..4 of the remaining sample when element with centered
// value c is removed, from power sums of the full centered sample.
struct Moments {
  double m2, m3, m4;
};

Moments leave_one_out_moments(double p1, double p2, double p3, double p4, double c, double count) {
  // Remaining power sums about the full-sample mean.
  const double q0 = count - 1.0;
  const double q1 = p1 - c;
  const double q2 = p2 - c * c;
  const double q3 = p3 - c * c * c;
  const double q4 = p4 - c * c * c * c;
  const double d = q1 / q0;  // mean of the remaining sample
  const double s2 = q2 - 2 * d * q1 + q0 * d * d;
  const double s3 = q3 - 3 * d * q2 + 3 * d * d * q1 - q0 * d * d * d;
  const double s4 = q4 - 4 * d * q3 + 6 * d * d * q2 - 4 * d * d * d * q1 + q0 * d * d * d * d;
  return {s2 / q0, s3 / q0, s4 / q0};
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

int kendall_s(std::span<const double> x) {
  int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  return s;
}

}  // namespace

Estimate mean_estimate(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean_estimate: empty sample");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (x.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

CovarianceEstimate estimate_centered_cov(const Eigen::MatrixXd& samples) {
  const Eigen::Index r = samples.rows();
  const Eigen::Index g = samples.cols();
  if (r < 2) throw DomainError("estimate_centered_cov: need at least 2 replicates");
  const double rr = static_cast<double>(r);
  const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
  const Eigen::MatrixXd sums = centered.transpose() * centered;

  CovarianceEstimate out;
  out.cov = sums / (rr - 1.0);
  out.se = Eigen::MatrixXd::Constant(g, g, kNaN);
  if (r < 3) return out;

  // Removing replicate i changes the centered cross-product sum by -c_ij c_ik R/(R-1).
  std::vector<double> loo(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < g; ++j) {
    for (Eigen::Index k = j; k < g; ++k) {
      for (Eigen::Index i = 0; i < r; ++i)
        loo[static_cast<std::size_t>(i)] =
            (sums(j, k) - centered(i, j) * centered(i, k) * rr / (rr - 1.0)) / (rr - 2.0);
      out.se(j, k) = out.se(k, j) = jackknife_se(loo);
    }
  }
  return out;
}

NormalityDiagnostics normality_diagnostics(const Eigen::MatrixXd& samples) {
  const Eigen::Index r = samples.rows();
  if (r < kMinNormalityReplicates)
    throw DomainError("normality_diagnostics: need at least 50 replicates");
  const double rr = static_cast<double>(r);
  NormalityDiagnostics out;
  std::vector<double> loo_skew(static_cast<std::size_t>(r));
  std::vector<double> loo_kurt(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Eigen::VectorXd c = samples.col(j).array() - samples.col(j).mean();
    const double p1 = c.sum();
    const double p2 = c.array().square().sum();
    const double p3 = c.array().cube().sum();
    const double p4 = c.array().square().square().sum();
    const double m2 = p2 / rr;
    const double m3 = p3 / rr;
    const double m4 = p4 / rr;
    if (!(m2 > 0.0)) {
      out.skew.push_back(kNaN);
      out.skew_se.push_back(kNaN);
      out.excess_kurtosis.push_back(kNaN);
      out.excess_kurtosis_se.push_back(kNaN);
      continue;
    }
    out.skew.push_back(m3 / std::pow(m2, 1.5));
    out.excess_kurtosis.push_back(m4 / (m2 * m2) - 3.0);
    for (Eigen::Index i = 0; i < r; ++i) {
      const Moments m = leave_one_out_moments(p1, p2, p3, p4, c(i), rr);
      loo_skew[static_cast<std::size_t>(i)] = m.m3 / std::pow(m.m2, 1.5);
      loo_kurt[static_cast<std::size_t>(i)] = m.m4 / (m.m2 * m.m2) - 3.0;
    }
    out.skew_se.push_back(jackknife_se(loo_skew));
    out.excess_kurtosis_se.push_back(jackknife_se(loo_kurt));
  }
  return out;
}

double quantile(std::span<const double> x, double prob) {
  if (x.empty()) throw DomainError("quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: prob outside [0,1]");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Estimate bootstrap_estimate(std::span<const double> x,
                            const std::function<double(std::span<const double>)>& statistic,
                            Stream rng, int resamples) {
  if (x.empty()) throw DomainError("bootstrap_estimate: empty sample");
  if (resamples < 2) throw DomainError("bootstrap_estimate: need at least 2 resamples");
  const double value = statistic(x);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<double> draw(x.size());
  for (int b = 0; b < resamples; ++b) {
    for (double& d : draw)
      d = x[static_cast<std::size_t>(rng.uniform() * static_cast<double>(x.size()))];
    stats.push_back(statistic(draw));
  }
  const Estimate spread = mean_estimate(stats);
  return {value, spread.se * std::sqrt(static_cast<double>(resamples))};
}

MannKendall mann_kendall(std::span<const double> x) {
  MannKendall out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  out.s = kendall_s(x);
  if (n <= 9) {
    std::vector<double> perm(x.begin(), x.end());
    std::sort(perm.begin(), perm.end());
    long total = 0;
    long ge = 0;
    long abs_ge = 0;
    do {
      const int s = kendall_s(perm);
      ++total;
      ge += (s >= out.s);
      abs_ge += (std::abs(s) >= std::abs(out.s));
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_increasing = static_cast<double>(ge) / static_cast<double>(total);
    out.p_two_sided = static_cast<double>(abs_ge) / static_cast<double>(total);
    return out;
  }
  // Variance with tie correction.
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double nn = static_cast<double>(n);
  double var = nn * (nn - 1.0) * (2.0 * nn + 5.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  var /= 18.0;
  const double sd = std::sqrt(var);
  const double s = static_cast<double>(out.s);
  // P(S >= s) with continuity correction on the lattice of step 2.
  out.p_increasing = out.s > 0 ? normal_upper_tail((s - 1.0) / sd)
                               : 1.0 - normal_upper_tail((1.0 - s) / sd);
  const double z_abs = (std::abs(s) - 1.0) / sd;
  out.p_two_sided = out.s == 0 ? 1.0 : std::min(1.0, 2.0 * normal_upper_tail(z_abs));
  return out;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace dyner
