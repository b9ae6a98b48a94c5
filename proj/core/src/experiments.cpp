#include "dyner/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "dyner/errors.hpp"
#include "dyner/theory.hpp"

namespace dyner {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kTagTriples = 1;
constexpr std::uint64_t kTagBootstrap = 2;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

CheckVerdict verdict_for(Check check) {
  CheckVerdict v;
  v.check = check;
  return v;
}

bool within(double estimate, double target, double band) { return std::abs(estimate - target) <= band; }

double cells(int n, bool self_loops) {
  const double nn = static_cast<double>(n);
  return self_loops ? nn * nn : nn * (nn - 1.0);
}

bool is_stationary(const EdgeParams& params) { return std::abs(params.p0() - params.rho()) <= 1e-12; }

Estimate binomial_rate(std::size_t hits, std::size_t total) {
  if (total == 0) return {kNaN, kNaN};
  const double rate = static_cast<double>(hits) / static_cast<double>(total);
  return {rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(total))};
}

double sup_residual(const ReplicatePath& path, std::span<const double> mean) {
  double sup = kNaN;
  for (std::size_t j = 0; j < path.mu.size(); ++j) {
    if (!path.ok[j] || !std::isfinite(mean[j])) continue;
    const double dev = std::abs(path.mu[j] - mean[j] - path.edge_sum[j]);
    sup = std::isnan(sup) ? dev : std::max(sup, dev);
  }
  return sup;
}

// Eigenvalue-based statistics of one n: mean, covariance, lag correlation,
// normality and the split-sample residual.
void eigen_checks(const CampaignSpec& spec, int n, CampaignSummary& out) {
  const std::size_t reps = static_cast<std::size_t>(spec.replicates);
  const std::size_t g = spec.grid.size();
  std::vector<ReplicatePath> paths(reps);
  parallel_for(reps, spec.threads, [&](std::size_t r) {
    const GraphTrajectory traj = sample_graph(n, spec.params, spec.seed, r, spec.self_loops);
    paths[r] = replicate_path(traj, spec.grid, spec.spectral);
  });

  std::vector<double> abs_dev;
  for (std::size_t j = 0; j < g; ++j) {
    std::vector<double> mu;
    std::vector<double> cv;
    for (const ReplicatePath& p : paths) {
      if (!p.ok[j]) continue;
      mu.push_back(p.mu[j]);
      cv.push_back(p.mu[j] - p.edge_sum[j]);
    }
    MeanRow row{n, spec.grid[j], {kNaN, kNaN}, mean_expansion(spec.params, n, spec.grid[j]),
                {kNaN, kNaN}, mu.size(), reps - mu.size()};
    if (!mu.empty()) {
      row.mean = mean_estimate(mu);
      row.cv_mean = mean_estimate(cv);
      abs_dev.push_back(std::abs(row.cv_mean.value - row.theory));
    }
    out.mean.push_back(row);
  }
  out.mean_trend.push_back({n, abs_dev.empty() ? kNaN : median(abs_dev)});

  // Complete cases for the joint statistics.
  std::vector<std::size_t> complete;
  for (std::size_t r = 0; r < reps; ++r)
    if (std::all_of(paths[r].ok.begin(), paths[r].ok.end(), [](std::uint8_t v) { return v != 0; }))
      complete.push_back(r);
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(complete.size()), static_cast<Eigen::Index>(g));
  for (std::size_t i = 0; i < complete.size(); ++i)
    for (std::size_t j = 0; j < g; ++j)
      samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = paths[complete[i]].mu[j];

  if (spec.checks.contains(Check::kFcltCov) && complete.size() >= 2) {
    const CovarianceEstimate est = estimate_centered_cov(samples);
    for (std::size_t j = 0; j < g; ++j)
      for (std::size_t k = j; k < g; ++k) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto kk = static_cast<Eigen::Index>(k);
        out.cov.push_back({n, spec.grid[j], spec.grid[k], est.cov(jj, kk), est.se(jj, kk),
                           limit_cov(spec.params, spec.grid[j], spec.grid[k])});
      }

    if (is_stationary(spec.params) && complete.size() >= 3 && g >= 2) {
      const double rr = static_cast<double>(complete.size());
      const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
      const Eigen::MatrixXd sums = centered.transpose() * centered;
      // Distinct lags with a relative tolerance.
      std::vector<std::pair<double, std::vector<std::pair<Eigen::Index, Eigen::Index>>>> lags;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(g); ++j)
        for (Eigen::Index k = j + 1; k < static_cast<Eigen::Index>(g); ++k) {
          const double lag = spec.grid[static_cast<std::size_t>(k)] - spec.grid[static_cast<std::size_t>(j)];
          auto it = std::find_if(lags.begin(), lags.end(), [&](const auto& entry) {
            return std::abs(entry.first - lag) <= 1e-9 * std::max(1.0, lag);
          });
          if (it == lags.end()) {
            lags.push_back({lag, {}});
            it = lags.end() - 1;
          }
          it->second.push_back({j, k});
        }
      std::sort(lags.begin(), lags.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      auto corr_avg = [&](const auto& pairs, auto&& entry) {
        double acc = 0.0;
        for (const auto& [j, k] : pairs) acc += entry(j, k) / std::sqrt(entry(j, j) * entry(k, k));
        return acc / static_cast<double>(pairs.size());
      };
      for (const auto& [lag, pairs] : lags) {
        const double value = corr_avg(pairs, [&](Eigen::Index a, Eigen::Index b) { return sums(a, b); });
        std::vector<double> loo(complete.size());
        for (std::size_t i = 0; i < complete.size(); ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          loo[i] = corr_avg(pairs, [&](Eigen::Index a, Eigen::Index b) {
            return sums(a, b) - centered(ii, a) * centered(ii, b) * rr / (rr - 1.0);
          });
        }
        const double m = std::accumulate(loo.begin(), loo.end(), 0.0) / rr;
        double ss = 0.0;
        for (double v : loo) ss += (v - m) * (v - m);
        out.lag_corr.push_back({n, lag, pairs.size(), {value, std::sqrt((rr - 1.0) / rr * ss)},
                                std::exp(-spec.params.total_rate() * lag)});
      }
    }
  }

  if (spec.checks.contains(Check::kNormality) &&
      complete.size() >= static_cast<std::size_t>(kMinNormalityReplicates)) {
    const NormalityDiagnostics diag = normality_diagnostics(samples);
    for (std::size_t j = 0; j < g; ++j)
      out.normality.push_back({n, spec.grid[j], {diag.skew[j], diag.skew_se[j]},
                               {diag.excess_kurtosis[j], diag.excess_kurtosis_se[j]}});
  }

  if (spec.checks.contains(Check::kRepresentation)) {
    // Split sample: the first half centers, the second half is measured.
    const std::size_t half = reps / 2;
    std::vector<double> mean(g, kNaN);
    std::size_t mean_used = 0;
    for (std::size_t j = 0; j < g; ++j) {
      std::vector<double> cv;
      for (std::size_t r = 0; r < half; ++r)
        if (paths[r].ok[j]) cv.push_back(paths[r].mu[j] - paths[r].edge_sum[j]);
      if (!cv.empty()) mean[j] = mean_estimate(cv).value;
      mean_used = std::max(mean_used, cv.size());
    }
    std::vector<double> residuals;
    for (std::size_t r = half; r < reps; ++r) {
      const double sup = sup_residual(paths[r], mean);
      if (!std::isnan(sup)) residuals.push_back(sup);
    }
    const double scale = representation_remainder_scale(n);
    ResidualRow row{n, mean_used, residuals.size(), scale, {kNaN, kNaN}, {kNaN, kNaN}, {kNaN, kNaN}, {kNaN, kNaN}};
    if (!residuals.empty()) {
      const auto nn = static_cast<std::uint64_t>(n);
      row.median_raw = bootstrap_estimate(residuals, [](std::span<const double> x) { return median(x); },
                                          aux_stream(spec.seed, kTagBootstrap, nn, 0));
      row.p95_raw = bootstrap_estimate(residuals, [](std::span<const double> x) { return quantile(x, 0.95); },
                                       aux_stream(spec.seed, kTagBootstrap, nn, 1));
      row.median_scaled = {row.median_raw.value / scale, row.median_raw.se / scale};
      row.p95_scaled = {row.p95_raw.value / scale, row.p95_raw.se / scale};
    }
    out.residual.push_back(row);
  }
}

void tightness_check(const CampaignSpec& spec, int n, CampaignSummary& out) {
  const double horizon = spec.grid.horizon();
  Stream pick = aux_stream(spec.seed, kTagTriples, static_cast<std::uint64_t>(n));
  std::vector<std::array<double, 3>> triples;
  std::vector<double> times;
  for (int k = 0; k < spec.tightness.triples; ++k) {
    std::array<double, 3> tri{pick.uniform() * horizon, pick.uniform() * horizon, pick.uniform() * horizon};
    std::sort(tri.begin(), tri.end());
    triples.push_back(tri);
    times.insert(times.end(), tri.begin(), tri.end());
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };

  const auto batch = static_cast<std::size_t>(spec.tightness.batch);
  const std::size_t nt = triples.size();
  std::vector<double> products(batch * nt);
  const double c = cells(n, spec.self_loops);
  const double nn = static_cast<double>(n);
  parallel_for(batch, spec.threads, [&](std::size_t b) {
    const std::vector<std::int64_t> sums =
        edge_double_sums(n, spec.params, spec.seed, b, times, spec.self_loops);
    std::vector<double> y(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
      y[k] = (static_cast<double>(sums[k]) - c * edge_prob(spec.params, times[k])) / nn;
    for (std::size_t k = 0; k < nt; ++k) {
      const double d1 = y[index_of(triples[k][1])] - y[index_of(triples[k][0])];
      const double d2 = y[index_of(triples[k][2])] - y[index_of(triples[k][1])];
      products[b * nt + k] = d1 * d1 * d2 * d2;
    }
  });

  std::vector<double> column(batch);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t b = 0; b < batch; ++b) column[b] = products[b * nt + k];
    const auto& [r, s, t] = triples[k];
    out.tightness.push_back({n, r, s, t, mean_estimate(column), tightness_bound(spec.params, r, t),
                             tightness_intermediate_bound(spec.params, r, t)});
  }
}

struct BoundsSample {
  bool ok = true;
  double norm_sup = 0.0;
  double h2 = 0.0;
  std::vector<std::vector<double>> forms;  // [grid][k]
};

BoundsSample bounds_sample(const GraphTrajectory& traj, const TimeGrid& grid, const SpectralConfig& cfg,
                           int k_max) {
  BoundsSample out;
  const double c = cells(traj.n(), traj.self_loops());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const CenteredMatrix h = traj.centered_matrix_at(grid[j]);
    try {
      out.norm_sup = std::max(out.norm_sup, spectral_norm(h.matrix(), cfg));
    } catch (const ConvergenceError&) {
      out.ok = false;
    }
    out.forms.push_back(quadratic_form_powers(h, k_max));
    out.h2 += h.matrix().squaredNorm() / c;
  }
  out.h2 /= static_cast<double>(grid.size());
  return out;
}

BoundsRow summarize_bounds(int n, const EdgeParams& params, std::span<const BoundsSample> samples, int k_max) {
  const TheoryCurves curves(params);
  BoundsRow row{};
  row.n = n;
  row.k_max = k_max;
  row.norm_threshold = norm_bound(n);
  row.h2_theory = 1.0 / static_cast<double>(n);

  std::vector<const BoundsSample*> used;
  for (const BoundsSample& s : samples)
    if (s.ok) used.push_back(&s);
  row.replicates = used.size();
  row.excluded = samples.size() - used.size();
  if (used.empty()) {
    row.norm_sup_mean = row.norm_exceed_rate = row.a2_exceed_rate = row.h2_mean = {kNaN, kNaN};
    return row;
  }

  const std::size_t g = used.front()->forms.size();
  std::vector<std::vector<double>> centre(g, std::vector<double>(static_cast<std::size_t>(k_max) + 1, 0.0));
  for (const BoundsSample* s : used)
    for (std::size_t j = 0; j < g; ++j)
      for (std::size_t k = 0; k <= static_cast<std::size_t>(k_max); ++k) centre[j][k] += s->forms[j][k];
  for (auto& row_j : centre)
    for (double& v : row_j) v /= static_cast<double>(used.size());

  std::vector<double> bound(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    bound[static_cast<std::size_t>(k)] = quadratic_form_deviation_bound(curves, n, k);

  std::size_t norm_hits = 0;
  std::size_t a2_hits = 0;
  std::vector<double> norms;
  std::vector<double> h2;
  for (const BoundsSample* s : used) {
    norms.push_back(s->norm_sup);
    h2.push_back(s->h2);
    norm_hits += s->norm_sup > row.norm_threshold;
    bool hit = false;
    for (std::size_t j = 0; j < g && !hit; ++j)
      for (std::size_t k = 1; k <= static_cast<std::size_t>(k_max); ++k)
        if (std::abs(s->forms[j][k] - centre[j][k]) >= bound[k]) {
          hit = true;
          break;
        }
    a2_hits += hit;
  }
  row.norm_sup_mean = mean_estimate(norms);
  row.norm_exceed_rate = binomial_rate(norm_hits, used.size());
  row.a2_exceed_rate = binomial_rate(a2_hits, used.size());
  row.h2_mean = mean_estimate(h2);
  return row;
}

void bounds_check(const CampaignSpec& spec, int n, CampaignSummary& out) {
  const auto reps = static_cast<std::size_t>(spec.replicates);
  SpectralConfig cfg = spec.spectral;
  cfg.rel_tol = spec.bounds.norm_rel_tol;
  const int k_max = default_truncation(n);
  std::vector<BoundsSample> samples(reps);
  parallel_for(reps, spec.threads, [&](std::size_t r) {
    const GraphTrajectory traj = sample_graph(n, spec.params, spec.seed, r, spec.self_loops);
    samples[r] = bounds_sample(traj, spec.grid, cfg, k_max);
  });
  out.bounds.push_back(summarize_bounds(n, spec.params, samples, k_max));
}

void spacing_study(const CampaignSpec& spec, CampaignSummary& out) {
  const auto reps = static_cast<std::size_t>(spec.bounds.spacing_replicates);
  for (int m : spec.bounds.spacing_n) {
    std::vector<double> spacing(reps);
    parallel_for(reps, spec.threads, [&](std::size_t r) {
      spacing[r] = sample_graph(m, spec.params, spec.seed, r, spec.self_loops).min_jump_spacing();
    });
    std::vector<double> probs;
    for (double x : spec.bounds.spacing_x) {
      const auto hits = static_cast<std::size_t>(
          std::count_if(spacing.begin(), spacing.end(), [x](double v) { return v < x; }));
      const Estimate prob = binomial_rate(hits, reps);
      out.spacing.push_back({m, x, prob});
      probs.push_back(prob.value);
    }
    out.spacing_fit.push_back({m, linear_fit(spec.bounds.spacing_x, probs)});
  }
}

// ---------------------------------------------------------------------------
// Verdicts

CheckVerdict mean_verdict(const CampaignSummary& s) {
  CheckVerdict v = verdict_for(Check::kMean);
  std::size_t bad = 0;
  for (const MeanRow& row : s.mean) {
    const double band = std::fmax(3.0 * row.mean.se, 0.05);
    if (!within(row.mean.value, row.theory, band)) ++bad;
  }
  v.passed = bad == 0 && !s.mean.empty();
  v.detail = fmt("%zu of %zu grid points outside max(3 se, 0.05)", bad, s.mean.size());
  if (s.mean_trend.size() >= 2) {
    auto lo = std::min_element(s.mean_trend.begin(), s.mean_trend.end(),
                               [](const TrendRow& a, const TrendRow& b) { return a.n < b.n; });
    auto hi = std::max_element(s.mean_trend.begin(), s.mean_trend.end(),
                               [](const TrendRow& a, const TrendRow& b) { return a.n < b.n; });
    const bool decreasing = hi->median_abs_dev < lo->median_abs_dev;
    v.passed = v.passed && decreasing;
    v.detail += fmt("; median |dev| %.4g at n=%d vs %.4g at n=%d", lo->median_abs_dev, lo->n,
                    hi->median_abs_dev, hi->n);
  }
  return v;
}

CheckVerdict fclt_verdict(const CampaignSummary& s, const CampaignSpec& spec) {
  CheckVerdict v = verdict_for(Check::kFcltCov);
  if (s.cov.empty()) {
    v.passed = false;
    v.detail = "no covariance estimates (fewer than 2 complete replicates)";
    return v;
  }
  for (int n : spec.n_list) {
    std::size_t total = 0;
    std::size_t good = 0;
    for (const CovRow& row : s.cov)
      if (row.n == n) {
        ++total;
        good += within(row.cov_hat, row.theory, 3.0 * row.se);
      }
    const bool ok = total > 0 && static_cast<double>(good) >= 0.9 * static_cast<double>(total);
    v.passed = v.passed && ok;
    v.detail += fmt("%sn=%d: %zu/%zu pairs within 3 se", v.detail.empty() ? "" : "; ", n, good, total);
  }
  std::size_t lag_bad = 0;
  for (const LagCorrRow& row : s.lag_corr) lag_bad += !within(row.corr.value, row.theory, 3.0 * row.corr.se);
  if (!s.lag_corr.empty()) {
    v.passed = v.passed && lag_bad == 0;
    v.detail += fmt("; %zu of %zu lag correlations outside 3 se", lag_bad, s.lag_corr.size());
  }
  return v;
}

CheckVerdict normality_verdict(const CampaignSummary& s, const CampaignSpec& spec) {
  CheckVerdict v = verdict_for(Check::kNormality);
  if (s.normality.empty()) {
    v.evaluated = false;
    v.detail = fmt("refused: fewer than %d complete replicates", kMinNormalityReplicates);
    return v;
  }
  for (int n : spec.n_list) {
    std::size_t total = 0;
    std::size_t good = 0;
    for (const NormalityRow& row : s.normality)
      if (row.n == n) {
        ++total;
        good += within(row.skew.value, 0.0, 3.0 * row.skew.se) &&
                within(row.excess_kurtosis.value, 0.0, 3.0 * row.excess_kurtosis.se);
      }
    if (total == 0) continue;
    v.passed = v.passed && static_cast<double>(good) >= 0.9 * static_cast<double>(total);
    v.detail += fmt("%sn=%d: %zu/%zu grid points within 3 se", v.detail.empty() ? "" : "; ", n, good, total);
  }
  return v;
}

CheckVerdict representation_verdict(CampaignSummary& s) {
  CheckVerdict v = verdict_for(Check::kRepresentation);
  std::vector<ResidualRow> rows = s.residual;
  std::sort(rows.begin(), rows.end(), [](const ResidualRow& a, const ResidualRow& b) { return a.n < b.n; });
  if (rows.size() < 2) {
    v.detail = "single n, trend not assessed";
    return v;
  }
  std::vector<double> scaled;
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scaled.push_back(rows[i].median_scaled.value);
    if (i > 0 && !(rows[i].median_raw.value < rows[i - 1].median_raw.value)) decreasing = false;
  }
  s.residual_trend = mann_kendall(scaled);
  v.passed = s.residual_trend.p_increasing > 0.05 && decreasing;
  v.detail = fmt("Mann-Kendall S=%d p_increasing=%.4g; raw medians %s", s.residual_trend.s,
                 s.residual_trend.p_increasing, decreasing ? "strictly decreasing" : "not strictly decreasing");
  return v;
}

CheckVerdict tightness_verdict(const CampaignSummary& s) {
  CheckVerdict v = verdict_for(Check::kTightness);
  std::size_t bad = 0;
  std::size_t bad_intermediate = 0;
  for (const TightnessRow& row : s.tightness) {
    bad += !(row.lhs.value <= row.bound + 3.0 * row.lhs.se);
    bad_intermediate += !(row.lhs.value <= row.intermediate_bound + 3.0 * row.lhs.se);
  }
  v.passed = bad == 0;
  v.detail = fmt("%zu of %zu triples above the bound (%zu above the intermediate bound)", bad,
                 s.tightness.size(), bad_intermediate);
  return v;
}

CheckVerdict bounds_verdict(const CampaignSummary& s) {
  CheckVerdict v = verdict_for(Check::kBounds);
  std::vector<BoundsRow> rows = s.bounds;
  std::sort(rows.begin(), rows.end(), [](const BoundsRow& a, const BoundsRow& b) { return a.n < b.n; });
  bool rates_zero = true;
  bool monotone = true;
  bool h2_ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BoundsRow& row = rows[i];
    rates_zero = rates_zero && row.norm_exceed_rate.value == 0.0 && row.a2_exceed_rate.value == 0.0;
    // At p = 1/2 every squared entry equals 1/N exactly and se is 0; allow rounding.
    h2_ok = h2_ok && within(row.h2_mean.value, row.h2_theory, 4.0 * row.h2_mean.se + 1e-9 * row.h2_theory);
    if (i > 0)
      monotone = monotone && row.norm_exceed_rate.value <= rows[i - 1].norm_exceed_rate.value &&
                 row.a2_exceed_rate.value <= rows[i - 1].a2_exceed_rate.value;
  }
  bool linear = true;
  for (const SpacingFit& f : s.spacing_fit) linear = linear && f.fit.r_squared >= 0.95;
  bool spacing_monotone = true;
  for (std::size_t a = 0; a < s.spacing.size(); ++a)
    for (std::size_t b = 0; b < s.spacing.size(); ++b)
      if (s.spacing[a].x == s.spacing[b].x && s.spacing[a].n < s.spacing[b].n)
        spacing_monotone = spacing_monotone && s.spacing[a].prob.value <= s.spacing[b].prob.value;
  v.passed = rates_zero && monotone && h2_ok && linear && spacing_monotone && !rows.empty();
  v.detail = fmt("exceedance %s, %s in n; E[h^2] %s; spacing tail %s, %s in N", rates_zero ? "zero" : "nonzero",
                 monotone ? "non-increasing" : "increasing", h2_ok ? "within 4 se of 1/N" : "off 1/N",
                 linear ? "linear (R^2 >= 0.95)" : "not linear", spacing_monotone ? "increasing" : "not increasing");
  return v;
}

}  // namespace

std::string_view to_string(Check check) noexcept {
  switch (check) {
    case Check::kMean: return "mean";
    case Check::kFcltCov: return "fclt_cov";
    case Check::kRepresentation: return "representation";
    case Check::kNormality: return "normality";
    case Check::kTightness: return "tightness";
    case Check::kBounds: return "bounds";
  }
  return "unknown";
}

std::optional<Check> parse_check(std::string_view name) noexcept {
  for (Check c : all_checks())
    if (to_string(c) == name) return c;
  return std::nullopt;
}

const std::set<Check>& all_checks() {
  static const std::set<Check> checks{Check::kMean,      Check::kFcltCov,   Check::kRepresentation,
                                      Check::kNormality, Check::kTightness, Check::kBounds};
  return checks;
}

void CampaignSpec::validate() const {
  if (replicates < 2) throw DomainError("replicates must be >= 2");
  if (grid.size() == 0) throw DomainError("grid must be nonempty");
  if (grid.horizon() > params.horizon()) throw DomainError("grid extends beyond T");
  if (n_list.empty()) throw DomainError("n_list must be nonempty");
  for (int n : n_list)
    if (n < 2) throw DomainError("every n must be >= 2");
  if (threads < 0) throw DomainError("threads must be >= 0");
  spectral.validate();
  if (tightness.batch < 2) throw DomainError("tightness batch must be >= 2");
  if (tightness.triples < 1) throw DomainError("tightness triples must be >= 1");
  if (!(bounds.norm_rel_tol > 0.0)) throw DomainError("norm_rel_tol must be > 0");
  if (bounds.spacing_replicates < 1) throw DomainError("spacing_replicates must be >= 1");
  for (int n : bounds.spacing_n)
    if (n < 1) throw DomainError("spacing_n entries must be >= 1");
  if (bounds.spacing_x.size() < 2) throw DomainError("spacing_x needs at least 2 values");
  for (double x : bounds.spacing_x)
    if (!(x > 0.0)) throw DomainError("spacing_x entries must be > 0");
}

bool CampaignSummary::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const CheckVerdict& v) { return v.passed; });
}

const CheckVerdict* CampaignSummary::verdict(Check check) const {
  for (const CheckVerdict& v : verdicts)
    if (v.check == check) return &v;
  return nullptr;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ReplicatePath replicate_path(const GraphTrajectory& traj, const TimeGrid& grid, const SpectralConfig& config) {
  ReplicatePath out;
  std::optional<Eigen::VectorXd> warm;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid[j];
    out.edge_sum.push_back(traj.edge_sum_centered(t));
    try {
      SpectralResult r = principal_eig(traj.adjacency_at(t), config, warm);
      out.mu.push_back(r.mu);
      out.ok.push_back(1);
      if (config.warm_start) warm = std::move(r.vector);
    } catch (const ConvergenceError&) {
      out.mu.push_back(kNaN);
      out.ok.push_back(0);
      warm.reset();
    }
  }
  return out;
}

double representation_residual(const GraphTrajectory& traj, std::span<const double> mu,
                                std::span<const double> mean, const TimeGrid& grid) {
  if (mu.size() != grid.size() || mean.size() != grid.size())
    throw DomainError("representation_residual: mu and mean must match the grid");
  ReplicatePath path;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    path.edge_sum.push_back(traj.edge_sum_centered(grid[j]));
    path.mu.push_back(mu[j]);
    path.ok.push_back(!std::isnan(mu[j]));
  }
  return sup_residual(path, mean);
}

Estimate tightness_moment_lhs(std::span<const GraphTrajectory> batch, double r, double s, double t) {
  if (!(r <= s && s <= t)) throw DomainError("tightness_moment_lhs: requires r <= s <= t");
  if (batch.empty()) throw DomainError("tightness_moment_lhs: empty batch");
  std::vector<double> products;
  for (const GraphTrajectory& traj : batch) {
    const double d1 = traj.edge_sum_centered(s) - traj.edge_sum_centered(r);
    const double d2 = traj.edge_sum_centered(t) - traj.edge_sum_centered(s);
    products.push_back(d1 * d1 * d2 * d2);
  }
  return mean_estimate(products);
}

BoundsRow bound_exceedance(std::span<const GraphTrajectory> batch, const TimeGrid& grid,
                           const SpectralConfig& norm_config) {
  if (batch.empty()) throw DomainError("bound_exceedance: empty batch");
  const int n = batch.front().n();
  const int k_max = default_truncation(n);
  std::vector<BoundsSample> samples;
  for (const GraphTrajectory& traj : batch) {
    if (traj.n() != n || !(traj.params() == batch.front().params()))
      throw DomainError("bound_exceedance: batch must share n and params");
    samples.push_back(bounds_sample(traj, grid, norm_config, k_max));
  }
  return summarize_bounds(n, batch.front().params(), samples, k_max);
}

CampaignSummary run_campaign(const CampaignSpec& spec) {
  spec.validate();
  CampaignSummary out{.spec = spec};
  const bool eigen = spec.checks.contains(Check::kMean) || spec.checks.contains(Check::kFcltCov) ||
                     spec.checks.contains(Check::kRepresentation) || spec.checks.contains(Check::kNormality);
  for (int n : spec.n_list) {
    if (eigen) eigen_checks(spec, n, out);
    if (spec.checks.contains(Check::kTightness)) tightness_check(spec, n, out);
    if (spec.checks.contains(Check::kBounds)) bounds_check(spec, n, out);
  }
  if (spec.checks.contains(Check::kBounds)) spacing_study(spec, out);

  for (Check c : spec.checks) {
    switch (c) {
      case Check::kMean: out.verdicts.push_back(mean_verdict(out)); break;
      case Check::kFcltCov: out.verdicts.push_back(fclt_verdict(out, spec)); break;
      case Check::kRepresentation: out.verdicts.push_back(representation_verdict(out)); break;
      case Check::kNormality: out.verdicts.push_back(normality_verdict(out, spec)); break;
      case Check::kTightness: out.verdicts.push_back(tightness_verdict(out)); break;
      case Check::kBounds: out.verdicts.push_back(bounds_verdict(out)); break;
    }
  }
  return out;
}

}  // namespace dyner
