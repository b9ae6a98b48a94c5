#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyner/edge_dynamics.hpp"
#include "dyner/estimators.hpp"
#include "dyner/graph_sim.hpp"
#include "dyner/spectral.hpp"

namespace dyner {

enum class Check { kMean, kFcltCov, kRepresentation, kNormality, kTightness, kBounds };

std::string_view to_string(Check check) noexcept;
std::optional<Check> parse_check(std::string_view name) noexcept;
const std::set<Check>& all_checks();

struct TightnessOptions {
  int batch = 200;     // trajectories per triple
  int triples = 20;    // random r <= s <= t in [0, T]
  bool operator==(const TightnessOptions&) const = default;
};

struct BoundsOptions {
  // Lanczos tolerance for ||H||; the bound is far from the typical norm.
  double norm_rel_tol = 1e-6;
  std::vector<int> spacing_n{4, 8};
  std::vector<double> spacing_x{1e-5, 2e-5, 3e-5, 4e-5, 5e-5};
  int spacing_replicates = 100000;
  bool operator==(const BoundsOptions&) const = default;
};

struct CampaignSpec {
  std::vector<int> n_list;
  EdgeParams params;
  TimeGrid grid;
  int replicates = 200;
  std::uint64_t seed = 1;
  std::set<Check> checks = all_checks();
  SpectralConfig spectral{};
  bool self_loops = true;
  int threads = 0;  // 0 = hardware concurrency
  TightnessOptions tightness{};
  BoundsOptions bounds{};

  /// Throws DomainError: R >= 2, nonempty grid within the horizon, n_list
  /// nonempty with every n >= 2, tightness batch >= 2, spacing settings sane.
  void validate() const;
  bool operator==(const CampaignSpec&) const = default;
};

struct MeanRow {
  int n;
  double t;
  Estimate mean;     // plain replicate mean of mu(t)
  double theory;     // N p + (1 - p)
  Estimate cv_mean;  // mean of mu(t) - edge_sum_centered(t), same expectation, less noise
  std::size_t included;
  std::size_t excluded;
};

struct CovRow {
  int n;
  double t1, t2;
  double cov_hat, se, theory;
};

struct LagCorrRow {
  int n;
  double lag;
  std::size_t pairs;
  Estimate corr;  // average over grid pairs at this lag, jackknife se
  double theory;
};

struct NormalityRow {
  int n;
  double t;
  Estimate skew;
  Estimate excess_kurtosis;
};

struct ResidualRow {
  int n;
  std::size_t mean_batch;      // replicates used for the centering mean
  std::size_t residual_batch;  // replicates whose sup residual was measured
  double scale;                // (log n)^4 / sqrt(n)
  Estimate median_raw, p95_raw;
  Estimate median_scaled, p95_scaled;
};

struct TightnessRow {
  int n;
  double r, s, t;
  Estimate lhs;
  double bound;               // (35 kappa (t - r))^2
  double intermediate_bound;  // 1176 kappa^2 (t - r)^2
};

struct BoundsRow {
  int n;
  std::size_t replicates;  // replicates with every norm solve converged
  std::size_t excluded;
  int k_max;
  double norm_threshold;
  Estimate norm_sup_mean;  // mean over replicates of sup_t ||H(t)||
  Estimate norm_exceed_rate;
  Estimate a2_exceed_rate;
  Estimate h2_mean;  // mean squared entry of H
  double h2_theory;  // 1/N
};

struct SpacingRow {
  int n;
  double x;
  Estimate prob;  // P(min jump spacing < x)
};

struct SpacingFit {
  int n;
  LinearFit fit;
};

struct TrendRow {
  int n;
  double median_abs_dev;  // median over grid of |cv_mean - theory|
};

struct CheckVerdict {
  Check check = Check::kMean;
  bool evaluated = true;  // false when the check was refused (e.g. R < 50 for normality)
  bool passed = true;
  std::string detail;
};

struct CampaignSummary {
  CampaignSpec spec;
  std::vector<MeanRow> mean{};
  std::vector<TrendRow> mean_trend{};
  std::vector<CovRow> cov{};
  std::vector<LagCorrRow> lag_corr{};
  std::vector<NormalityRow> normality{};
  std::vector<ResidualRow> residual{};
  MannKendall residual_trend{};  // on scaled medians ordered by n
  std::vector<TightnessRow> tightness{};
  std::vector<BoundsRow> bounds{};
  std::vector<SpacingRow> spacing{};
  std::vector<SpacingFit> spacing_fit{};
  std::vector<CheckVerdict> verdicts{};

  bool all_passed() const;
  const CheckVerdict* verdict(Check check) const;
};

/// Runs every requested check. Deterministic in (spec, seed): each replicate
/// uses its own substreams and results are aggregated in replicate order, so
/// the summary does not depend on spec.threads.
CampaignSummary run_campaign(const CampaignSpec& spec);

/// Per-replicate eigenvalue path with the matching centered edge sums.
/// Solver failures leave ok[j] == 0 and mu[j] == NaN.
struct ReplicatePath {
  std::vector<double> mu;
  std::vector<double> edge_sum;
  std::vector<std::uint8_t> ok;
};
ReplicatePath replicate_path(const GraphTrajectory& traj, const TimeGrid& grid,
                             const SpectralConfig& config);

/// sup over the grid of |mu(t) - mean(t) - edge_sum_centered(t)|, skipping grid
/// points where mu is NaN. `mean` must come from replicates disjoint from `traj`.
double representation_residual(const GraphTrajectory& traj, std::span<const double> mu,
                               std::span<const double> mean, const TimeGrid& grid);

/// Empirical E[D(r,s)^2 D(s,t)^2] over the batch, D(a,b) the increment of
/// edge_sum_centered between a and b. Throws DomainError unless r <= s <= t.
Estimate tightness_moment_lhs(std::span<const GraphTrajectory> batch, double r, double s, double t);

/// Exceedance rates of the norm bound and of the quadratic-form deviation
/// bounds k = 1..ceil(log N) (k = 0 deviates by exactly 0) over the batch.
BoundsRow bound_exceedance(std::span<const GraphTrajectory> batch, const TimeGrid& grid,
                           const SpectralConfig& norm_config);

/// Deterministic parallel for: calls fn(i) for i in [0, count) on up to
/// `threads` workers (0 = hardware concurrency). The first exception thrown by
/// any fn is rethrown after all workers have joined.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace dyner
