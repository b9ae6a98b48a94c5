#include <gtest/gtest.h>

#include <cmath>

#include "dyner/config.hpp"
#include "dyner/errors.hpp"
#include "dyner/experiments.hpp"
#include "dyner/results_io.hpp"
#include "dyner/theory.hpp"

using namespace dyner;

namespace {

const EdgeParams kStationary(1.0, 1.0, 0.5, 2.0);

CampaignSpec small_spec(std::set<Check> checks) {
  CampaignSpec spec{.n_list = {3, 5}, .params = kStationary, .grid = TimeGrid({0.0, 1.0, 2.0}, 2.0)};
  spec.replicates = 2;
  spec.seed = 99;
  spec.checks = std::move(checks);
  spec.tightness.batch = 10;
  spec.tightness.triples = 4;
  spec.bounds.spacing_replicates = 300;
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST(Checks, NamesRoundTrip) {
  for (Check c : all_checks()) EXPECT_EQ(parse_check(to_string(c)), c);
  EXPECT_FALSE(parse_check("nope").has_value());
  EXPECT_EQ(all_checks().size(), 6u);
}

TEST(CampaignSpec, Validation) {
  CampaignSpec spec = small_spec(all_checks());
  EXPECT_NO_THROW(spec.validate());
  spec.replicates = 1;
  EXPECT_THROW(spec.validate(), DomainError);
  spec = small_spec(all_checks());
  spec.n_list.clear();
  EXPECT_THROW(spec.validate(), DomainError);
}

TEST(RunCampaign, TwoReplicatesIsDeterministic) {
  const CampaignSpec spec = small_spec(all_checks());
  const CampaignSummary a = run_campaign(spec);
  const CampaignSummary b = run_campaign(spec);
  const RunConfig config{spec};
  EXPECT_EQ(summary_json(a, config), summary_json(b, config));
  ASSERT_EQ(a.mean.size(), 6u);
  for (const MeanRow& row : a.mean) EXPECT_EQ(row.included + row.excluded, 2u);
  // Two replicates is too few for the normality diagnostics.
  const CheckVerdict* normality = a.verdict(Check::kNormality);
  ASSERT_NE(normality, nullptr);
  EXPECT_FALSE(normality->evaluated);
  EXPECT_TRUE(a.normality.empty());
}

TEST(RunCampaign, IndependentOfThreadCount) {
  CampaignSpec spec = small_spec(all_checks());
  spec.replicates = 12;
  spec.n_list = {6, 9};
  const RunConfig config{spec};
  const std::string one = summary_json(run_campaign(spec), config);
  spec.threads = 3;
  EXPECT_EQ(summary_json(run_campaign(spec), config), one);
  spec.threads = 0;
  EXPECT_EQ(summary_json(run_campaign(spec), config), one);
}

TEST(RunCampaign, ExclusionAccounting) {
  CampaignSpec spec = small_spec({Check::kMean, Check::kFcltCov, Check::kBounds});
  spec.replicates = 6;
  spec.n_list = {30};
  spec.spectral = SpectralConfig{1e-13, 2, true};
  spec.bounds.norm_rel_tol = 1e-13;
  const CampaignSummary s = run_campaign(spec);
  std::size_t excluded = 0;
  for (const MeanRow& row : s.mean) {
    EXPECT_EQ(row.included + row.excluded, 6u);
    excluded += row.excluded;
  }
  EXPECT_GT(excluded, 0u);
  ASSERT_EQ(s.bounds.size(), 1u);
  EXPECT_EQ(s.bounds[0].replicates + s.bounds[0].excluded, 6u);
}

TEST(RunCampaign, MeanRowsCarryTheoryAndCvMean) {
  CampaignSpec spec = small_spec({Check::kMean});
  spec.replicates = 20;
  spec.n_list = {40};
  const CampaignSummary s = run_campaign(spec);
  for (const MeanRow& row : s.mean) {
    EXPECT_DOUBLE_EQ(row.theory, mean_expansion(kStationary, 40, row.t));
    EXPECT_GT(row.mean.se, 0.0);
    EXPECT_LT(row.cv_mean.se, row.mean.se);
  }
}

TEST(RunCampaign, CovRowCount) {
  CampaignSpec spec = small_spec({Check::kFcltCov});
  const CampaignSummary s = run_campaign(spec);
  EXPECT_EQ(s.cov.size(), 2u * 3u * 4u / 2u);
}

TEST(RepresentationResidual, DegenerateInputIsZero) {
  std::vector<EdgePath> paths(6, EdgePath(EdgeState::kPresent, {}, 2.0));
  paths[2] = EdgePath(EdgeState::kAbsent, {}, 2.0);
  const GraphTrajectory g(3, kStationary, paths);
  const TimeGrid grid({0.0, 1.0, 2.0}, 2.0);
  const std::vector<double> mean{1.0, 2.0, 3.0};
  std::vector<double> mu;
  for (std::size_t j = 0; j < 3; ++j) mu.push_back(mean[j] + g.edge_sum_centered(grid[j]));
  EXPECT_NEAR(representation_residual(g, mu, mean, grid), 0.0, 1e-15);
  mu[1] += 0.25;
  EXPECT_NEAR(representation_residual(g, mu, mean, grid), 0.25, 1e-15);
  mu[1] = std::nan("");
  EXPECT_NEAR(representation_residual(g, mu, mean, grid), 0.0, 1e-15);
}

TEST(TightnessLhs, DegenerateAndOrder) {
  std::vector<GraphTrajectory> batch;
  for (int r = 0; r < 5; ++r) batch.push_back(sample_graph(8, kStationary, 3, r));
  const Estimate zero = tightness_moment_lhs(batch, 0.7, 0.7, 0.7);
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_EQ(zero.se, 0.0);
  EXPECT_THROW(tightness_moment_lhs(batch, 0.7, 0.5, 0.9), DomainError);
}

TEST(TightnessLhs, StreamingCampaignMatchesMaterializedBatch) {
  CampaignSpec spec = small_spec({Check::kTightness});
  spec.n_list = {7};
  spec.tightness.batch = 25;
  for (bool loops : {true, false}) {
    spec.self_loops = loops;
    const CampaignSummary s = run_campaign(spec);
    std::vector<GraphTrajectory> batch;
    for (int b = 0; b < 25; ++b) batch.push_back(sample_graph(7, kStationary, spec.seed, b, loops));
    ASSERT_EQ(s.tightness.size(), 4u);
    for (const TightnessRow& row : s.tightness) {
      const Estimate direct = tightness_moment_lhs(batch, row.r, row.s, row.t);
      EXPECT_NEAR(row.lhs.value, direct.value, 1e-12 * (1.0 + direct.value));
      EXPECT_NEAR(row.lhs.se, direct.se, 1e-12 * (1.0 + direct.se));
      EXPECT_DOUBLE_EQ(row.bound, tightness_bound(kStationary, row.r, row.t));
    }
  }
}

TEST(BoundExceedance, RowFields) {
  std::vector<GraphTrajectory> batch;
  for (int r = 0; r < 10; ++r) batch.push_back(sample_graph(60, kStationary, 4, r));
  const TimeGrid grid({0.0, 1.0}, 2.0);
  const BoundsRow row = bound_exceedance(batch, grid, SpectralConfig{1e-6, 100000, false});
  EXPECT_EQ(row.n, 60);
  EXPECT_EQ(row.replicates, 10u);
  EXPECT_EQ(row.excluded, 0u);
  EXPECT_EQ(row.k_max, default_truncation(60));
  EXPECT_DOUBLE_EQ(row.norm_threshold, norm_bound(60));
  EXPECT_EQ(row.norm_exceed_rate.value, 0.0);
  EXPECT_GT(row.norm_sup_mean.value, 1.5);
  EXPECT_LT(row.norm_sup_mean.value, 2.6);
  // p = 1/2 makes every squared entry exactly 1/N.
  EXPECT_NEAR(row.h2_mean.value, 1.0 / 60.0, 1e-15);
  std::vector<GraphTrajectory> mixed{sample_graph(5, kStationary, 1, 0), sample_graph(6, kStationary, 1, 0)};
  EXPECT_THROW(bound_exceedance(mixed, grid, SpectralConfig{}), DomainError);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) ASSERT_EQ(h, 1);
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw DomainError("boom");
                            }),
               DomainError);
  parallel_for(0, 2, [](std::size_t) { FAIL(); });
}
