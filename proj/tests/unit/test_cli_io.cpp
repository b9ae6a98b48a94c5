#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dyner/config.hpp"
#include "dyner/errors.hpp"
#include "dyner/results_io.hpp"
#include "dyner/theory.hpp"

using namespace dyner;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"n":[100],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":2,"grid":[0,0.5,1,1.5,2]})";

std::string with(const std::string& extra) {
  std::string s = kMinimal;
  s.pop_back();
  return s + "," + extra + "}";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dyner_test_" + name);
  fs::remove_all(dir);
  return dir;
}

void expect_config_error(const std::string& json, const std::string& key) {
  try {
    parse_config(json);
    ADD_FAILURE() << "accepted " << json;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

RunConfig tiny_config(const fs::path& out) {
  RunConfig c = parse_config(R"({"n":[4],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":1,"grid":[0.5],
    "replicates":2,"tightness_triples":2,"spacing_replicates":50,"spacing_n":[3]})");
  c.output_dir = out.string();
  c.spec.threads = 1;
  return c;
}

}  // namespace

TEST(ParseConfig, MinimalConfigGetsDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.spec.n_list, std::vector<int>{100});
  EXPECT_EQ(c.spec.replicates, 200);
  EXPECT_EQ(c.spec.spectral.rel_tol, 1e-10);
  EXPECT_EQ(c.spec.spectral.max_iters, 100000);
  EXPECT_TRUE(c.spec.spectral.warm_start);
  EXPECT_TRUE(c.spec.self_loops);
  EXPECT_EQ(c.spec.checks, all_checks());
  EXPECT_EQ(c.spec.grid.size(), 5u);
  EXPECT_EQ(c.spec.tightness.batch, 200);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_FALSE(c.emit_plots);
}

TEST(ParseConfig, RejectsBadValuesNamingTheKey) {
  expect_config_error(with(R"("bogus":1)"), "bogus");
  std::string p0_one = kMinimal;
  p0_one.replace(p0_one.find("\"p0\":0.5"), 8, "\"p0\":1.0");
  expect_config_error(p0_one, "p0");
  std::string negative = kMinimal;
  negative.replace(negative.find("\"lambda_on\":1"), 13, "\"lambda_on\":-1");
  expect_config_error(negative, "lambda_on");
  expect_config_error(with(R"("replicates":"many")"), "replicates");
  expect_config_error(with(R"("seed":-3)"), "seed");
  expect_config_error(with(R"("checks":["mean","magic"])"), "checks");
  expect_config_error(R"({"n":[100],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":2})", "grid");
  expect_config_error(R"({"n":[100],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":2,"grid":[0,3]})", "grid");
  EXPECT_THROW(parse_config(with(R"("replicates":1)")), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(parse_config("[1,2]"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(ParseConfig, RoundTripThroughEcho) {
  const RunConfig c = parse_config(with(
      R"("replicates":37,"seed":18446744073709551615,"checks":["bounds","mean"],"self_loops":false,
         "rel_tol":1e-9,"max_iters":500,"warm_start":false,"threads":3,"output_dir":"x/y","emit_plots":true,
         "tightness_batch":11,"tightness_triples":5,"norm_rel_tol":1e-5,"spacing_n":[5],"spacing_x":[0.001,0.002],
         "spacing_replicates":77)"));
  EXPECT_EQ(c.spec.seed, 18446744073709551615ull);
  EXPECT_EQ(parse_config(config_to_json(c)), c);
  EXPECT_EQ(parse_config(config_to_json(parse_config(kMinimal))), parse_config(kMinimal));
  const std::string stable = config_to_json(c, false);
  EXPECT_EQ(stable.find("threads"), std::string::npos);
  EXPECT_EQ(stable.find("output_dir"), std::string::npos);
}

TEST(ParseConfig, Overrides) {
  RunConfig c = parse_config(kMinimal);
  apply_overrides(c, ConfigOverrides{7, 2, "elsewhere", true});
  EXPECT_EQ(c.spec.seed, 7u);
  EXPECT_EQ(c.spec.threads, 2);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_TRUE(c.emit_plots);
  EXPECT_THROW(apply_overrides(c, ConfigOverrides{std::nullopt, -1, std::nullopt, false}), ConfigError);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(EmitResults, AllFilesWithGoldenHeaders) {
  const fs::path out = scratch("emit");
  const RunConfig config = tiny_config(out);
  const CampaignSummary s = run_campaign(config.spec);
  const auto written = emit_results(s, config);
  const std::map<std::string, std::string> headers{
      {"mean.csv", "n,t,mean,se,theory"},
      {"cov.csv", "n,t1,t2,cov_hat,se,theory"},
      {"residual.csv",
       "n,mean_batch,residual_batch,scale,median_raw,median_raw_se,p95_raw,p95_raw_se,median_scaled,"
       "median_scaled_se,p95_scaled,p95_scaled_se"},
      {"tightness.csv", "n,r,s,t,lhs,se,bound,intermediate_bound"},
      {"bounds.csv",
       "n,replicates,excluded,k_max,norm_threshold,norm_sup_mean,norm_sup_se,norm_exceed_rate,norm_exceed_se,"
       "a2_exceed_rate,a2_exceed_se,h2_mean,h2_se,h2_theory"},
      {"spacing.csv", "n,x,prob,se"},
      {"normality.csv", "n,t,skew,skew_se,excess_kurtosis,excess_kurtosis_se"},
      {"lagcorr.csv", "n,lag,pairs,corr,se,theory"},
  };
  for (const auto& [file, header] : headers) {
    ASSERT_TRUE(fs::exists(out / file)) << file;
    EXPECT_EQ(first_line(read_file(out / file)), header) << file;
  }
  ASSERT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_EQ(written.size(), headers.size() + 1);
  const std::string summary = read_file(out / "summary.json");
  for (const char* key : {"\"version\"", "\"seed\"", "\"config\"", "\"exclusions\"", "\"verdicts\""})
    EXPECT_NE(summary.find(key), std::string::npos) << key;
  // One n, one grid point: a single covariance row.
  EXPECT_EQ(line_count(read_file(out / "cov.csv")), 2u);
  EXPECT_FALSE(fs::exists(out / "plots"));
}

TEST(EmitResults, CovRowCountAndPlots) {
  const fs::path out = scratch("cov");
  RunConfig config = tiny_config(out);
  config.spec.n_list = {3, 4};
  config.spec.grid = TimeGrid({0.0, 0.25, 0.5, 1.0}, 1.0);
  config.spec.checks = {Check::kMean, Check::kFcltCov};
  config.emit_plots = true;
  emit_results(run_campaign(config.spec), config);
  EXPECT_EQ(line_count(read_file(out / "cov.csv")), 1u + 2u * 4u * 5u / 2u);
  EXPECT_EQ(line_count(read_file(out / "mean.csv")), 1u + 2u * 4u);
  EXPECT_TRUE(fs::exists(out / "plots" / "mean_n3.svg"));
  EXPECT_TRUE(fs::exists(out / "plots" / "cov_n4.svg"));
}

TEST(EmitResults, RerunIsByteIdentical) {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  RunConfig ca = tiny_config(a);
  ca.spec.replicates = 6;
  RunConfig cb = ca;
  cb.output_dir = b.string();
  cb.spec.threads = 2;
  emit_results(run_campaign(ca.spec), ca);
  emit_results(run_campaign(cb.spec), cb);
  for (const auto& entry : fs::directory_iterator(a))
    EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename())) << entry.path();
}

TEST(EmitResults, IoErrorNamesThePath) {
  const fs::path blocker = scratch("blocker");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  try {
    write_text_file(blocker / "sub" / "x.csv", "data");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("blocker"), std::string::npos) << e.what();
  }
  fs::remove(blocker);
}

TEST(TheoryCsv, Columns) {
  const EdgeParams p(1.0, 1.0, 0.2, 2.0);
  const std::string csv = theory_csv(p, 100, TimeGrid({0.0, 1.0}, 2.0));
  EXPECT_EQ(first_line(csv), "t,p,q,mean_expansion,var_limit,cov_to_t0");
  EXPECT_EQ(line_count(csv), 3u);
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  const double p0 = edge_prob(p, 0.0);
  EXPECT_NEAR(p0, 0.2, 1e-15);
  EXPECT_EQ(line, "0," + format_double(p0) + "," + format_double(p0 / (1.0 - p0)) + "," + format_double(mean_expansion(p, 100, 0.0)) + "," +
                      format_double(limit_cov(p, 0.0, 0.0)) + "," + format_double(limit_cov(p, 0.0, 0.0)));
}

TEST(Snapshots, FilesAndHeaders) {
  const fs::path out = scratch("snap");
  const EdgeParams p(1.0, 1.0, 0.5, 1.0);
  const GraphTrajectory g = sample_graph(5, p, 3, 0);
  const TimeGrid grid({0.0, 0.5, 1.0}, 1.0);
  write_snapshots(g, grid, eig_path(g, grid, SpectralConfig{}), out);
  const std::string jumps = read_file(out / "jumps.csv");
  EXPECT_EQ(first_line(jumps), "time,edge,i,j");
  EXPECT_EQ(line_count(jumps), 1u + g.total_jumps());
  EXPECT_EQ(first_line(read_file(out / "adjacency.csv")), "t,row,col,value");
  const std::string eigen = read_file(out / "eigen.csv");
  EXPECT_EQ(first_line(eigen), "t,mu,mu_star,residual,iters");
  EXPECT_EQ(line_count(eigen), 4u);
}

#ifdef DYNER_CLI_PATH
namespace {
int run_cli(const std::string& args) {
  const int status = std::system((std::string(DYNER_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "ok.json") << R"({"n":[4],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":1,"grid":[0,0.5,1],
    "replicates":2})";
  std::ofstream(dir / "bad.json") << R"({"n":[4],"lambda_on":1,"lambda_off":1,"p0":1.5,"T":1,"grid":[0]})";
  const std::string ok = "--config " + (dir / "ok.json").string() + " --out " + (dir / "o").string();
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("verify-mean"), 2);
  EXPECT_EQ(run_cli("verify-mean --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("verify-mean --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("verify-mean " + ok + " --threads -1"), 2);
  EXPECT_EQ(run_cli("theory " + ok), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "theory.csv"));
  EXPECT_EQ(run_cli("simulate " + ok + " --seed 5"), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "eigen.csv"));
  const int verdict = run_cli("verify-tightness " + ok + " --threads 1");
  EXPECT_TRUE(verdict == 0 || verdict == 1);
  EXPECT_TRUE(fs::exists(dir / "o" / "tightness.csv"));
}
#endif
