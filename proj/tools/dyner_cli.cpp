#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dyner/config.hpp"
#include "dyner/errors.hpp"
#include "dyner/experiments.hpp"
#include "dyner/results_io.hpp"
#include "dyner/spectral.hpp"
#include "dyner/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

int run_checks(dyner::RunConfig config, const std::optional<std::set<dyner::Check>>& checks) {
  if (checks) config.spec.checks = *checks;
  const dyner::CampaignSummary summary = dyner::run_campaign(config.spec);
  dyner::emit_results(summary, config);
  for (const dyner::CheckVerdict& v : summary.verdicts) {
    const char* status = !v.evaluated ? "SKIP" : v.passed ? "PASS" : "FAIL";
    std::printf("%s %s: %s\n", status, std::string(dyner::to_string(v.check)).c_str(), v.detail.c_str());
  }
  std::printf("results written to %s\n", config.output_dir.c_str());
  return summary.all_passed() ? kOk : kCheckFailed;
}

int run_simulate(const dyner::RunConfig& config) {
  const dyner::CampaignSpec& spec = config.spec;
  const int n = spec.n_list.front();
  const dyner::GraphTrajectory traj = dyner::sample_graph(n, spec.params, spec.seed, 0, spec.self_loops);
  const auto path = dyner::eig_path(traj, spec.grid, spec.spectral);
  dyner::write_snapshots(traj, spec.grid, path, config.output_dir);
  std::printf("n=%d edges=%zu jumps=%zu written to %s\n", n, traj.num_edges(), traj.total_jumps(),
              config.output_dir.c_str());
  return kOk;
}

int run_theory(const dyner::RunConfig& config) {
  const auto file = std::filesystem::path(config.output_dir) / "theory.csv";
  dyner::write_text_file(file, dyner::theory_csv(config.spec.params, config.spec.n_list.front(), config.spec.grid));
  std::printf("written %s\n", file.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal-eigenvalue process of dynamic Erdos-Renyi graphs"};
  app.set_version_flag("--version", std::string(dyner::version_string()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  bool plots = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--plots", plots, "also write plots/*.svg");

  auto* simulate = app.add_subcommand("simulate", "dump one trajectory's jumps, snapshots and eigenvalues");
  auto* theory = app.add_subcommand("theory", "dump theory curves on the grid");
  auto* verify_mean = app.add_subcommand("verify-mean", "mean expansion check");
  auto* verify_fclt = app.add_subcommand("verify-fclt", "covariance and normality checks");
  auto* verify_repr = app.add_subcommand("verify-representation", "split-sample representation residual");
  auto* verify_bounds = app.add_subcommand("verify-bounds", "high-probability bounds and jump spacing");
  auto* verify_tight = app.add_subcommand("verify-tightness", "tightness moment bound");
  auto* all = app.add_subcommand("all", "every check listed in the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (config_path.empty()) throw dyner::ConfigError("--config is required");
    dyner::RunConfig config = dyner::load_config(config_path);
    dyner::apply_overrides(config, {seed, threads, out_dir, plots});

    using dyner::Check;
    if (simulate->parsed()) return run_simulate(config);
    if (theory->parsed()) return run_theory(config);
    if (verify_mean->parsed()) return run_checks(config, std::set<Check>{Check::kMean});
    if (verify_fclt->parsed()) return run_checks(config, std::set<Check>{Check::kFcltCov, Check::kNormality});
    if (verify_repr->parsed()) return run_checks(config, std::set<Check>{Check::kRepresentation});
    if (verify_bounds->parsed()) return run_checks(config, std::set<Check>{Check::kBounds});
    if (verify_tight->parsed()) return run_checks(config, std::set<Check>{Check::kTightness});
    if (all->parsed()) return run_checks(config, std::nullopt);
  } catch (const dyner::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const dyner::DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const dyner::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kUsage;
  } catch (const dyner::ConvergenceError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kCheckFailed;
  }
  return kUsage;
}
