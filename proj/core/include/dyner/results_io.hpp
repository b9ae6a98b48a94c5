#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dyner/config.hpp"
#include "dyner/experiments.hpp"
#include "dyner/graph_sim.hpp"
#include "dyner/spectral.hpp"

namespace dyner {

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

// CSV tables, header row first. Column orders are part of the file format.
std::string mean_csv(const CampaignSummary& s);       // n,t,mean,se,theory
std::string cov_csv(const CampaignSummary& s);        // n,t1,t2,cov_hat,se,theory
std::string residual_csv(const CampaignSummary& s);
std::string tightness_csv(const CampaignSummary& s);
std::string bounds_csv(const CampaignSummary& s);
std::string spacing_csv(const CampaignSummary& s);
std::string normality_csv(const CampaignSummary& s);
std::string lagcorr_csv(const CampaignSummary& s);

/// Full summary: version string, seed, config echo (without runtime fields),
/// verdicts, exclusion counts and every table.
std::string summary_json(const CampaignSummary& s, const RunConfig& config);

/// Writes summary.json and every CSV (always, with headers even when empty)
/// into config.output_dir, plus plots/*.svg when config.emit_plots. Returns
/// the written paths. Throws IoError naming the path on failure.
std::vector<std::filesystem::path> emit_results(const CampaignSummary& s, const RunConfig& config);

/// t,p,q,mean_expansion,var_limit,cov_to_t0 for each grid point at size n.
std::string theory_csv(const EdgeParams& params, int n, const TimeGrid& grid);

/// One trajectory: jumps.csv (time,edge,i,j), adjacency.csv (t,row,col,value
/// for present entries, upper triangle) and eigen.csv (t,mu,mu_star,residual,iters).
std::vector<std::filesystem::path> write_snapshots(const GraphTrajectory& traj, const TimeGrid& grid,
                                                   const std::vector<SpectralResult>& path,
                                                   const std::filesystem::path& dir);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace dyner
