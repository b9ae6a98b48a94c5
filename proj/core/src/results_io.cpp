#include "dyner/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "dyner/errors.hpp"
#include "dyner/theory.hpp"
#include "dyner/version.hpp"
#include "svg_plot.hpp"

namespace dyner {

namespace {

using nlohmann::json;

class Csv {
 public:
  explicit Csv(const char* header) { out_ << header << '\n'; }

  Csv& field(double v) { return raw(format_double(v)); }
  Csv& field(int v) { return raw(std::to_string(v)); }
  Csv& field(std::size_t v) { return raw(std::to_string(v)); }
  Csv& end() {
    out_ << '\n';
    first_ = true;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  Csv& raw(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  std::ostringstream out_;
  bool first_ = true;
};

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string mean_csv(const CampaignSummary& s) {
  Csv csv("n,t,mean,se,theory");
  for (const MeanRow& r : s.mean) csv.field(r.n).field(r.t).field(r.mean.value).field(r.mean.se).field(r.theory).end();
  return csv.str();
}

std::string cov_csv(const CampaignSummary& s) {
  Csv csv("n,t1,t2,cov_hat,se,theory");
  for (const CovRow& r : s.cov) csv.field(r.n).field(r.t1).field(r.t2).field(r.cov_hat).field(r.se).field(r.theory).end();
  return csv.str();
}

std::string residual_csv(const CampaignSummary& s) {
  Csv csv(
      "n,mean_batch,residual_batch,scale,median_raw,median_raw_se,p95_raw,p95_raw_se,"
      "median_scaled,median_scaled_se,p95_scaled,p95_scaled_se");
  for (const ResidualRow& r : s.residual)
    csv.field(r.n).field(r.mean_batch).field(r.residual_batch).field(r.scale)
        .field(r.median_raw.value).field(r.median_raw.se).field(r.p95_raw.value).field(r.p95_raw.se)
        .field(r.median_scaled.value).field(r.median_scaled.se).field(r.p95_scaled.value).field(r.p95_scaled.se)
        .end();
  return csv.str();
}

std::string tightness_csv(const CampaignSummary& s) {
  Csv csv("n,r,s,t,lhs,se,bound,intermediate_bound");
  for (const TightnessRow& r : s.tightness)
    csv.field(r.n).field(r.r).field(r.s).field(r.t).field(r.lhs.value).field(r.lhs.se).field(r.bound)
        .field(r.intermediate_bound).end();
  return csv.str();
}

std::string bounds_csv(const CampaignSummary& s) {
  Csv csv(
      "n,replicates,excluded,k_max,norm_threshold,norm_sup_mean,norm_sup_se,norm_exceed_rate,norm_exceed_se,"
      "a2_exceed_rate,a2_exceed_se,h2_mean,h2_se,h2_theory");
  for (const BoundsRow& r : s.bounds)
    csv.field(r.n).field(r.replicates).field(r.excluded).field(r.k_max).field(r.norm_threshold)
        .field(r.norm_sup_mean.value).field(r.norm_sup_mean.se).field(r.norm_exceed_rate.value)
        .field(r.norm_exceed_rate.se).field(r.a2_exceed_rate.value).field(r.a2_exceed_rate.se)
        .field(r.h2_mean.value).field(r.h2_mean.se).field(r.h2_theory).end();
  return csv.str();
}

std::string spacing_csv(const CampaignSummary& s) {
  Csv csv("n,x,prob,se");
  for (const SpacingRow& r : s.spacing) csv.field(r.n).field(r.x).field(r.prob.value).field(r.prob.se).end();
  return csv.str();
}

std::string normality_csv(const CampaignSummary& s) {
  Csv csv("n,t,skew,skew_se,excess_kurtosis,excess_kurtosis_se");
  for (const NormalityRow& r : s.normality)
    csv.field(r.n).field(r.t).field(r.skew.value).field(r.skew.se).field(r.excess_kurtosis.value)
        .field(r.excess_kurtosis.se).end();
  return csv.str();
}

std::string lagcorr_csv(const CampaignSummary& s) {
  Csv csv("n,lag,pairs,corr,se,theory");
  for (const LagCorrRow& r : s.lag_corr)
    csv.field(r.n).field(r.lag).field(r.pairs).field(r.corr.value).field(r.corr.se).field(r.theory).end();
  return csv.str();
}

std::string summary_json(const CampaignSummary& s, const RunConfig& config) {
  json doc;
  doc["version"] = version_string();
  doc["seed"] = config.spec.seed;
  doc["config"] = json::parse(config_to_json(config, false));
  doc["all_passed"] = s.all_passed();

  json verdicts = json::array();
  for (const CheckVerdict& v : s.verdicts)
    verdicts.push_back({{"check", std::string(to_string(v.check))},
                        {"evaluated", v.evaluated},
                        {"passed", v.passed},
                        {"detail", v.detail}});
  doc["verdicts"] = verdicts;

  json mean = json::array();
  json exclusions = json::array();
  for (const MeanRow& r : s.mean) {
    mean.push_back({{"n", r.n},
                    {"t", r.t},
                    {"mean", estimate_json(r.mean)},
                    {"theory", r.theory},
                    {"cv_mean", estimate_json(r.cv_mean)},
                    {"included", r.included},
                    {"excluded", r.excluded}});
    exclusions.push_back({{"n", r.n}, {"t", r.t}, {"included", r.included}, {"excluded", r.excluded}});
  }
  doc["mean"] = mean;
  doc["exclusions"] = exclusions;

  json trend = json::array();
  for (const TrendRow& r : s.mean_trend) trend.push_back({{"n", r.n}, {"median_abs_dev", r.median_abs_dev}});
  doc["mean_trend"] = trend;

  json cov = json::array();
  for (const CovRow& r : s.cov)
    cov.push_back({{"n", r.n}, {"t1", r.t1}, {"t2", r.t2}, {"cov_hat", r.cov_hat}, {"se", r.se}, {"theory", r.theory}});
  doc["cov"] = cov;

  json lag = json::array();
  for (const LagCorrRow& r : s.lag_corr)
    lag.push_back({{"n", r.n}, {"lag", r.lag}, {"pairs", r.pairs}, {"corr", estimate_json(r.corr)}, {"theory", r.theory}});
  doc["lag_corr"] = lag;

  json normality = json::array();
  for (const NormalityRow& r : s.normality)
    normality.push_back({{"n", r.n},
                         {"t", r.t},
                         {"skew", estimate_json(r.skew)},
                         {"excess_kurtosis", estimate_json(r.excess_kurtosis)}});
  doc["normality"] = normality;

  json residual = json::array();
  for (const ResidualRow& r : s.residual)
    residual.push_back({{"n", r.n},
                        {"mean_batch", r.mean_batch},
                        {"residual_batch", r.residual_batch},
                        {"scale", r.scale},
                        {"median_raw", estimate_json(r.median_raw)},
                        {"p95_raw", estimate_json(r.p95_raw)},
                        {"median_scaled", estimate_json(r.median_scaled)},
                        {"p95_scaled", estimate_json(r.p95_scaled)}});
  doc["residual"] = residual;
  doc["residual_trend"] = {{"mann_kendall_s", s.residual_trend.s},
                           {"p_two_sided", s.residual_trend.p_two_sided},
                           {"p_increasing", s.residual_trend.p_increasing}};

  json tight = json::array();
  for (const TightnessRow& r : s.tightness)
    tight.push_back({{"n", r.n},
                     {"r", r.r},
                     {"s", r.s},
                     {"t", r.t},
                     {"lhs", estimate_json(r.lhs)},
                     {"bound", r.bound},
                     {"intermediate_bound", r.intermediate_bound}});
  doc["tightness"] = tight;

  json bounds = json::array();
  for (const BoundsRow& r : s.bounds)
    bounds.push_back({{"n", r.n},
                      {"replicates", r.replicates},
                      {"excluded", r.excluded},
                      {"k_max", r.k_max},
                      {"norm_threshold", r.norm_threshold},
                      {"norm_sup_mean", estimate_json(r.norm_sup_mean)},
                      {"norm_exceed_rate", estimate_json(r.norm_exceed_rate)},
                      {"a2_exceed_rate", estimate_json(r.a2_exceed_rate)},
                      {"h2_mean", estimate_json(r.h2_mean)},
                      {"h2_theory", r.h2_theory}});
  doc["bounds"] = bounds;

  json spacing = json::array();
  for (const SpacingRow& r : s.spacing) spacing.push_back({{"n", r.n}, {"x", r.x}, {"prob", estimate_json(r.prob)}});
  doc["spacing"] = spacing;
  json fits = json::array();
  for (const SpacingFit& f : s.spacing_fit)
    fits.push_back({{"n", f.n}, {"slope", f.fit.slope}, {"intercept", f.fit.intercept}, {"r_squared", f.fit.r_squared}});
  doc["spacing_fit"] = fits;

  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::filesystem::path> emit_plots(const CampaignSummary& s, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  std::map<int, std::vector<const MeanRow*>> by_n;
  for (const MeanRow& r : s.mean) by_n[r.n].push_back(&r);
  for (const auto& [n, rows] : by_n) {
    plot::Series est{"estimate +/- 3 se", "#1f77b4", {}, {}, {}, {}};
    plot::Series theory{"N p + (1 - p)", "#d62728", {}, {}, {}, {}};
    for (const MeanRow* r : rows) {
      est.x.push_back(r->t);
      est.y.push_back(r->mean.value);
      est.lo.push_back(r->mean.value - 3.0 * r->mean.se);
      est.hi.push_back(r->mean.value + 3.0 * r->mean.se);
      theory.x.push_back(r->t);
      theory.y.push_back(r->theory);
    }
    const auto path = dir / "plots" / ("mean_n" + std::to_string(n) + ".svg");
    write_text_file(path, plot::line_chart("Mean principal eigenvalue, N = " + std::to_string(n), "t", "mu",
                                           {est, theory}));
    written.push_back(path);
  }

  std::map<int, std::vector<const CovRow*>> cov_by_n;
  for (const CovRow& r : s.cov)
    if (r.t1 == s.spec.grid[0]) cov_by_n[r.n].push_back(&r);
  for (const auto& [n, rows] : cov_by_n) {
    plot::Series est{"estimate +/- 3 se", "#1f77b4", {}, {}, {}, {}};
    plot::Series theory{"limit covariance", "#d62728", {}, {}, {}, {}};
    for (const CovRow* r : rows) {
      est.x.push_back(r->t2);
      est.y.push_back(r->cov_hat);
      est.lo.push_back(r->cov_hat - 3.0 * r->se);
      est.hi.push_back(r->cov_hat + 3.0 * r->se);
      theory.x.push_back(r->t2);
      theory.y.push_back(r->theory);
    }
    const auto path = dir / "plots" / ("cov_n" + std::to_string(n) + ".svg");
    write_text_file(path, plot::line_chart("Cov(mu(t0), mu(t)), N = " + std::to_string(n), "t", "covariance",
                                           {est, theory}));
    written.push_back(path);
  }
  return written;
}

}  // namespace

std::vector<std::filesystem::path> emit_results(const CampaignSummary& s, const RunConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  const std::vector<std::pair<const char*, std::string>> files{
      {"summary.json", summary_json(s, config)}, {"mean.csv", mean_csv(s)},
      {"cov.csv", cov_csv(s)},                   {"residual.csv", residual_csv(s)},
      {"tightness.csv", tightness_csv(s)},       {"bounds.csv", bounds_csv(s)},
      {"spacing.csv", spacing_csv(s)},           {"normality.csv", normality_csv(s)},
      {"lagcorr.csv", lagcorr_csv(s)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    write_text_file(dir / name, content);
    written.push_back(dir / name);
  }
  if (config.emit_plots) {
    auto plots = emit_plots(s, dir);
    written.insert(written.end(), plots.begin(), plots.end());
  }
  return written;
}

std::string theory_csv(const EdgeParams& params, int n, const TimeGrid& grid) {
  Csv csv("t,p,q,mean_expansion,var_limit,cov_to_t0");
  const TheoryCurves curves(params);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid[j];
    csv.field(t).field(curves.p(t)).field(curves.q(t)).field(mean_expansion(params, n, t))
        .field(limit_cov(params, t, t)).field(limit_cov(params, grid[0], t)).end();
  }
  return csv.str();
}

std::vector<std::filesystem::path> write_snapshots(const GraphTrajectory& traj, const TimeGrid& grid,
                                                   const std::vector<SpectralResult>& path,
                                                   const std::filesystem::path& dir) {
  // Edge index -> (i, j) in the trajectory's row-major upper-triangle order.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < traj.n(); ++i)
    for (int j = traj.self_loops() ? i : i + 1; j < traj.n(); ++j) pairs.emplace_back(i, j);

  Csv jumps("time,edge,i,j");
  for (const JumpEvent& e : traj.sorted_events())
    jumps.field(e.time).field(e.edge).field(pairs[e.edge].first).field(pairs[e.edge].second).end();

  Csv adjacency("t,row,col,value");
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (traj.state_at(pairs[e].first, pairs[e].second, grid[k]) == EdgeState::kPresent)
        adjacency.field(grid[k]).field(pairs[e].first).field(pairs[e].second).field(1).end();

  Csv eigen("t,mu,mu_star,residual,iters");
  for (const SpectralResult& r : path)
    eigen.field(r.t).field(r.mu).field(mu_star(r, traj.params(), r.t)).field(r.residual).field(r.iters).end();

  const std::vector<std::pair<std::filesystem::path, std::string>> files{
      {dir / "jumps.csv", jumps.str()}, {dir / "adjacency.csv", adjacency.str()}, {dir / "eigen.csv", eigen.str()}};
  std::vector<std::filesystem::path> written;
  for (const auto& [p, content] : files) {
    write_text_file(p, content);
    written.push_back(p);
  }
  return written;
}

}  // namespace dyner
