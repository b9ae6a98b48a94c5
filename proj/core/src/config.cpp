#include "dyner/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "dyner/errors.hpp"

namespace dyner {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "n",           "lambda_on",        "lambda_off",        "p0",          "T",
      "grid",        "replicates",       "seed",              "checks",      "self_loops",
      "rel_tol",     "max_iters",        "warm_start",        "threads",     "output_dir",
      "emit_plots",  "tightness_batch",  "tightness_triples", "norm_rel_tol", "spacing_n",
      "spacing_x",   "spacing_replicates"};
  return keys;
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

const json& required(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) fail(key, "required key missing");
  return *it;
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(key, "expected an integer");
}

int as_int32(const json& v, const std::string& key) {
  const long long x = as_int(v, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "integer out of range");
  return static_cast<int>(x);
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::vector<double> as_double_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) return {as_double(v, key)};
  if (!v.is_array()) fail(key, "expected a number or an array of numbers");
  for (const json& e : v) out.push_back(as_double(e, key));
  return out;
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
  if (v.is_number()) return {as_int32(v, key)};
  if (!v.is_array()) fail(key, "expected an integer or an array of integers");
  std::vector<int> out;
  for (const json& e : v) out.push_back(as_int32(e, key));
  return out;
}

template <typename T, typename F>
T or_default(const json& doc, const std::string& key, T fallback, F convert) {
  auto it = doc.find(key);
  return it == doc.end() ? fallback : convert(*it, key);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known_keys().contains(key)) fail(key, "unknown key");

  const double lambda_on = as_double(required(doc, "lambda_on"), "lambda_on");
  const double lambda_off = as_double(required(doc, "lambda_off"), "lambda_off");
  const double p0 = as_double(required(doc, "p0"), "p0");
  const double horizon = as_double(required(doc, "T"), "T");
  std::optional<EdgeParams> params;
  try {
    params.emplace(lambda_on, lambda_off, p0, horizon);
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    const std::string key = msg.rfind("lambda_on", 0) == 0    ? "lambda_on"
                            : msg.rfind("lambda_off", 0) == 0 ? "lambda_off"
                            : msg.rfind("p0", 0) == 0         ? "p0"
                                                              : "T";
    fail(key, msg);
  }

  std::optional<TimeGrid> grid;
  try {
    grid.emplace(as_double_list(required(doc, "grid"), "grid"), horizon);
  } catch (const DomainError& e) {
    fail("grid", e.what());
  }

  CampaignSpec spec{.n_list = as_int_list(required(doc, "n"), "n"), .params = *params, .grid = *grid};
  spec.replicates = or_default(doc, "replicates", spec.replicates, as_int32);
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail("seed", "expected an unsigned 64-bit integer");
    spec.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("checks"); it != doc.end()) {
    if (!it->is_array()) fail("checks", "expected an array of check names");
    spec.checks.clear();
    for (const json& e : *it) {
      if (!e.is_string()) fail("checks", "expected check names as strings");
      const auto check = parse_check(e.get<std::string>());
      if (!check) fail("checks", "unknown check '" + e.get<std::string>() + "'");
      spec.checks.insert(*check);
    }
  }
  spec.self_loops = or_default(doc, "self_loops", spec.self_loops, as_bool);
  spec.spectral.rel_tol = or_default(doc, "rel_tol", spec.spectral.rel_tol, as_double);
  spec.spectral.max_iters = or_default(doc, "max_iters", spec.spectral.max_iters, as_int32);
  spec.spectral.warm_start = or_default(doc, "warm_start", spec.spectral.warm_start, as_bool);
  spec.threads = or_default(doc, "threads", spec.threads, as_int32);
  spec.tightness.batch = or_default(doc, "tightness_batch", spec.replicates, as_int32);
  spec.tightness.triples = or_default(doc, "tightness_triples", spec.tightness.triples, as_int32);
  spec.bounds.norm_rel_tol = or_default(doc, "norm_rel_tol", spec.bounds.norm_rel_tol, as_double);
  spec.bounds.spacing_n = or_default(doc, "spacing_n", spec.bounds.spacing_n, as_int_list);
  spec.bounds.spacing_x = or_default(doc, "spacing_x", spec.bounds.spacing_x, as_double_list);
  spec.bounds.spacing_replicates =
      or_default(doc, "spacing_replicates", spec.bounds.spacing_replicates, as_int32);

  RunConfig config{spec};
  if (auto it = doc.find("output_dir"); it != doc.end()) {
    if (!it->is_string()) fail("output_dir", "expected a string");
    config.output_dir = it->get<std::string>();
  }
  config.emit_plots = or_default(doc, "emit_plots", config.emit_plots, as_bool);

  try {
    config.spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const RunConfig& config, bool runtime_fields) {
  const CampaignSpec& s = config.spec;
  json checks = json::array();
  for (Check c : s.checks) checks.push_back(std::string(to_string(c)));
  json doc{
      {"n", s.n_list},
      {"lambda_on", s.params.lambda_on()},
      {"lambda_off", s.params.lambda_off()},
      {"p0", s.params.p0()},
      {"T", s.params.horizon()},
      {"grid", std::vector<double>(s.grid.points().begin(), s.grid.points().end())},
      {"replicates", s.replicates},
      {"seed", s.seed},
      {"checks", checks},
      {"self_loops", s.self_loops},
      {"rel_tol", s.spectral.rel_tol},
      {"max_iters", s.spectral.max_iters},
      {"warm_start", s.spectral.warm_start},
      {"tightness_batch", s.tightness.batch},
      {"tightness_triples", s.tightness.triples},
      {"norm_rel_tol", s.bounds.norm_rel_tol},
      {"spacing_n", s.bounds.spacing_n},
      {"spacing_x", s.bounds.spacing_x},
      {"spacing_replicates", s.bounds.spacing_replicates},
      {"emit_plots", config.emit_plots},
  };
  if (runtime_fields) {
    doc["threads"] = s.threads;
    doc["output_dir"] = config.output_dir;
  }
  return doc.dump(2);
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
  if (overrides.seed) config.spec.seed = *overrides.seed;
  if (overrides.threads) {
    if (*overrides.threads < 0) throw ConfigError("--threads must be >= 0");
    config.spec.threads = *overrides.threads;
  }
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.plots) config.emit_plots = true;
}

}  // namespace dyner
