#include "dyner/edge_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyner/errors.hpp"

namespace dyner {

EdgeParams::EdgeParams(double lambda_on, double lambda_off, double p0, double horizon)
    : lambda_on_(lambda_on), lambda_off_(lambda_off), p0_(p0), horizon_(horizon) {
  if (!(lambda_on > 0.0) || !std::isfinite(lambda_on))
    throw DomainError("lambda_on must be a finite rate > 0");
  if (!(lambda_off > 0.0) || !std::isfinite(lambda_off))
    throw DomainError("lambda_off must be a finite rate > 0");
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0,1)");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw DomainError("horizon T must be a finite time > 0");
}

EdgePath::EdgePath(EdgeState initial_state, std::vector<double> jump_times, double horizon)
    : initial_(initial_state), jumps_(std::move(jump_times)), horizon_(horizon) {
  if (!(horizon > 0.0)) throw DomainError("EdgePath: horizon must be > 0");
  double prev = 0.0;
  for (double t : jumps_) {
    if (!(t > prev) || t > horizon)
      throw DomainError("EdgePath: jump times must be strictly increasing in (0, T]");
    prev = t;
  }
}

EdgeState EdgePath::state_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw DomainError("state_at: t=" + std::to_string(t) + " outside [0, T]");
  const auto jumps_le_t = std::upper_bound(jumps_.begin(), jumps_.end(), t) - jumps_.begin();
  return (jumps_le_t % 2 == 0) ? initial_ : flipped(initial_);
}

std::size_t EdgePath::flip_count(double t1, double t2) const {
  if (t1 > t2) throw DomainError("flip_count: t1 > t2");
  if (t1 < 0.0 || t2 > horizon_) throw DomainError("flip_count: window outside [0, T]");
  const auto lo = std::upper_bound(jumps_.begin(), jumps_.end(), t1);
  const auto hi = std::upper_bound(jumps_.begin(), jumps_.end(), t2);
  return static_cast<std::size_t>(hi - lo);
}

EdgePath sample_edge_path(const EdgeParams& params, Stream& rng) {
  const double horizon = params.horizon();
  const EdgeState initial = rng.bernoulli(params.p0()) ? EdgeState::kPresent : EdgeState::kAbsent;
  std::vector<double> jumps;
  EdgeState state = initial;
  double now = 0.0;
  while (true) {
    double next = now + rng.exponential(params.leave_rate(state));
    if (!(next > now)) next = std::nextafter(now, horizon + 1.0);
    if (next > horizon) break;
    jumps.push_back(next);
    now = next;
    state = flipped(state);
  }
  return EdgePath(initial, std::move(jumps), horizon);
}

namespace {

void require_nonnegative(double t, const char* op) {
  if (!(t >= 0.0)) throw DomainError(std::string(op) + ": time must be >= 0");
}

}  // namespace

double transition_prob(const EdgeParams& params, EdgeState from, EdgeState to, double t) {
  require_nonnegative(t, "transition_prob");
  const double rho = params.rho();
  const double decay = std::exp(-params.total_rate() * t);
  const double to_present = (from == EdgeState::kPresent) ? rho + (1.0 - rho) * decay
                                                          : rho - rho * decay;
  return to == EdgeState::kPresent ? to_present : 1.0 - to_present;
}

double edge_prob(const EdgeParams& params, double t) {
  require_nonnegative(t, "edge_prob");
  const double rho = params.rho();
  const double p0 = params.p0();
  return rho + ((1.0 - rho) * p0 - rho * (1.0 - p0)) * std::exp(-params.total_rate() * t);
}

double edge_cov(const EdgeParams& params, double t1, double t2) {
  require_nonnegative(t1, "edge_cov");
  if (t1 > t2) throw DomainError("edge_cov: requires t1 <= t2");
  const double p = edge_prob(params, t1);
  return p * (1.0 - p) * std::exp(-params.total_rate() * (t2 - t1));
}

double two_flip_prob(const EdgeParams& params, EdgeState start_state, double x) {
  require_nonnegative(x, "two_flip_prob");
  // First holding time leaves start_state, the second leaves the other state.
  const double a = params.leave_rate(start_state);
  const double b = params.leave_rate(flipped(start_state));
  if (std::abs(a - b) < 1e-9 * params.kappa()) {
    const double lx = a * x;
    return -std::expm1(-lx) - lx * std::exp(-lx);
  }
  // (e^{-bx} - e^{-ax}) / (a - b) = e^{-bx} (1 - e^{-(a-b)x}) / (a - b), free of cancellation.
  const double quotient = std::exp(-b * x) * (-std::expm1(-(a - b) * x)) / (a - b);
  return -std::expm1(-a * x) - a * quotient;
}

}  // namespace dyner
