#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dyner/random.hpp"

namespace dyner {

enum class EdgeState : std::uint8_t { kAbsent = 0, kPresent = 1 };

inline EdgeState flipped(EdgeState s) noexcept {
  return s == EdgeState::kPresent ? EdgeState::kAbsent : EdgeState::kPresent;
}
inline int as_int(EdgeState s) noexcept { return static_cast<int>(s); }

/// Rates and initial law of one on/off edge, plus the simulation horizon.
///
/// A present edge stays present for an Exp(lambda_on) time; an absent edge
/// stays absent for an Exp(lambda_off) time. Construction validates
/// lambda_on > 0, lambda_off > 0, 0 < p0 < 1 and horizon > 0.
class EdgeParams {
 public:
  EdgeParams(double lambda_on, double lambda_off, double p0, double horizon);

  double lambda_on() const noexcept { return lambda_on_; }
  double lambda_off() const noexcept { return lambda_off_; }
  double p0() const noexcept { return p0_; }
  double horizon() const noexcept { return horizon_; }

  /// Stationary presence probability lambda_off / (lambda_on + lambda_off).
  double rho() const noexcept { return lambda_off_ / (lambda_on_ + lambda_off_); }
  double kappa() const noexcept { return lambda_on_ > lambda_off_ ? lambda_on_ : lambda_off_; }
  /// lambda_on + lambda_off, the relaxation rate of every moment.
  double total_rate() const noexcept { return lambda_on_ + lambda_off_; }

  /// Holding rate in state s (rate of leaving s).
  double leave_rate(EdgeState s) const noexcept {
    return s == EdgeState::kPresent ? lambda_on_ : lambda_off_;
  }

  bool operator==(const EdgeParams&) const = default;

 private:
  double lambda_on_;
  double lambda_off_;
  double p0_;
  double horizon_;
};

/// One edge's trajectory on [0, horizon]: the state at 0 and the ordered jump
/// times. The state is right-continuous: it has already changed AT a jump time.
class EdgePath {
 public:
  /// Throws DomainError unless jump times are strictly increasing in (0, horizon].
  EdgePath(EdgeState initial_state, std::vector<double> jump_times, double horizon);

  EdgeState initial_state() const noexcept { return initial_; }
  std::span<const double> jump_times() const noexcept { return jumps_; }
  double horizon() const noexcept { return horizon_; }

  /// initial_state XOR parity(#jumps <= t). O(log #jumps).
  EdgeState state_at(double t) const;

  /// Number of jumps in the half-open window (t1, t2].
  std::size_t flip_count(double t1, double t2) const;

 private:
  EdgeState initial_;
  std::vector<double> jumps_;
  double horizon_;
};

/// Exact simulation: initial state ~ Bernoulli(p0), alternating exponential
/// holding times by inversion, truncated at the horizon.
EdgePath sample_edge_path(const EdgeParams& params, Stream& rng);

/// Streaming variant of sample_edge_path: calls visit(start, end, closed) for
/// each maximal interval on which the edge is present. The interval is
/// [start, end), or [start, end] when closed is true (still present at the
/// horizon). Consumes exactly the same draws as sample_edge_path.
template <typename Visitor>
void for_each_present_interval(const EdgeParams& params, Stream& rng, Visitor&& visit);

/// P(state at time t = to | state at 0 = from).
double transition_prob(const EdgeParams& params, EdgeState from, EdgeState to, double t);

/// Marginal presence probability p(t).
double edge_prob(const EdgeParams& params, double t);

/// Cov(a(t1), a(t2)) for t1 <= t2.
double edge_cov(const EdgeParams& params, double t1, double t2);

/// Probability that an edge starting in `start_state` flips at least twice in
/// a window of length x (the hypoexponential CDF of two holding times).
double two_flip_prob(const EdgeParams& params, EdgeState start_state, double x);

// ---------------------------------------------------------------------------

template <typename Visitor>
void for_each_present_interval(const EdgeParams& params, Stream& rng, Visitor&& visit) {
  const double horizon = params.horizon();
  EdgeState state = rng.bernoulli(params.p0()) ? EdgeState::kPresent : EdgeState::kAbsent;
  double now = 0.0;
  while (true) {
    double next = now + rng.exponential(params.leave_rate(state));
    if (!(next > now)) next = std::nextafter(now, horizon + 1.0);
    if (next > horizon) {
      if (state == EdgeState::kPresent) visit(now, horizon, true);
      return;
    }
    if (state == EdgeState::kPresent) visit(now, next, false);
    now = next;
    state = flipped(state);
  }
}

}  // namespace dyner
