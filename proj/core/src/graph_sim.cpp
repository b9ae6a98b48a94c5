#include "dyner/graph_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyner/errors.hpp"

namespace dyner {

TimeGrid::TimeGrid(std::vector<double> points, double horizon)
    : points_(std::move(points)), horizon_(horizon) {
  if (points_.empty()) throw DomainError("TimeGrid: at least one point required");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double t = points_[i];
    if (!(t >= 0.0 && t <= horizon))
      throw DomainError("TimeGrid: point " + std::to_string(t) + " outside [0, T]");
    if (i > 0 && !(t > points_[i - 1]))
      throw DomainError("TimeGrid: points must be strictly increasing");
  }
}

CenteredMatrix::CenteredMatrix(Eigen::MatrixXd h, double t, double p)
    : h_(std::move(h)), t_(t), p_(p) {
  if (h_.rows() != h_.cols()) throw DomainError("CenteredMatrix: matrix must be square");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("CenteredMatrix: p(t) must lie in (0,1)");
}

CenteredMatrix CenteredMatrix::from_adjacency(const Eigen::MatrixXd& adjacency, double t, double p,
                                              bool self_loops) {
  const auto n = adjacency.rows();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("centered matrix: p(t) must lie in (0,1)");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  Eigen::MatrixXd h = (adjacency.array() - p) * scale;
  if (!self_loops) h.diagonal().setZero();
  return CenteredMatrix(std::move(h), t, p);
}

GraphTrajectory::GraphTrajectory(int n, EdgeParams params, bool self_loops)
    : n_(n), params_(params), self_loops_(self_loops) {
  if (n < 1) throw DomainError("graph needs n >= 1 vertices");
  row_offset_.resize(static_cast<std::size_t>(n) + 1);
  std::size_t offset = 0;
  for (int i = 0; i < n; ++i) {
    row_offset_[static_cast<std::size_t>(i)] = offset;
    offset += static_cast<std::size_t>(n - i - (self_loops ? 0 : 1));
  }
  row_offset_[static_cast<std::size_t>(n)] = offset;
  initial_.reserve(offset);
  jump_offset_.reserve(offset + 1);
  jump_offset_.push_back(0);
}

GraphTrajectory::GraphTrajectory(int n, EdgeParams params, std::span<const EdgePath> paths,
                                 bool self_loops)
    : GraphTrajectory(n, params, self_loops) {
  if (paths.size() != row_offset_.back())
    throw DomainError("GraphTrajectory: expected " + std::to_string(row_offset_.back()) +
                      " edge paths, got " + std::to_string(paths.size()));
  for (const EdgePath& path : paths) {
    if (path.horizon() != params_.horizon())
      throw DomainError("GraphTrajectory: path horizon differs from params.T");
    initial_.push_back(path.initial_state());
    jumps_.insert(jumps_.end(), path.jump_times().begin(), path.jump_times().end());
    jump_offset_.push_back(jumps_.size());
  }
}

std::size_t GraphTrajectory::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw DomainError("edge_index: vertex out of range");
  if (i == j && !self_loops_) throw DomainError("edge_index: self-loops are disabled");
  const int first_col = self_loops_ ? i : i + 1;
  return row_offset_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - first_col);
}

EdgePath GraphTrajectory::path(int i, int j) const {
  const std::size_t e = edge_index(i, j);
  std::vector<double> jumps(jumps_.begin() + static_cast<std::ptrdiff_t>(jump_offset_[e]),
                            jumps_.begin() + static_cast<std::ptrdiff_t>(jump_offset_[e + 1]));
  return EdgePath(initial_[e], std::move(jumps), params_.horizon());
}

void GraphTrajectory::check_time(double t) const {
  if (!(t >= 0.0 && t <= params_.horizon()))
    throw DomainError("snapshot time " + std::to_string(t) + " outside [0, T]");
}

EdgeState GraphTrajectory::state_of(std::size_t edge, double t) const {
  const auto first = jumps_.begin() + static_cast<std::ptrdiff_t>(jump_offset_[edge]);
  const auto last = jumps_.begin() + static_cast<std::ptrdiff_t>(jump_offset_[edge + 1]);
  const auto count = std::upper_bound(first, last, t) - first;
  return (count % 2 == 0) ? initial_[edge] : flipped(initial_[edge]);
}

EdgeState GraphTrajectory::state_at(int i, int j, double t) const {
  check_time(t);
  return state_of(edge_index(i, j), t);
}

Eigen::MatrixXd GraphTrajectory::adjacency_at(double t) const {
  check_time(t);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  std::size_t e = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = self_loops_ ? i : i + 1; j < n_; ++j, ++e) {
      if (state_of(e, t) == EdgeState::kPresent) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return a;
}

CenteredMatrix GraphTrajectory::centered_matrix_at(double t) const {
  return CenteredMatrix::from_adjacency(adjacency_at(t), t, edge_prob(params_, t), self_loops_);
}

std::int64_t GraphTrajectory::edge_double_sum(double t) const {
  check_time(t);
  std::int64_t total = 0;
  std::size_t e = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = self_loops_ ? i : i + 1; j < n_; ++j, ++e) {
      if (state_of(e, t) == EdgeState::kPresent) total += (i == j) ? 1 : 2;
    }
  }
  return total;
}

double GraphTrajectory::edge_sum_centered(double t) const {
  const double n = static_cast<double>(n_);
  const double cells = self_loops_ ? n * n : n * (n - 1.0);
  return (static_cast<double>(edge_double_sum(t)) - cells * edge_prob(params_, t)) / n;
}

std::vector<JumpEvent> GraphTrajectory::sorted_events() const {
  std::vector<JumpEvent> events;
  events.reserve(jumps_.size());
  for (std::size_t e = 0; e < initial_.size(); ++e)
    for (std::size_t k = jump_offset_[e]; k < jump_offset_[e + 1]; ++k)
      events.push_back({jumps_[k], e});
  std::stable_sort(events.begin(), events.end(), [](const JumpEvent& a, const JumpEvent& b) {
    return a.time < b.time || (a.time == b.time && a.edge < b.edge);
  });
  return events;
}

double GraphTrajectory::min_jump_spacing() const {
  std::vector<double> times = jumps_;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  double best = kNoSpacing;
  for (std::size_t k = 1; k < times.size(); ++k) best = std::min(best, times[k] - times[k - 1]);
  return best;
}

GraphTrajectory sample_graph(int n, const EdgeParams& params, std::uint64_t seed,
                             std::uint64_t replicate, bool self_loops) {
  GraphTrajectory traj(n, params, self_loops);
  const double horizon = params.horizon();
  for (int i = 0; i < n; ++i) {
    for (int j = self_loops ? i : i + 1; j < n; ++j) {
      Stream rng = edge_stream(seed, replicate, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j));
      // Same draw sequence as sample_edge_path, written straight into the flat table.
      const EdgeState initial =
          rng.bernoulli(params.p0()) ? EdgeState::kPresent : EdgeState::kAbsent;
      EdgeState state = initial;
      double now = 0.0;
      while (true) {
        double next = now + rng.exponential(params.leave_rate(state));
        if (!(next > now)) next = std::nextafter(now, horizon + 1.0);
        if (next > horizon) break;
        traj.jumps_.push_back(next);
        now = next;
        state = flipped(state);
      }
      traj.initial_.push_back(initial);
      traj.jump_offset_.push_back(traj.jumps_.size());
    }
  }
  return traj;
}

std::vector<std::int64_t> edge_double_sums(int n, const EdgeParams& params, std::uint64_t seed,
                                           std::uint64_t replicate, std::span<const double> sorted_times,
                                           bool self_loops) {
  if (n < 1) throw DomainError("graph needs n >= 1 vertices");
  for (std::size_t k = 1; k < sorted_times.size(); ++k)
    if (!(sorted_times[k] > sorted_times[k - 1]))
      throw DomainError("edge_double_sums: times must be strictly increasing");
  // Difference array over query indices: an interval covering queries [lo, hi) adds w there.
  std::vector<std::int64_t> diff(sorted_times.size() + 1, 0);
  const auto begin = sorted_times.begin();
  const auto end = sorted_times.end();
  for (int i = 0; i < n; ++i) {
    for (int j = self_loops ? i : i + 1; j < n; ++j) {
      Stream rng = edge_stream(seed, replicate, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j));
      const std::int64_t weight = (i == j) ? 1 : 2;
      for_each_present_interval(params, rng, [&](double start, double stop, bool closed) {
        const auto lo = std::lower_bound(begin, end, start) - begin;
        const auto hi = (closed ? std::upper_bound(begin, end, stop) : std::lower_bound(begin, end, stop)) - begin;
        diff[static_cast<std::size_t>(lo)] += weight;
        diff[static_cast<std::size_t>(hi)] -= weight;
      });
    }
  }
  std::vector<std::int64_t> sums(sorted_times.size());
  std::int64_t running = 0;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    running += diff[k];
    sums[k] = running;
  }
  return sums;
}

}  // namespace dyner
