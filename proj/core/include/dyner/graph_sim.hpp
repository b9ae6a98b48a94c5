#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dyner/edge_dynamics.hpp"

namespace dyner {

/// Strictly increasing observation times inside [0, horizon].
class TimeGrid {
 public:
  TimeGrid(std::vector<double> points, double horizon);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double horizon() const noexcept { return horizon_; }

  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<double> points_;
  double horizon_;
};

/// One global jump: time and the index of the edge that flipped.
struct JumpEvent {
  double time;
  std::size_t edge;
};

/// Normalized, centered adjacency snapshot
///   h_ij(t) = (a_ij(t) - p(t)) / sqrt(N p(t) (1 - p(t))).
/// Without self-loops the diagonal is identically zero.
class CenteredMatrix {
 public:
  CenteredMatrix(Eigen::MatrixXd h, double t, double p);

  const Eigen::MatrixXd& matrix() const noexcept { return h_; }
  Eigen::Index n() const noexcept { return h_.rows(); }
  double time() const noexcept { return t_; }
  double p() const noexcept { return p_; }
  /// Odds p / (1 - p).
  double q() const noexcept { return p_ / (1.0 - p_); }

  /// Builds H from a 0/1 adjacency matrix; `self_loops` decides whether the
  /// diagonal is centered or zeroed.
  static CenteredMatrix from_adjacency(const Eigen::MatrixXd& adjacency, double t, double p,
                                       bool self_loops);

 private:
  Eigen::MatrixXd h_;
  double t_;
  double p_;
};

/// A sampled dynamic graph: one EdgePath per vertex pair i <= j (i < j without
/// self-loops), stored in a flat jump-time table. Immutable once built; all
/// snapshot accessors are pure functions of the stored paths.
class GraphTrajectory {
 public:
  /// Assembles a trajectory from explicit paths in edge order (row-major upper
  /// triangle). Throws DomainError on a count or horizon mismatch.
  GraphTrajectory(int n, EdgeParams params, std::span<const EdgePath> paths, bool self_loops = true);

  int n() const noexcept { return n_; }
  const EdgeParams& params() const noexcept { return params_; }
  bool self_loops() const noexcept { return self_loops_; }
  std::size_t num_edges() const noexcept { return initial_.size(); }
  std::size_t total_jumps() const noexcept { return jumps_.size(); }

  /// Edge index of the unordered pair {i, j}.
  std::size_t edge_index(int i, int j) const;
  /// The path of pair {i, j} (copied out of the flat table).
  EdgePath path(int i, int j) const;
  EdgeState state_at(int i, int j, double t) const;

  /// Symmetric 0/1 adjacency matrix A_N(t).
  Eigen::MatrixXd adjacency_at(double t) const;
  CenteredMatrix centered_matrix_at(double t) const;

  /// (1/N) * sum over all ordered (i, j) of (a_ij(t) - p(t)); each off-diagonal
  /// pair counted twice, the diagonal once (skipped without self-loops).
  double edge_sum_centered(double t) const;

  /// sum over all ordered (i, j) of a_ij(t).
  std::int64_t edge_double_sum(double t) const;

  /// All jumps across edges, ordered by (time, edge index).
  std::vector<JumpEvent> sorted_events() const;

  /// Smallest gap between distinct global jump times, +infinity with < 2 jumps.
  double min_jump_spacing() const;

 private:
  friend GraphTrajectory sample_graph(int, const EdgeParams&, std::uint64_t, std::uint64_t, bool);
  GraphTrajectory(int n, EdgeParams params, bool self_loops);

  void check_time(double t) const;
  EdgeState state_of(std::size_t edge, double t) const;

  int n_;
  EdgeParams params_;
  bool self_loops_;
  std::vector<std::size_t> row_offset_;
  std::vector<EdgeState> initial_;
  std::vector<std::size_t> jump_offset_;  // num_edges + 1 entries
  std::vector<double> jumps_;
};

/// Samples every edge path independently; edge (i, j) draws from
/// edge_stream(seed, replicate, i, j), so each path is reproducible in isolation.
GraphTrajectory sample_graph(int n, const EdgeParams& params, std::uint64_t seed,
                             std::uint64_t replicate, bool self_loops = true);

/// sum over ordered (i, j) of a_ij(t) at each of `sorted_times`, for the same
/// trajectory sample_graph(n, params, seed, replicate, self_loops) would build,
/// without materializing it. Memory is O(#times).
std::vector<std::int64_t> edge_double_sums(int n, const EdgeParams& params, std::uint64_t seed,
                                           std::uint64_t replicate, std::span<const double> sorted_times,
                                           bool self_loops = true);

inline constexpr double kNoSpacing = std::numeric_limits<double>::infinity();

}  // namespace dyner
