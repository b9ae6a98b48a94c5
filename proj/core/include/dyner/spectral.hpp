#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dyner/edge_dynamics.hpp"
#include "dyner/graph_sim.hpp"

namespace dyner {

struct SpectralConfig {
  double rel_tol = 1e-10;
  int max_iters = 100000;
  bool warm_start = true;

  /// Throws DomainError unless rel_tol > 0 and max_iters >= 1.
  void validate() const;
  bool operator==(const SpectralConfig&) const = default;
};

/// Principal eigenpair of one snapshot.
///
/// Invariants: residual = ||A v - mu v||_2 <= rel_tol * max(1, |mu|), ||v||_2 = 1,
/// and the vector has a nonnegative entry sum (Perron direction).
struct SpectralResult {
  double mu = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int iters = 0;
  double t = 0.0;
};

/// Largest eigenvalue of a symmetric matrix by power iteration with a
/// Rayleigh-quotient readout and a residual check every step.
///
/// Starts from `warm` when given (it must be a unit vector), otherwise from a
/// slightly perturbed all-ones direction. Iterates unshifted first; if that has
/// not converged after 64 steps it shifts by the Gershgorin radius so that the
/// largest eigenvalue is also dominant in magnitude. The zero matrix returns
/// mu = 0 with the all-ones unit vector.
///
/// Throws DomainError for non-square or asymmetric input and ConvergenceError
/// (carrying the last residual) when max_iters is exhausted.
SpectralResult principal_eig(const Eigen::MatrixXd& a, const SpectralConfig& config,
                             const std::optional<Eigen::VectorXd>& warm = std::nullopt);

/// mu(t_j) for each grid point. With config.warm_start each solve starts from
/// the previous eigenvector, which forces sequential grid order. A failure is
/// rethrown as ConvergenceError tagged with the grid index.
std::vector<SpectralResult> eig_path(const GraphTrajectory& traj, const TimeGrid& grid,
                                     const SpectralConfig& config);

/// Normalized eigenvalue mu / sqrt(N p(t) (1 - p(t))), N = result.vector.size().
double mu_star(const SpectralResult& result, const EdgeParams& params, double t);

/// ceil(log N), the default truncation order of the series expansion.
int default_truncation(Eigen::Index n);

/// <e, H^k e> for k = 0..k_max with e = (1,...,1)/sqrt(N), by k mat-vecs.
/// Throws DomainError when k_max > ceil(log N) + 2 or k_max < 0.
std::vector<double> quadratic_form_powers(const CenteredMatrix& h, int k_max);

/// Solves mu = sqrt(N q) * sum_{k=0..K} <e, H^k e> / mu^k by the damped
/// iteration mu <- (mu + rhs(mu)) / 2 started at sqrt(N q); stops when
/// successive iterates differ by at most rel_tol * mu. truncation_k = 0 means
/// default_truncation(N).
///
/// Throws SeriesDivergenceError when an iterate leaves
/// [sqrt(N q-)/4, 4 sqrt(N q+)], ConvergenceError after max_iters.
double series_eig(const CenteredMatrix& h, const EdgeParams& params, int truncation_k,
                  const SpectralConfig& config);

/// Right-hand side of the truncated fixed-point equation at mu, given the
/// quadratic forms <e, H^k e>. Exposed for self-consistency checks.
double series_rhs(double sqrt_nq, const std::vector<double>& forms, int truncation_k, double mu);

/// Spectral norm (largest |eigenvalue|) of a symmetric matrix by Lanczos with
/// full reorthogonalization. Both extreme Ritz pairs must reach residual
/// <= rel_tol * max(1, |theta|) before the larger |theta| is returned.
double spectral_norm(const Eigen::MatrixXd& h, const SpectralConfig& config);

}  // namespace dyner
