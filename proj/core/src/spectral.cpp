#include "dyner/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyner/errors.hpp"
#include "dyner/theory.hpp"

namespace dyner {

namespace {

constexpr int kUnshiftedSteps = 64;

void require_symmetric(const Eigen::MatrixXd& a, const char* op) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DomainError(std::string(op) + ": matrix must be square and non-empty");
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i)
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
        throw DomainError(std::string(op) + ": matrix is not symmetric");
}

// All-ones direction with a small deterministic perturbation, so the start is
// never exactly orthogonal to an eigenvector of interest.
Eigen::VectorXd start_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  constexpr double kGolden = 0.6180339887498949;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double frac = std::fmod(static_cast<double>(i + 1) * kGolden, 1.0);
    v(i) = 1.0 + 0.05 * (frac - 0.5);
  }
  return v.normalized();
}

double gershgorin_radius(const Eigen::MatrixXd& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::VectorXd symv(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  return a.selfadjointView<Eigen::Lower>() * v;
}

}  // namespace

void SpectralConfig::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
}

SpectralResult principal_eig(const Eigen::MatrixXd& a, const SpectralConfig& config,
                             const std::optional<Eigen::VectorXd>& warm) {
  config.validate();
  require_symmetric(a, "principal_eig");
  const Eigen::Index n = a.rows();

  SpectralResult out;
  if (a.isZero(0.0)) {
    out.vector = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    return out;
  }

  Eigen::VectorXd v;
  if (warm) {
    if (warm->size() != n) throw DomainError("principal_eig: warm vector has wrong dimension");
    const double norm = warm->norm();
    if (std::abs(norm - 1.0) > 1e-8) throw DomainError("principal_eig: warm vector must be a unit vector");
    v = *warm / norm;
  } else {
    v = start_vector(n);
  }

  double shift = 0.0;
  Eigen::VectorXd w = symv(a, v);
  double residual = 0.0;
  int it = 1;
  for (;; ++it) {
    const double theta = v.dot(w);
    residual = (w - theta * v).norm();
    if (residual <= config.rel_tol * std::max(1.0, std::abs(theta))) break;
    if (it >= config.max_iters)
      throw ConvergenceError("principal_eig: no convergence after " + std::to_string(it) +
                                 " iterations (residual " + std::to_string(residual) + ")",
                             residual);
    if (it == kUnshiftedSteps && shift == 0.0) shift = gershgorin_radius(a);
    Eigen::VectorXd y = w + shift * v;
    v = y / y.norm();
    w = symv(a, v);
  }

  if (v.sum() < 0.0) v = -v;
  // Certificate from a fresh mat-vec on the final vector.
  const Eigen::VectorXd av = a * v;
  out.mu = v.dot(av);
  out.residual = (av - out.mu * v).norm();
  out.iters = it;
  out.vector = std::move(v);
  if (out.residual > config.rel_tol * std::max(1.0, std::abs(out.mu)))
    throw ConvergenceError("principal_eig: residual certificate failed", out.residual);
  return out;
}

std::vector<SpectralResult> eig_path(const GraphTrajectory& traj, const TimeGrid& grid,
                                     const SpectralConfig& config) {
  if (grid.horizon() > traj.params().horizon())
    throw DomainError("eig_path: grid extends beyond the trajectory horizon");
  std::vector<SpectralResult> path;
  path.reserve(grid.size());
  std::optional<Eigen::VectorXd> warm;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    try {
      SpectralResult r = principal_eig(traj.adjacency_at(grid[j]), config, warm);
      r.t = grid[j];
      if (config.warm_start) warm = r.vector;
      path.push_back(std::move(r));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at grid index " + std::to_string(j),
                             e.last_residual(), j);
    }
  }
  return path;
}

double mu_star(const SpectralResult& result, const EdgeParams& params, double t) {
  const double p = edge_prob(params, t);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("mu_star: p(t) must lie in (0,1)");
  const double n = static_cast<double>(result.vector.size());
  if (n < 1) throw DomainError("mu_star: empty eigenvector");
  return result.mu / std::sqrt(n * p * (1.0 - p));
}

int default_truncation(Eigen::Index n) {
  return static_cast<int>(std::ceil(std::log(static_cast<double>(n))));
}

std::vector<double> quadratic_form_powers(const CenteredMatrix& h, int k_max) {
  const Eigen::Index n = h.n();
  if (k_max < 0 || k_max > default_truncation(n) + 2)
    throw DomainError("quadratic_form_powers: k_max must lie in [0, ceil(log N) + 2]");
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> forms(static_cast<std::size_t>(k_max) + 1);
  forms[0] = 1.0;
  Eigen::VectorXd v = e;
  for (int k = 1; k <= k_max; ++k) {
    v = symv(h.matrix(), v);
    forms[static_cast<std::size_t>(k)] = e.dot(v);
  }
  return forms;
}

double series_rhs(double sqrt_nq, const std::vector<double>& forms, int truncation_k, double mu) {
  const double x = 1.0 / mu;
  double acc = 0.0;
  for (int k = truncation_k; k >= 0; --k) acc = acc * x + forms[static_cast<std::size_t>(k)];
  return sqrt_nq * acc;
}

double series_eig(const CenteredMatrix& h, const EdgeParams& params, int truncation_k,
                  const SpectralConfig& config) {
  config.validate();
  const Eigen::Index n = h.n();
  const int k = truncation_k == 0 ? default_truncation(n) : truncation_k;
  if (k < 1) throw DomainError("series_eig: truncation order must be >= 1");
  const std::vector<double> forms = quadratic_form_powers(h, k);

  const TheoryCurves curves(params);
  const double nn = static_cast<double>(n);
  const double lower = std::sqrt(nn * curves.q_minus()) / 4.0;
  const double upper = 4.0 * std::sqrt(nn * curves.q_plus());
  const double sqrt_nq = std::sqrt(nn * h.q());

  double mu = sqrt_nq;
  for (int it = 1; it <= config.max_iters; ++it) {
    const double next = 0.5 * mu + 0.5 * series_rhs(sqrt_nq, forms, k, mu);
    if (!(next >= lower && next <= upper))
      throw SeriesDivergenceError("series_eig: iterate " + std::to_string(next) +
                                      " left the admissible bracket",
                                  next);
    if (std::abs(next - mu) <= config.rel_tol * next) return next;
    mu = next;
  }
  throw ConvergenceError("series_eig: fixed point did not settle", std::abs(mu));
}

double spectral_norm(const Eigen::MatrixXd& h, const SpectralConfig& config) {
  config.validate();
  require_symmetric(h, "spectral_norm");
  const Eigen::Index n = h.rows();
  if (h.isZero(0.0)) return 0.0;

  const double tiny = 1e-13 * std::max(1.0, gershgorin_radius(h));
  Eigen::Index capacity = std::min<Eigen::Index>(n, 64);
  Eigen::MatrixXd basis(n, capacity);
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.col(0) = start_vector(n);

  double last_residual = 0.0;
  for (Eigen::Index j = 0;; ++j) {
    Eigen::VectorXd w = symv(h, basis.col(j));
    alpha.push_back(basis.col(j).dot(w));
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coeffs = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * coeffs;
    }
    const double b = w.norm();
    const Eigen::Index m = j + 1;
    const bool exhausted = b <= tiny || m == n;
    const bool check = exhausted || m % 8 == 0 || m >= config.max_iters;

    if (check) {
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto& theta = tri.eigenvalues();
      const auto& s = tri.eigenvectors();
      bool converged = true;
      double best = 0.0;
      last_residual = 0.0;
      for (Eigen::Index idx : {Eigen::Index{0}, m - 1}) {
        const Eigen::VectorXd ritz = basis.leftCols(m) * s.col(idx);
        const double res = (symv(h, ritz) - theta(idx) * ritz).norm();
        last_residual = std::max(last_residual, res);
        if (res > config.rel_tol * std::max(1.0, std::abs(theta(idx)))) converged = false;
        best = std::max(best, std::abs(theta(idx)));
      }
      if (converged) return best;
      if (exhausted)
        throw ConvergenceError("spectral_norm: Krylov space exhausted before convergence",
                               last_residual);
    }
    if (m >= config.max_iters)
      throw ConvergenceError("spectral_norm: no convergence after " + std::to_string(m) +
                                 " Lanczos steps",
                             last_residual);
    beta.push_back(b);
    if (m == capacity) {
      capacity = std::min<Eigen::Index>(n, 2 * capacity);
      basis.conservativeResize(Eigen::NoChange, capacity);
    }
    basis.col(m) = w / b;
  }
}

}  // namespace dyner
