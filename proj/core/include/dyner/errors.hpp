#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dyner {

/// Argument outside the mathematical domain of an operation
/// (rates <= 0, probabilities outside (0,1), times outside the horizon, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative eigensolver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual,
                   std::optional<std::size_t> grid_index = std::nullopt)
      : std::runtime_error(what), last_residual_(last_residual), grid_index_(grid_index) {}

  double last_residual() const noexcept { return last_residual_; }
  std::optional<std::size_t> grid_index() const noexcept { return grid_index_; }

 private:
  double last_residual_;
  std::optional<std::size_t> grid_index_;
};

/// The series fixed-point iterate left its admissible bracket. Signals that the
/// high-probability spectral event failed for this sample.
class SeriesDivergenceError : public std::runtime_error {
 public:
  SeriesDivergenceError(const std::string& what, double last_iterate)
      : std::runtime_error(what), last_iterate_(last_iterate) {}

  double last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_iterate_;
};

/// Malformed configuration or command line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure, message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dyner
