#pragma once

#include <stdexcept>
#include <string>

namespace entfv {

/// Construction or configuration rejected (bad sizes, unknown keys, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A field left the admissible state space (rho or e non-positive).
class PositivityError : public std::runtime_error {
public:
  PositivityError(const std::string& what, std::size_t cell, long step = -1)
      : std::runtime_error(what), cell_(cell), step_(step) {}
  std::size_t cell() const noexcept { return cell_; }
  long step() const noexcept { return step_; }

private:
  std::size_t cell_;
  long step_;
};

/// Linear solve or Picard iteration failed to reach its tolerance.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace entfv
