#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bsq {

enum class ErrorCode {
    internal = 1,
    shape_mismatch,
    symmetry_violation,
    multiplier_domain,
    resolution_too_large,
    non_convergence,
    contraction_failure,
    data_not_gevrey,
    empty_annulus,
    insufficient_decay_range,
    undefined_ratio,
    domain_error,
    config_error,
    io_error,
};

/// Base error for all failure modes of the library. Carries a stable code so
/// the C API can map failures onto integer statuses.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Fixed-point iteration did not converge. Keeps the per-iteration update
/// norms so callers can distinguish slow convergence from blow-up.
class NonConvergence : public Error {
  public:
    NonConvergence(std::string msg, std::vector<double> history)
        : Error(ErrorCode::non_convergence, std::move(msg)), history_(std::move(history)) {}
    const std::vector<double>& update_history() const noexcept { return history_; }

  private:
    std::vector<double> history_;
};

/// Configuration rejected; message lines are field-level diagnostics.
class ConfigError : public Error {
  public:
    ConfigError(std::string msg, std::vector<std::string> diagnostics)
        : Error(ErrorCode::config_error, std::move(msg)), diagnostics_(std::move(diagnostics)) {}
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

  private:
    std::vector<std::string> diagnostics_;
};

} // namespace bsq
