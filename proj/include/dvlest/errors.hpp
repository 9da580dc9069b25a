#pragma once

#include <stdexcept>
#include <string>

namespace dvlest {

/// Bad user-supplied configuration (unknown model name, overlapping
/// split ids, geometry mismatch against a checkpoint, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (missing columns, non-monotone
/// timestamps, rate deviation beyond tolerance, empty files).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite loss. Carries the epoch index.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"),
        epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

private:
  std::size_t epoch_;
};

/// Geometry that cannot be inverted (rank-deficient transformation matrix).
class SingularGeometryError : public std::runtime_error {
public:
  explicit SingularGeometryError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Caller broke a documented precondition (out-of-range beam index,
/// shape mismatch, backward without a cached forward).
class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what)
      : std::logic_error(what) {}
};

namespace detail {
inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}
}  // namespace detail

}  // namespace dvlest
