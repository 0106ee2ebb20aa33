#pragma once

#include <stdexcept>
#include <string>

namespace circumnav {

// Error hierarchy. Everything user-facing derives from Error so the CLI can
// map library failures onto exit codes in one place.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Validation-class errors (bad inputs, bad config). CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Runtime-class errors (simulation, I/O, numerics). CLI exit code 2.
class RuntimeError : public Error {
 public:
  using Error::Error;
};

class CoincidentPositions : public RuntimeError {
 public:
  CoincidentPositions() : RuntimeError("bearing undefined: agent and target coincide") {}
};

class DegenerateBearing : public RuntimeError {
 public:
  DegenerateBearing() : RuntimeError("perturbed bearing has near-zero norm") {}
};

class NonFiniteCommand : public RuntimeError {
 public:
  NonFiniteCommand() : RuntimeError("agent velocity command contains NaN/Inf") {}
};

class MissingEstimate : public RuntimeError {
 public:
  MissingEstimate() : RuntimeError("controller past gate but no target estimate supplied") {}
};

class NonFiniteEstimate : public RuntimeError {
 public:
  NonFiniteEstimate() : RuntimeError("target estimate contains NaN/Inf") {}
};

class ShapeMismatch : public RuntimeError {
 public:
  explicit ShapeMismatch(const std::string& what) : RuntimeError("shape mismatch: " + what) {}
};

class WrongWindowLength : public RuntimeError {
 public:
  WrongWindowLength(std::size_t got, std::size_t want)
      : RuntimeError("window length " + std::to_string(got) + ", model expects " +
                     std::to_string(want)) {}
};

class IoError : public RuntimeError {
 public:
  explicit IoError(const std::string& what) : RuntimeError("io error: " + what) {}
};

class VersionMismatch : public RuntimeError {
 public:
  explicit VersionMismatch(const std::string& what) : RuntimeError("version mismatch: " + what) {}
};

class ChecksumMismatch : public RuntimeError {
 public:
  ChecksumMismatch() : RuntimeError("weight file checksum does not match payload") {}
};

class EpisodeDivergence : public RuntimeError {
 public:
  explicit EpisodeDivergence(double range)
      : RuntimeError("episode diverged: range " + std::to_string(range) + " m") {}
};

class NonFiniteLoss : public RuntimeError {
 public:
  explicit NonFiniteLoss(const std::string& diag) : RuntimeError("non-finite loss: " + diag) {}
};

class TrialTooShort : public RuntimeError {
 public:
  TrialTooShort() : RuntimeError("trial shorter than the aggregation window") {}
};

class UnknownProfile : public ValidationError {
 public:
  explicit UnknownProfile(const std::string& name)
      : ValidationError("unknown profile: " + name) {}
};

class MissingModel : public ValidationError {
 public:
  explicit MissingModel(const std::string& what) : ValidationError("missing model: " + what) {}
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace circumnav
