#pragma once

#include <stdexcept>
#include <string>

namespace abm {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (dead agent, invalid position, negative radius...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation needs an empty position and the space has none.
class NoEmptyPosition : public Error {
 public:
  NoEmptyPosition() : Error("no empty position available") {}
};

class DegenerateWeights : public Error {
 public:
  DegenerateWeights() : Error("sampling weights are all zero") {}
};

class OccupiedNode : public Error {
 public:
  using Error::Error;
};

class CollectorResolution : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

/// Checkpoint failed schema validation; what() names the offending field path.
class CorruptCheckpoint : public Error {
 public:
  using Error::Error;
};

class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class StepBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A model configuration key is unknown, mistyped or out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A parameter-scan run failed; what() names the setting and replicate.
class ScanFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace abm
