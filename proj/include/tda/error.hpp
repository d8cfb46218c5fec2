#pragma once

#include <stdexcept>
#include <string>

namespace tda {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class ShapeMismatch : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class StatsError : public Error { using Error::Error; };
class SpecError : public Error { using Error::Error; };

// Target occupies its whole contrast region, so no background mean exists.
class DegenerateRegion : public Error { using Error::Error; };

// Empty-data conditions (exit code 3 at the CLI).
class EmptyTrainingSet : public Error { using Error::Error; };
class EmptyDataset : public Error { using Error::Error; };

}  // namespace tda
