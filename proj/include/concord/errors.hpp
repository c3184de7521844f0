#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace concord {

/// Base class for all typed errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad argument to a library operation (K < 2, empty marginals, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A coefficient is undefined on the given data (expected index equal to 1).
/// Carries the offending counts so callers can report or drop the sample.
class UndefinedCoefficientError : public Error {
 public:
  UndefinedCoefficientError(const std::string& what, int K,
                            std::vector<std::int64_t> counts)
      : Error(what), K_(K), counts_(std::move(counts)) {}

  int table_K() const { return K_; }
  const std::vector<std::int64_t>& table_counts() const { return counts_; }

 private:
  int K_;
  std::vector<std::int64_t> counts_;
};

/// The unbiased-variant transformation is undefined (denominator <= 0).
class TransformDomainError : public Error {
 public:
  using Error::Error;
};

/// A drawn or supplied sample is degenerate for the requested statistic.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// enumerate_tables would exceed the configured outcome cap.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference gradient evaluation failed at a specific cell.
class GradientError : public Error {
 public:
  GradientError(const std::string& what, int cell) : Error(what), cell_(cell) {}
  int cell() const { return cell_; }

 private:
  int cell_;
};

/// Bootstrap failed (too many degenerate resamples, bad arguments).
class BootstrapError : public Error {
 public:
  using Error::Error;
};

/// Config file problem, annotated with the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key_path)
      : Error(what + " (at " + key_path + ")"), key_path_(std::move(key_path)) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

/// Rating-file ingestion problem, annotated with a line number when known.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, long line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace concord
