// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evidoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or data invariant was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Binary index file could not be decoded. Each failure mode has its own kind
/// so callers (and tests) can tell a foreign file from a damaged one.
class IndexFileError : public Error {
 public:
  enum class Kind { kNotAnIndexFile, kVersionMismatch, kCorruptHeader, kTruncated, kIo };

  IndexFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Model output did not follow the expected wire protocol.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string raw_text)
      : Error(what), raw_text_(std::move(raw_text)) {}

  const std::string& raw_text() const noexcept { return raw_text_; }

 private:
  std::string raw_text_;
};

/// Raised by a backend transport for a single failed attempt. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Backend call failed for good: retries exhausted or a non-retryable fault.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::vector<std::string> attempts)
      : Error(what), attempts_(std::move(attempts)) {}

  const std::vector<std::string>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

/// Pipeline failure tagged with the stage (and page, if any) where it happened.
class StageError : public Error {
 public:
  StageError(std::string stage, std::optional<int> page, const std::string& cause)
      : Error(format(stage, page, cause)), stage_(std::move(stage)), page_(page) {}

  const std::string& stage() const noexcept { return stage_; }
  std::optional<int> page() const noexcept { return page_; }

 private:
  static std::string format(const std::string& stage, std::optional<int> page,
                            const std::string& cause) {
    std::string out = "stage '" + stage + "'";
    if (page) out += " (page " + std::to_string(*page) + ")";
    return out + ": " + cause;
  }

  std::string stage_;
  std::optional<int> page_;
};

}  // namespace evidoc
