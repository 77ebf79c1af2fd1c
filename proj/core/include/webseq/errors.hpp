// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webseq {

/// Base of every error thrown by the library. `category()` is a stable
/// lowercase tag the CLI uses when reporting and choosing an exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* category() const noexcept { return "error"; }
};

/// Malformed input record. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }
  const char* category() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }
  const char* category() const noexcept override { return "schema"; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "config"; }
};

class FitError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "fit"; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "shape"; }
};

/// A caller broke an operation's precondition (e.g. masking a window twice).
class ContractError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "contract"; }
};

class TrainingError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "training"; }
};

class MetricError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "metric"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "validation"; }
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "compatibility"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

}  // namespace webseq
