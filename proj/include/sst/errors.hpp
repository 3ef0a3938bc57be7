// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sst {

/// Root of every error raised by the library. The CLI maps subclasses to exit
/// codes: UsageError -> 2, DivergenceError -> 4, anything else -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// varspace
class InfeasibleRegion : public Error {
 public:
  using Error::Error;
};

// netcore
class InconsistentArchitecture : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Training blew up (non-finite loss or gradient).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

class DivergenceDetected : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

// strategies
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class MissingLabel : public Error {
 public:
  using Error::Error;
};

class MissingState : public Error {
 public:
  using Error::Error;
};

// dataio
class BadMagic : public Error {
 public:
  using Error::Error;
};

class TruncatedFile : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonDivisible : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sst
