// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace slicegraph {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Scenario, knowledge-base or CLI input rejected by validation.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Malformed file contents. line is 1-based, 0 when unknown.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

// A broken internal invariant. Never expected; the CLI maps it to exit 3.
class InvariantError : public Error {
  public:
    using Error::Error;
};

}  // namespace slicegraph
