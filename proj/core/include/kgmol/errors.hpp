//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KGMOL_ERRORS_HPP
#define KGMOL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgmol {

/// Bad user input: malformed files, unknown names, invalid configs.
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string &what) : std::runtime_error(what) {}
};

/// A broken internal invariant (non-finite tensor, shape mismatch, ...).
/// The CLI maps this to exit code 2.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string &what) : std::logic_error(what) {}
};

/// Input rejected by a parser; carries the byte offset of the offending
/// token when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string &what, std::size_t position)
      : InputError(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace kgmol

#endif  // KGMOL_ERRORS_HPP
