// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rearrange {

enum class ErrorCode {
  invalid_argument,
  shape,
  permutation,
  spec,
  bounds,
  size_overflow,
  io,
  format,
  verification,
  task_failure,
};

/// Base exception for every library failure. The code maps 1:1 onto the C API status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rearrange
