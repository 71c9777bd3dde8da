/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <stdexcept>
#include <string>

namespace retrace {

// Error taxonomy shared by the C++ core and mirrored by rt_status in the C API.
enum class ErrorCode {
  invalid_argument = 1,  // malformed input, bad handle, parse failure
  domain = 2,            // value outside the operation's domain (e.g. t > 1)
  precondition = 3,      // contract precondition violated (width, length, ...)
  budget = 4,            // step / refinement budget exceeded
  ambiguous = 5,         // endpoint identification could not be resolved
  io = 6,                // file could not be read
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace retrace
