#pragma once

#include <stdexcept>
#include <string>

namespace mellinridge {

//! Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode
{
  invalid_argument = 1,
  domain = 2,           // transform not defined at this development point
  g0_violation = 3,     // noise transform (numerically) vanishes on a window
  empty_admissible = 4, // no regularisation level passes the variance bound
  numerical = 5,
  io = 6,
  parse = 7,
  unknown_id = 8,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what)
    , code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void
fail(ErrorCode code, const std::string& what)
{
  throw Error(code, what);
}

} // namespace mellinridge
