#pragma once

#include <charconv>
#include <ostream>
#include <string>

namespace mellinridge::detail {

//! Shortest round-trip decimal form, independent of the stream locale.
inline void
put_number(std::ostream& out, double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

inline std::string
number_string(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return { buf, res.ptr };
}

} // namespace mellinridge::detail
