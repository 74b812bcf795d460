#include "ccsa/error.hpp"

namespace ccsa {

const char* to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::validation:
      return "validation";
    case ErrorKind::oracle_unavailable:
      return "oracle_unavailable";
    case ErrorKind::divergence:
      return "divergence";
    case ErrorKind::io:
      return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
  : std::runtime_error(what)
  , kind_(kind)
{}

} // namespace ccsa
