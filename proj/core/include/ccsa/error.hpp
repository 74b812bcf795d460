#pragma once

#include <stdexcept>
#include <string>

namespace ccsa {

enum class ErrorKind
{
  validation,
  oracle_unavailable,
  divergence,
  io
};

const char* to_string(ErrorKind kind) noexcept;

//! Base error for everything the library throws on bad input or failed runs.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ValidationError : public Error
{
public:
  explicit ValidationError(const std::string& what)
    : Error(ErrorKind::validation, what)
  {}
};

class OracleUnavailable : public Error
{
public:
  explicit OracleUnavailable(const std::string& what)
    : Error(ErrorKind::oracle_unavailable, what)
  {}
};

class IoError : public Error
{
public:
  explicit IoError(const std::string& what)
    : Error(ErrorKind::io, what)
  {}
};

} // namespace ccsa
