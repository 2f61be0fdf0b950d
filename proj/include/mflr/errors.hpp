// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_ERRORS_HPP
#define MFLR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mflr
{

// Bad input data: malformed files, non-finite values, inconsistent dimensions.
class DataError : public std::runtime_error
{
public:
  enum class Code
  {
    Io,
    Malformed,
    Ragged,
    NonFinite,
    DimensionMismatch,
    Empty,
    ZeroNorm,
    NoEffectiveData,
    Schema
  };

  DataError(Code code, const std::string &msg) : std::runtime_error(msg), code_(code) {}

  Code code() const noexcept { return code_; }

private:
  Code code_;
};

// A numerical procedure could not produce a usable result.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invalid or unknown configuration values.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline void require_dims(bool ok, const std::string &what)
{
  if (!ok)
  {
    throw DataError(DataError::Code::DimensionMismatch, "dimension mismatch: " + what);
  }
}

}  // namespace mflr

#endif  // MFLR_ERRORS_HPP
