// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace posefollow {

/// Base error for every failure the library reports. `code()` is a short
/// machine-greppable token (e.g. "schema", "clock", "empty_trial").
class Error : public std::runtime_error
{
public:
  Error( std::string code, const std::string & detail )
    : std::runtime_error( detail ), code_( std::move( code ) )
  {
  }

  const std::string & code() const noexcept { return code_; }

private:
  std::string code_;
};

/// Input data violated a format or type invariant.
class DataError : public Error
{
public:
  using Error::Error;
};

}  // namespace posefollow
