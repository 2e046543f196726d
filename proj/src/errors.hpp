#pragma once

#include <stdexcept>
#include <string>

namespace biovolt {

enum class ErrorCode {
  Config = 1,
  Io = 2,
  Numerical = 3,
  InvalidArgument = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(std::string msg) : Error(ErrorCode::Config, std::move(msg)) {}
};
struct IoError : Error {
  explicit IoError(std::string msg) : Error(ErrorCode::Io, std::move(msg)) {}
};
struct NumericalError : Error {
  explicit NumericalError(std::string msg) : Error(ErrorCode::Numerical, std::move(msg)) {}
};
struct InvalidArgument : Error {
  explicit InvalidArgument(std::string msg) : Error(ErrorCode::InvalidArgument, std::move(msg)) {}
};

} // namespace biovolt
