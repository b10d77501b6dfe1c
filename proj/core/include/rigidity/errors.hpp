#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rigidity {

// Base of every error thrown by the library. kind() is the stable,
// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }
  virtual int exit_code() const noexcept { return 1; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
  int exit_code() const noexcept override { return 2; }
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error("schema", what) {}
  int exit_code() const noexcept override { return 2; }
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error("resource_cap", what) {}
  int exit_code() const noexcept override { return 3; }
};

class InvalidCovariance : public Error {
 public:
  explicit InvalidCovariance(const std::string& what) : Error("invalid_covariance", what) {}
  int exit_code() const noexcept override { return 4; }
};

class WindowTooSmall : public Error {
 public:
  explicit WindowTooSmall(const std::string& what) : Error("window_too_small", what) {}
  int exit_code() const noexcept override { return 5; }
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
  int exit_code() const noexcept override { return 6; }
};

[[noreturn]] void throw_invalid(std::string_view what);

}  // namespace rigidity
