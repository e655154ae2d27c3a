#pragma once

#include <stdexcept>
#include <string>

namespace rmtfid {

enum class ErrorKind { config = 1, domain = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid parameters, mismatched dimensions or grids.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// Eigensolver failure or a decomposition that violates unitarity.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long dim, double residual)
      : Error(ErrorKind::numerical, what + " (dim=" + std::to_string(dim) +
                                        ", residual=" + std::to_string(residual) + ")"),
        dim_(dim),
        residual_(residual) {}
  long dim() const noexcept { return dim_; }
  double residual() const noexcept { return residual_; }

 private:
  long dim_;
  double residual_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(ErrorKind::io, path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace rmtfid
