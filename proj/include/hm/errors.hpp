#pragma once

#include <stdexcept>
#include <string>

namespace hm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class HermitianSymmetryError : public Error {
public:
  using Error::Error;
};

class GridMismatchError : public Error {
public:
  using Error::Error;
};

class OracleSizeError : public Error {
public:
  using Error::Error;
};

/// An iterative solver (corrector or fixed-point loop) hit its iteration cap.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string &what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double last_residual_;
  int iterations_;
};

class DivergenceError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration; `path()` names the offending dotted key.
class ConfigError : public Error {
public:
  ConfigError(const std::string &path, const std::string &what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}

  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

class StudyError : public Error {
public:
  using Error::Error;
};

class SnapshotError : public Error {
public:
  using Error::Error;
};

} // namespace hm
