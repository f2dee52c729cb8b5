#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvreg {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorCategory { Parse, Numerical, Config };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Invalid argument or violated precondition.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCategory::Parse, "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

/// Fewer than two design points carry kernel mass, or the local linear
/// determinant vanishes.
class DegenerateWindow : public NumericalError {
 public:
  DegenerateWindow(double t, const std::string& detail)
      : NumericalError("degenerate temporal window at t=" + std::to_string(t) + ": " + detail),
        t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

/// Estimated density at a required evaluation point is not positive.
class DegenerateDensity : public NumericalError {
 public:
  DegenerateDensity(std::size_t index, double value)
      : NumericalError("degenerate density estimate " + std::to_string(value) +
                       " at observation " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class SingularGram : public NumericalError {
 public:
  SingularGram(double t, const std::string& detail)
      : NumericalError("singular Gram matrix at t=" + std::to_string(t) + ": " + detail), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace tvreg
