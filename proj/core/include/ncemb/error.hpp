#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncemb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_ = 0;
};

/// Invalid or inconsistent configuration (bad key, out-of-range value).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A referenced file or resource does not exist or cannot be opened.
class MissingResourceError : public Error {
public:
  using Error::Error;
};

/// Numerically degenerate input (zero-norm vector under a cosine measure).
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// Training could not proceed (empty effective set, no valid negatives).
class TrainError : public Error {
public:
  using Error::Error;
};

/// Evaluation could not produce a result (bad split, no positives).
class EvalError : public Error {
public:
  using Error::Error;
};

} // namespace ncemb
