#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or data file. Carries the source name and a
// 1-based line number (0 when the location is a key rather than a line).
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class UnknownTypeError : public Error {
 public:
  explicit UnknownTypeError(const std::string& path);
};

}  // namespace ppc
