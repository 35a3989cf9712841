#include "ppc/error.hpp"

namespace ppc {

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& message) {
  if (line == 0) return source + ": " + message;
  return source + ":" + std::to_string(line) + ": " + message;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : Error(located(source, line, message)), source_(std::move(source)), line_(line) {}

UnknownTypeError::UnknownTypeError(const std::string& path)
    : Error("unknown metadata type '" + path + "'") {}

}  // namespace ppc
