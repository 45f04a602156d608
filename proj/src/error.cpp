#include "streamlsh/error.hpp"

#include <fmt/core.h>

namespace streamlsh {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : fmt::format("line {}: {}", line, what)), line_(line) {}

}  // namespace streamlsh
