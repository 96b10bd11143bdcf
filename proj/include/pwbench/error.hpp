#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwbench {

/// Bad input data: malformed files, violated preconditions on user input.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured memory or frontier cap was exceeded.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RuleParseError : public DataError {
public:
    RuleParseError(std::size_t line, std::size_t column, const std::string& what)
        : DataError("rule line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace pwbench
