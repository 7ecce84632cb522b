#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridtag {

// Malformed or inconsistent user-supplied content. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure in a corpus or resource file; carries a 1-based line number.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& message)
        : DataError("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Missing or mutually inconsistent resources. CLI exit code 3.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hybridtag
