#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fttgru {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not satisfy an operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// NaN or Inf produced or consumed where finite values are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or unknown configuration key.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file that is missing or unreadable. Carries the offending path.
class IoError : public Error {
public:
    IoError(std::string path, const std::string& what)
        : Error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed input text. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace fttgru
