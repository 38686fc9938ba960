#pragma once

#include <stdexcept>
#include <string>

namespace linkmap {

/// Base of every error the library throws. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (bad argument, empty input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A domain or record that is not present.
class NotFound : public Error {
public:
    using Error::Error;
};

/// Malformed input file or stream.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Optimistic-revision conflict in the label store.
class Conflict : public Error {
public:
    using Error::Error;
};

} // namespace linkmap
