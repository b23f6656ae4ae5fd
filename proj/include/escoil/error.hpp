#pragma once

#include <stdexcept>
#include <string>

namespace escoil {

// Base of every error raised by the library. CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed header, unknown keys, schema mismatch.
class FormatError : public Error {
public:
    using Error::Error;
};

// Payload shorter (or longer) than the header promises.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Non-finite samples and similar content problems.
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Input out of an operation's mathematical domain (e.g. negative field for Hellinger).
class DomainError : public Error {
public:
    using Error::Error;
};

// Zero matrix handed to eigencoil.
class DegenerateError : public Error {
public:
    using Error::Error;
};

class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace escoil
