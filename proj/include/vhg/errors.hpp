#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vhg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the expression parser. `offset` is a byte index into the input;
// `expected` describes what would have been legal at that point.
struct ParseError : Error {
    ParseError(std::size_t offset, std::string expected)
        : Error("syntax error at offset " + std::to_string(offset) +
                ": expected " + expected),
          offset(offset),
          expected(std::move(expected)) {}

    std::size_t offset = 0;
    std::string expected;
};

struct EmptyInputError : ParseError {
    EmptyInputError() : ParseError(0, "a non-empty expression") {}
};

struct UnknownFunctionError : ParseError {
    UnknownFunctionError(std::size_t offset, const std::string& name)
        : ParseError(offset, "a known function name (got '" + name + "')"),
          name(name) {}

    std::string name;
};

struct UnboundVariableError : Error {
    explicit UnboundVariableError(const std::string& name)
        : Error("unbound variable: " + name), name(name) {}

    std::string name;
};

struct BackendUnavailable : Error {
    using Error::Error;
};

struct StoreFailure : Error {
    using Error::Error;
};

struct SchemaMismatch : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// An accepted verdict arrived without a difficulty estimate; pipeline bug.
struct MissingDifficulty : Error {
    using Error::Error;
};

// A solver reward was requested for a pair outside the verifier-accepted pool.
struct UngatedPair : Error {
    using Error::Error;
};

// No pool record met the challenge threshold.
struct EmptySelection : Error {
    using Error::Error;
};

}  // namespace vhg
