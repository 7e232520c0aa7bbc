// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <stdexcept>
#include <string>

namespace tmeta {

//! Position of a construct in some input text.
struct Location {
    std::string file;
    int line = 0;
    int column = 0;

    [[nodiscard]] auto to_string() const -> std::string;
};

//! Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(std::string const &message, Location loc = {});
    [[nodiscard]] auto location() const -> Location const & { return loc_; }
    [[nodiscard]] auto message() const -> std::string const & { return message_; }

private:
    Location loc_;
    std::string message_;
};

//! Malformed surface syntax.
class SyntaxError : public Error {
    using Error::Error;
};

//! Grammar loading and type checking failures.
class TypeError : public Error {
    using Error::Error;
};

//! Unsafe rules found while injecting externals.
class SafetyError : public Error {
    using Error::Error;
};

//! Failures during instantiation.
class GroundingError : public Error {
    using Error::Error;
};

//! Malformed or inconsistent reified facts.
class ReifyError : public Error {
    using Error::Error;
};

//! A configured search or enumeration bound was exceeded.
class ResourceError : public Error {
    using Error::Error;
};

} // namespace tmeta
