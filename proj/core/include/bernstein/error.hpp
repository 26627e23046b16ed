// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad parameter, wrong shape).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation left the domain of a function (log of a nonpositive, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative or quadrature procedure failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Syntax error in an expression, config or grid file, with a source position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace bernstein
