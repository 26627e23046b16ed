// SPDX-License-Identifier: MIT
//
// Arithmetic expressions for coefficients in run configs.
//
//   expr    := sum
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, binds tighter than unary minus
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names: x1..x9 (coordinates), p1..p9 (gradient, for H), v, t.
// Functions: sin cos exp log abs sqrt (one argument), min max (two).
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bernstein/linalg.hpp"

namespace bernstein {

struct Bindings {
    Vec x;
    Vec p;
    std::optional<double> v;
    std::optional<double> t;
};

class Expr {
public:
    struct Node;

    Expr() = default;

    /// Throws ParseError (with line and column) on bad syntax, unknown names or
    /// wrong arity, and ValidationError for input above 64 KiB.
    static Expr parse(const std::string& text);

    /// Throws DomainError for log/sqrt outside their domain, division by zero,
    /// non-finite results and unbound variables.
    double eval(const Bindings& b) const;

    /// Fully parenthesized text that parses back to the same tree.
    std::string print() const;

    /// Variable names that occur in the expression.
    std::set<std::string> variables() const;

    bool empty() const noexcept { return !root_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// Gradient in x by central differences with step h * max(1, |x_i|).
Vec grad_expr(const Expr& e, const Bindings& b, double h = 1e-6);

}  // namespace bernstein
