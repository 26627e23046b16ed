// SPDX-License-Identifier: MIT
#include "bernstein/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "bernstein/error.hpp"

namespace bernstein {

struct Expr::Node {
    enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
    Kind kind;
    double number = 0.0;
    std::string name;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

constexpr std::size_t kMaxInput = 64 * 1024;
constexpr int kMaxDepth = 2000;

NodePtr make(Kind k, std::vector<NodePtr> args = {}, double number = 0.0, std::string name = {}) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->number = number;
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
}

int function_arity(const std::string& name) {
    if (name == "sin" || name == "cos" || name == "exp" || name == "log" || name == "abs" || name == "sqrt") {
        return 1;
    }
    if (name == "min" || name == "max") return 2;
    return -1;
}

bool is_variable(const std::string& name) {
    if (name == "v" || name == "t") return true;
    return name.size() == 2 && (name[0] == 'x' || name[0] == 'p') && name[1] >= '1' && name[1] <= '9';
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        NodePtr e = sum(0);
        skip_space();
        if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(what, line, col);
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    void enter(int depth) const {
        if (depth > kMaxDepth) fail("expression nested too deeply");
    }

    NodePtr sum(int depth) {
        enter(depth);
        NodePtr lhs = product(depth + 1);
        while (true) {
            if (accept('+')) {
                lhs = make(Kind::add, {lhs, product(depth + 1)});
            } else if (accept('-')) {
                lhs = make(Kind::sub, {lhs, product(depth + 1)});
            } else {
                return lhs;
            }
        }
    }

    NodePtr product(int depth) {
        enter(depth);
        NodePtr lhs = unary(depth + 1);
        while (true) {
            if (accept('*')) {
                lhs = make(Kind::mul, {lhs, unary(depth + 1)});
            } else if (accept('/')) {
                lhs = make(Kind::div, {lhs, unary(depth + 1)});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary(int depth) {
        enter(depth);
        if (accept('-')) return make(Kind::neg, {unary(depth + 1)});
        return power(depth + 1);
    }

    NodePtr power(int depth) {
        enter(depth);
        NodePtr base = primary(depth + 1);
        if (accept('^')) return make(Kind::pow, {base, unary(depth + 1)});
        return base;
    }

    NodePtr primary(int depth) {
        enter(depth);
        skip_space();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum(depth + 1);
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            const int arity = function_arity(name);
            if (arity > 0) {
                if (!accept('(')) fail_at("function '" + name + "' needs an argument list", start);
                std::vector<NodePtr> args{sum(depth + 1)};
                while (accept(',')) args.push_back(sum(depth + 1));
                expect(')');
                if (static_cast<int>(args.size()) != arity) {
                    fail_at("function '" + name + "' takes " + std::to_string(arity) + " argument(s)", start);
                }
                return make(Kind::call, std::move(args), 0.0, name);
            }
            if (is_variable(name)) return make(Kind::variable, {}, 0.0, name);
            fail_at("unknown identifier '" + name + "'", start);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        const std::string tok = s_.substr(start, pos_ - start);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || tok == ".") fail_at("malformed number '" + tok + "'", start);
        if (!std::isfinite(v)) fail_at("number out of range '" + tok + "'", start);
        return make(Kind::number, {}, v);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double lookup(const std::string& name, const Bindings& b) {
    if (name == "v") {
        if (!b.v) throw DomainError("unbound variable 'v'");
        return *b.v;
    }
    if (name == "t") {
        if (!b.t) throw DomainError("unbound variable 't'");
        return *b.t;
    }
    const Eigen::Index k = name[1] - '1';
    const Vec& src = name[0] == 'x' ? b.x : b.p;
    if (k >= src.size()) throw DomainError("unbound variable '" + name + "'");
    return src(k);
}

double eval_node(const Expr::Node& n, const Bindings& b) {
    switch (n.kind) {
        case Kind::number: return n.number;
        case Kind::variable: return lookup(n.name, b);
        case Kind::neg: return -eval_node(*n.args[0], b);
        case Kind::add: return eval_node(*n.args[0], b) + eval_node(*n.args[1], b);
        case Kind::sub: return eval_node(*n.args[0], b) - eval_node(*n.args[1], b);
        case Kind::mul: return eval_node(*n.args[0], b) * eval_node(*n.args[1], b);
        case Kind::div: {
            const double den = eval_node(*n.args[1], b);
            if (den == 0.0) throw DomainError("division by zero");
            return eval_node(*n.args[0], b) / den;
        }
        case Kind::pow: {
            const double r = std::pow(eval_node(*n.args[0], b), eval_node(*n.args[1], b));
            if (std::isnan(r)) throw DomainError("power of a negative base to a non-integer exponent");
            return r;
        }
        case Kind::call: {
            const double a = eval_node(*n.args[0], b);
            const std::string& f = n.name;
            if (f == "sin") return std::sin(a);
            if (f == "cos") return std::cos(a);
            if (f == "exp") return std::exp(a);
            if (f == "abs") return std::abs(a);
            if (f == "log") {
                if (!(a > 0.0)) throw DomainError("log of a nonpositive value");
                return std::log(a);
            }
            if (f == "sqrt") {
                if (a < 0.0) throw DomainError("sqrt of a negative value");
                return std::sqrt(a);
            }
            const double c = eval_node(*n.args[1], b);
            if (f == "min") return std::min(a, c);
            if (f == "max") return std::max(a, c);
            break;
        }
    }
    throw DomainError("unknown expression node");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print_node(const Expr::Node& n) {
    auto bin = [&](const char* op) {
        return "(" + print_node(*n.args[0]) + " " + op + " " + print_node(*n.args[1]) + ")";
    };
    switch (n.kind) {
        case Kind::number: return format_number(n.number);
        case Kind::variable: return n.name;
        case Kind::neg: return "(-" + print_node(*n.args[0]) + ")";
        case Kind::add: return bin("+");
        case Kind::sub: return bin("-");
        case Kind::mul: return bin("*");
        case Kind::div: return bin("/");
        case Kind::pow: return bin("^");
        case Kind::call: {
            std::string s = n.name + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += ", ";
                s += print_node(*n.args[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

bool equal_nodes(const Expr::Node& a, const Expr::Node& b) {
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
    if (a.kind == Kind::number && a.number != b.number) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!equal_nodes(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

void collect(const Expr::Node& n, std::set<std::string>& out) {
    if (n.kind == Kind::variable) out.insert(n.name);
    for (const auto& a : n.args) collect(*a, out);
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    if (text.size() > kMaxInput) throw ValidationError("expression longer than 64 KiB");
    Parser p(text);
    return Expr(p.parse());
}

double Expr::eval(const Bindings& b) const {
    if (!root_) throw DomainError("empty expression");
    const double v = eval_node(*root_, b);
    if (!std::isfinite(v)) throw DomainError("expression value is not finite");
    return v;
}

std::string Expr::print() const { return root_ ? print_node(*root_) : std::string(); }

std::set<std::string> Expr::variables() const {
    std::set<std::string> out;
    if (root_) collect(*root_, out);
    return out;
}

bool operator==(const Expr& a, const Expr& b) {
    if (!a.root_ || !b.root_) return !a.root_ && !b.root_;
    return equal_nodes(*a.root_, *b.root_);
}

Vec grad_expr(const Expr& e, const Bindings& b, double h) {
    if (!(h > 0.0)) throw ValidationError("grad_expr: step must be positive");
    Vec g(b.x.size());
    Bindings probe = b;
    for (Eigen::Index i = 0; i < b.x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(b.x(i)));
        probe.x(i) = b.x(i) + step;
        const double up = e.eval(probe);
        probe.x(i) = b.x(i) - step;
        const double down = e.eval(probe);
        probe.x(i) = b.x(i);
        g(i) = (up - down) / (2.0 * step);
    }
    return g;
}

}  // namespace bernstein
