#pragma once

// Restricted arithmetic expressions over the variables x and t, used for the
// coefficient/data fields of run configurations: numbers, + - * / ^ (right
// associative), parentheses, the constants pi and e, and a small function
// set. Parsed once into a flat AST, evaluated many times.

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "fracvisco/errors.hpp"

namespace fracvisco::expr {

class Expression {
public:
    static Expression parse(const std::string& text) {
        Parser p{text, 0};
        Expression e;
        e.text_ = text;
        e.root_ = p.parse_expr(e.nodes_);
        p.skip_ws();
        if (p.pos != text.size())
            throw ConfigError("expression: unexpected trailing input at position " +
                              std::to_string(p.pos + 1) + " in '" + text + "'");
        return e;
    }

    double eval(double x, double t) const { return eval_node(root_, x, t); }

    bool depends_on(char var) const {
        for (const auto& n : nodes_)
            if ((var == 'x' && n.op == Op::var_x) || (var == 't' && n.op == Op::var_t))
                return true;
        return false;
    }

    const std::string& text() const noexcept { return text_; }

private:
    enum class Op {
        number, var_x, var_t, neg, add, sub, mul, div, pow,
        sin, cos, tan, exp, log, sqrt, abs, fmin, fmax
    };
    struct Node {
        Op op;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    struct Parser {
        const std::string& s;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ConfigError("expression: " + msg + " at position " + std::to_string(pos + 1) +
                              " in '" + s + "'");
        }
        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        int parse_expr(std::vector<Node>& out) {
            int lhs = parse_term(out);
            for (;;) {
                if (eat('+')) {
                    int rhs = parse_term(out);
                    lhs = push(out, {Op::add, 0.0, lhs, rhs});
                } else if (eat('-')) {
                    int rhs = parse_term(out);
                    lhs = push(out, {Op::sub, 0.0, lhs, rhs});
                } else {
                    return lhs;
                }
            }
        }
        int parse_term(std::vector<Node>& out) {
            int lhs = parse_factor(out);
            for (;;) {
                if (eat('*')) {
                    int rhs = parse_factor(out);
                    lhs = push(out, {Op::mul, 0.0, lhs, rhs});
                } else if (eat('/')) {
                    int rhs = parse_factor(out);
                    lhs = push(out, {Op::div, 0.0, lhs, rhs});
                } else {
                    return lhs;
                }
            }
        }
        int parse_factor(std::vector<Node>& out) {
            int base = parse_unary(out);
            if (eat('^')) {
                int exp = parse_factor(out); // right associative
                return push(out, {Op::pow, 0.0, base, exp});
            }
            return base;
        }
        int parse_unary(std::vector<Node>& out) {
            if (eat('-')) return push(out, {Op::neg, 0.0, parse_unary(out), -1});
            if (eat('+')) return parse_unary(out);
            return parse_primary(out);
        }
        int parse_primary(std::vector<Node>& out) {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of input");
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                char* end = nullptr;
                const double v = std::strtod(s.c_str() + pos, &end);
                if (end == s.c_str() + pos) fail("bad number");
                pos = static_cast<std::size_t>(end - s.c_str());
                return push(out, {Op::number, v, -1, -1});
            }
            if (c == '(') {
                ++pos;
                int e = parse_expr(out);
                if (!eat(')')) fail("missing ')'");
                return e;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = pos;
                while (pos < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                    ++pos;
                const std::string name = s.substr(start, pos - start);
                if (name == "x") return push(out, {Op::var_x, 0.0, -1, -1});
                if (name == "t") return push(out, {Op::var_t, 0.0, -1, -1});
                if (name == "pi") return push(out, {Op::number, M_PI, -1, -1});
                if (name == "e") return push(out, {Op::number, M_E, -1, -1});
                const Op fn = function_by_name(name);
                if (!eat('(')) fail("expected '(' after function '" + name + "'");
                int a = parse_expr(out);
                int b = -1;
                if (fn == Op::pow || fn == Op::fmin || fn == Op::fmax) {
                    if (!eat(',')) fail("function '" + name + "' needs two arguments");
                    b = parse_expr(out);
                }
                if (!eat(')')) fail("missing ')' after function arguments");
                return push(out, {fn, 0.0, a, b});
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        Op function_by_name(const std::string& name) const {
            if (name == "sin") return Op::sin;
            if (name == "cos") return Op::cos;
            if (name == "tan") return Op::tan;
            if (name == "exp") return Op::exp;
            if (name == "log") return Op::log;
            if (name == "sqrt") return Op::sqrt;
            if (name == "abs") return Op::abs;
            if (name == "pow") return Op::pow;
            if (name == "min") return Op::fmin;
            if (name == "max") return Op::fmax;
            fail("unknown identifier '" + name + "'");
        }
        static int push(std::vector<Node>& out, Node n) {
            out.push_back(n);
            return static_cast<int>(out.size()) - 1;
        }
    };

    double eval_node(int i, double x, double t) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::number: return n.value;
            case Op::var_x: return x;
            case Op::var_t: return t;
            case Op::neg: return -eval_node(n.lhs, x, t);
            case Op::add: return eval_node(n.lhs, x, t) + eval_node(n.rhs, x, t);
            case Op::sub: return eval_node(n.lhs, x, t) - eval_node(n.rhs, x, t);
            case Op::mul: return eval_node(n.lhs, x, t) * eval_node(n.rhs, x, t);
            case Op::div: return eval_node(n.lhs, x, t) / eval_node(n.rhs, x, t);
            case Op::pow: return std::pow(eval_node(n.lhs, x, t), eval_node(n.rhs, x, t));
            case Op::sin: return std::sin(eval_node(n.lhs, x, t));
            case Op::cos: return std::cos(eval_node(n.lhs, x, t));
            case Op::tan: return std::tan(eval_node(n.lhs, x, t));
            case Op::exp: return std::exp(eval_node(n.lhs, x, t));
            case Op::log: return std::log(eval_node(n.lhs, x, t));
            case Op::sqrt: return std::sqrt(eval_node(n.lhs, x, t));
            case Op::abs: return std::abs(eval_node(n.lhs, x, t));
            case Op::fmin: return std::fmin(eval_node(n.lhs, x, t), eval_node(n.rhs, x, t));
            case Op::fmax: return std::fmax(eval_node(n.lhs, x, t), eval_node(n.rhs, x, t));
        }
        return 0.0;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;
};

} // namespace fracvisco::expr
