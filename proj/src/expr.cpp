#include "etdelay/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <system_error>

namespace etdelay {

ExprSyntaxError::ExprSyntaxError(std::size_t position, const std::string& message)
    : InputError("syntax error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

ExprDomainError::ExprDomainError(std::string subexpr, const std::string& message)
    : NumericError(message + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}

namespace {

using Kind = ExprNode::Kind;

struct FuncName {
    std::string_view name;
    ExprFunc func;
};

constexpr std::array<FuncName, 5> kFuncs{{
    {"sin", ExprFunc::Sin},
    {"cos", ExprFunc::Cos},
    {"exp", ExprFunc::Exp},
    {"ln", ExprFunc::Ln},
    {"abs", ExprFunc::Abs},
}};

std::string_view func_name(ExprFunc f) {
    for (const auto& entry : kFuncs) {
        if (entry.func == f) return entry.name;
    }
    return "?";
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool is_reserved(std::string_view id) {
    if (id == "pi" || id == "e") return true;
    for (const auto& entry : kFuncs) {
        if (entry.name == id) return true;
    }
    return false;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

class Parser {
public:
    Parser(std::string_view src, std::string_view var) : src_(src), var_(var) {}

    ExprNodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ExprSyntaxError(pos_, "empty expression");
        auto node = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ExprSyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
        }
        return node;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ExprSyntaxError(pos_, std::string("expected '") + c + "'" + found());
        }
    }

    std::string found() const {
        if (pos_ >= src_.size()) return ", found end of input";
        return std::string(", found '") + src_[pos_] + "'";
    }

    ExprNodePtr expr() {
        auto node = term();
        for (;;) {
            if (accept('+')) {
                node = ExprNode::binary(Kind::Add, node, term());
            } else if (accept('-')) {
                node = ExprNode::binary(Kind::Sub, node, term());
            } else {
                return node;
            }
        }
    }

    ExprNodePtr term() {
        auto node = factor();
        for (;;) {
            if (accept('*')) {
                node = ExprNode::binary(Kind::Mul, node, factor());
            } else if (accept('/')) {
                node = ExprNode::binary(Kind::Div, node, factor());
            } else {
                return node;
            }
        }
    }

    ExprNodePtr factor() {
        if (accept('-')) return ExprNode::negate(factor());
        auto node = base();
        if (accept('^')) {
            skip_ws();
            if (pos_ >= src_.size() || !(is_digit(src_[pos_]) || src_[pos_] == '.')) {
                throw ExprSyntaxError(pos_, "exponent must be a numeric literal" + found());
            }
            node = ExprNode::power(node, number());
        }
        return node;
    }

    ExprNodePtr base() {
        skip_ws();
        if (pos_ >= src_.size()) throw ExprSyntaxError(pos_, "unexpected end of input");
        const char c = src_[pos_];
        if (is_digit(c) || c == '.') return ExprNode::number(number());
        if (c == '(') {
            ++pos_;
            auto node = expr();
            expect(')');
            return node;
        }
        if (is_ident_start(c)) return identifier();
        throw ExprSyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    double number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        // Exponent only when digits follow, so "2*e" and "2e" stay distinct.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && is_digit(src_[look])) {
                pos_ = look;
                while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            throw ExprSyntaxError(start, "malformed number");
        }
        return value;
    }

    ExprNodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string_view id = src_.substr(start, pos_ - start);
        for (const auto& entry : kFuncs) {
            if (entry.name == id) {
                expect('(');
                auto arg = expr();
                expect(')');
                return ExprNode::call(entry.func, arg);
            }
        }
        if (id == "pi") return ExprNode::number(std::numbers::pi);
        if (id == "e") return ExprNode::number(std::numbers::e);
        if (id == var_) return ExprNode::variable();
        throw ExprSyntaxError(start, "unknown identifier '" + std::string(id) + "'");
    }

    std::string_view src_;
    std::string_view var_;
    std::size_t pos_ = 0;
};

double checked(double v, const ExprNode& node, std::string_view var, const char* what) {
    if (!std::isfinite(v)) throw ExprDomainError(to_string(node, var), what);
    return v;
}

double eval_node(const ExprNode& node, double x, std::string_view var) {
    switch (node.kind) {
    case Kind::Number:
        return node.value;
    case Kind::Variable:
        return x;
    case Kind::Add:
        return checked(eval_node(*node.lhs, x, var) + eval_node(*node.rhs, x, var), node, var,
                       "overflow");
    case Kind::Sub:
        return checked(eval_node(*node.lhs, x, var) - eval_node(*node.rhs, x, var), node, var,
                       "overflow");
    case Kind::Mul:
        return checked(eval_node(*node.lhs, x, var) * eval_node(*node.rhs, x, var), node, var,
                       "overflow");
    case Kind::Div: {
        const double num = eval_node(*node.lhs, x, var);
        const double den = eval_node(*node.rhs, x, var);
        if (den == 0.0) throw ExprDomainError(to_string(node, var), "division by zero");
        return checked(num / den, node, var, "overflow");
    }
    case Kind::Neg:
        return -eval_node(*node.lhs, x, var);
    case Kind::Pow:
        return checked(std::pow(eval_node(*node.lhs, x, var), node.value), node, var,
                       "power undefined or overflowed");
    case Kind::Call: {
        const double arg = eval_node(*node.lhs, x, var);
        switch (node.func) {
        case ExprFunc::Sin:
            return std::sin(arg);
        case ExprFunc::Cos:
            return std::cos(arg);
        case ExprFunc::Exp:
            return checked(std::exp(arg), node, var, "overflow");
        case ExprFunc::Ln:
            if (!(arg > 0.0)) {
                throw ExprDomainError(to_string(node, var), "logarithm of non-positive value");
            }
            return std::log(arg);
        case ExprFunc::Abs:
            return std::abs(arg);
        }
        break;
    }
    }
    throw ExprDomainError(to_string(node, var), "corrupt expression node");
}

} // namespace

ExprNodePtr ExprNode::number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
}

ExprNodePtr ExprNode::variable() {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Variable;
    return n;
}

ExprNodePtr ExprNode::binary(Kind k, ExprNodePtr a, ExprNodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

ExprNodePtr ExprNode::negate(ExprNodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Neg;
    n->lhs = std::move(a);
    return n;
}

ExprNodePtr ExprNode::power(ExprNodePtr base, double exponent) {
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
        throw InputError("power exponent must be a finite non-negative literal");
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->lhs = std::move(base);
    n->value = exponent;
    return n;
}

ExprNodePtr ExprNode::call(ExprFunc f, ExprNodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

std::string to_string(const ExprNode& node, std::string_view var) {
    auto bin = [&](const char* op) {
        return "(" + to_string(*node.lhs, var) + op + to_string(*node.rhs, var) + ")";
    };
    switch (node.kind) {
    case Kind::Number:
        if (std::signbit(node.value)) return "(-" + format_double(-node.value) + ")";
        return format_double(node.value);
    case Kind::Variable:
        return std::string(var);
    case Kind::Add:
        return bin("+");
    case Kind::Sub:
        return bin("-");
    case Kind::Mul:
        return bin("*");
    case Kind::Div:
        return bin("/");
    case Kind::Neg:
        return "(-" + to_string(*node.lhs, var) + ")";
    case Kind::Pow:
        return "(" + to_string(*node.lhs, var) + "^" + format_double(node.value) + ")";
    case Kind::Call:
        return std::string(func_name(node.func)) + "(" + to_string(*node.lhs, var) + ")";
    }
    return "?";
}

ScalarExpr::ScalarExpr(ExprNodePtr root, std::string var_name, std::string source)
    : root_(std::move(root)), var_(std::move(var_name)), source_(std::move(source)) {
    if (!root_) throw InputError("expression has no root");
    if (source_.empty()) source_ = to_string();
}

double ScalarExpr::operator()(double x) const { return eval_node(*root_, x, var_); }

std::string ScalarExpr::to_string() const { return etdelay::to_string(*root_, var_); }

ScalarExpr parse_expr(std::string_view src, std::string_view var_name) {
    if (var_name.empty() || !is_ident_start(var_name.front())) {
        throw InputError("invalid variable name '" + std::string(var_name) + "'");
    }
    for (char c : var_name) {
        if (!is_ident_char(c)) throw InputError("invalid variable name '" + std::string(var_name) + "'");
    }
    if (is_reserved(var_name)) {
        throw InputError("variable name '" + std::string(var_name) + "' is reserved");
    }
    Parser parser(src, var_name);
    return ScalarExpr(parser.parse(), std::string(var_name), std::string(src));
}

} // namespace etdelay
