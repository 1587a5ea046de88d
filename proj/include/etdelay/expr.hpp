#pragma once

// Scalar expressions of one variable, used for the delay function tau(t)
// and the initial functions phi_i(s).
//
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" number)?
//   base   := number | ident | "(" expr ")" | func "(" expr ")"
//   func   := "sin" | "cos" | "exp" | "ln" | "abs"
//
// `pi` and `e` are reserved constants; the variable name is chosen by the
// caller. Parsed expressions are immutable and can be shared across threads.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "etdelay/error.hpp"

namespace etdelay {

class ExprSyntaxError : public InputError {
public:
    ExprSyntaxError(std::size_t position, const std::string& message);
    /// Zero-based byte offset into the source text.
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class ExprDomainError : public NumericError {
public:
    ExprDomainError(std::string subexpr, const std::string& message);
    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

enum class ExprFunc { Sin, Cos, Exp, Ln, Abs };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };

    Kind kind = Kind::Number;
    double value = 0.0;  // literal for Number, exponent for Pow
    ExprFunc func = ExprFunc::Sin;
    ExprNodePtr lhs;
    ExprNodePtr rhs;

    static ExprNodePtr number(double v);
    static ExprNodePtr variable();
    static ExprNodePtr binary(Kind k, ExprNodePtr a, ExprNodePtr b);
    static ExprNodePtr negate(ExprNodePtr a);
    static ExprNodePtr power(ExprNodePtr base, double exponent);
    static ExprNodePtr call(ExprFunc f, ExprNodePtr arg);
};

class ScalarExpr {
public:
    ScalarExpr(ExprNodePtr root, std::string var_name, std::string source = {});

    /// Evaluates at `x`. Throws ExprDomainError for ln of a non-positive
    /// argument, division by zero, or any other non-finite intermediate.
    double operator()(double x) const;

    /// Fully parenthesised text that parses back to an equivalent tree.
    std::string to_string() const;

    const std::string& var_name() const noexcept { return var_; }
    /// The text this expression was parsed from (or to_string() if built
    /// programmatically).
    const std::string& source() const noexcept { return source_; }
    const ExprNodePtr& root() const noexcept { return root_; }

private:
    ExprNodePtr root_;
    std::string var_;
    std::string source_;
};

ScalarExpr parse_expr(std::string_view src, std::string_view var_name);

inline double eval_expr(const ScalarExpr& e, double x) { return e(x); }

std::string to_string(const ExprNode& node, std::string_view var_name);

} // namespace etdelay
