#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "alphaforge/errors.hpp"

namespace alphaforge {

enum class TokenKind { Number, Identifier, DottedIdentifier, Operator, Punct, End };

struct Token {
    TokenKind kind;
    std::string text; // canonical (lower-case for identifiers)
    double value = 0.0;
    SourcePos pos;
};

/// Splits alpha source text into tokens. Identifiers are canonicalized to
/// lower case ("Ts_Rank" and "ts_rank" lex identically); "IndClass.sector"
/// lexes as one dotted identifier. Number forms "2.", ".001", "0.5", "250"
/// are all accepted.
std::vector<Token> tokenize(std::string_view source);

enum class ExprKind { Number, Input, Group, Unary, Binary, Ternary, Call };

enum class BinOp { Add, Sub, Mul, Div, Pow, Lt, Gt, Le, Ge, Eq, Or };

const char* to_string(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double number = 0.0;   // Number
    std::string name;      // Input name / Group level / Call function
    BinOp bin = BinOp::Add;
    std::vector<ExprPtr> args; // children (Unary:1, Binary:2, Ternary:3, Call:n)

    static ExprPtr make_number(double v);
    static ExprPtr make_input(std::string name);
    static ExprPtr make_group(std::string level);
    static ExprPtr make_negate(ExprPtr child);
    static ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr make_ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
    static ExprPtr make_call(std::string fn, std::vector<ExprPtr> args);
};

/// Parses one expression. Precedence, loosest to tightest:
///   ?: (right) | "||" | comparisons (non-assoc) | + - | * / | unary - | ^ (right)
/// Parentheses override; function calls are primary expressions.
ExprPtr parse(std::string_view source);

/// Fully parenthesized canonical form; parse(pretty_print(e)) is
/// structurally identical to e.
std::string pretty_print(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

} // namespace alphaforge
