#include "alphaforge/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "alphaforge/market_data.hpp"

namespace alphaforge {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

} // namespace

std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, column = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (source[i + k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        i += n;
    };

    bool any = false;
    while (i < source.size()) {
        const char c = source[i];
        const SourcePos pos{line, column};
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        any = true;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < source.size() &&
             std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            std::size_t j = i;
            while (j < source.size() && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            if (j < source.size() && source[j] == '.') {
                ++j;
                while (j < source.size() && std::isdigit(static_cast<unsigned char>(source[j])))
                    ++j;
            }
            std::string text(source.substr(i, j - i));
            double value = 0.0;
            // forms like "2." need a trailing-zero assist for from_chars
            std::string numeric = text;
            if (numeric.back() == '.') numeric += '0';
            if (numeric.front() == '.') numeric.insert(numeric.begin(), '0');
            auto [ptr, ec] =
                std::from_chars(numeric.data(), numeric.data() + numeric.size(), value);
            if (ec != std::errc() || ptr != numeric.data() + numeric.size() ||
                !std::isfinite(value))
                throw ParseError("malformed number '" + text + "'", pos);
            out.push_back({TokenKind::Number, text, value, pos});
            advance(j - i);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < source.size() && ident_char(source[j])) ++j;
            bool dotted = false;
            if (j + 1 < source.size() && source[j] == '.' && ident_start(source[j + 1])) {
                dotted = true;
                ++j;
                while (j < source.size() && ident_char(source[j])) ++j;
            }
            std::string text(source.substr(i, j - i));
            for (char& ch : text) ch = to_lower(ch);
            out.push_back({dotted ? TokenKind::DottedIdentifier : TokenKind::Identifier, text,
                           0.0, pos});
            advance(j - i);
            continue;
        }
        switch (c) {
            case '(': case ')': case ',': case '?': case ':':
                out.push_back({TokenKind::Punct, std::string(1, c), 0.0, pos});
                advance(1);
                continue;
            case '+': case '-': case '*': case '/': case '^':
                out.push_back({TokenKind::Operator, std::string(1, c), 0.0, pos});
                advance(1);
                continue;
            case '<': case '>':
                if (i + 1 < source.size() && source[i + 1] == '=') {
                    out.push_back({TokenKind::Operator, std::string(1, c) + "=", 0.0, pos});
                    advance(2);
                } else {
                    out.push_back({TokenKind::Operator, std::string(1, c), 0.0, pos});
                    advance(1);
                }
                continue;
            case '=':
                if (i + 1 < source.size() && source[i + 1] == '=') {
                    out.push_back({TokenKind::Operator, "==", 0.0, pos});
                    advance(2);
                    continue;
                }
                throw ParseError("unexpected character '='; did you mean '=='?", pos);
            case '|':
                if (i + 1 < source.size() && source[i + 1] == '|') {
                    out.push_back({TokenKind::Operator, "||", 0.0, pos});
                    advance(2);
                    continue;
                }
                throw ParseError("unexpected character '|'; did you mean '||'?", pos);
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", pos);
        }
    }
    if (!any) throw ParseError("empty expression", {line, column});
    out.push_back({TokenKind::End, "", 0.0, {line, column}});
    return out;
}

const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Pow: return "^";
        case BinOp::Lt: return "<";
        case BinOp::Gt: return ">";
        case BinOp::Le: return "<=";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Or: return "||";
    }
    return "?";
}

ExprPtr Expr::make_number(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Number;
    e->number = v;
    return e;
}
ExprPtr Expr::make_input(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Input;
    e->name = std::move(name);
    return e;
}
ExprPtr Expr::make_group(std::string level) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Group;
    e->name = std::move(level);
    return e;
}
ExprPtr Expr::make_negate(ExprPtr child) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->args = {std::move(child)};
    return e;
}
ExprPtr Expr::make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->bin = op;
    e->args = {std::move(lhs), std::move(rhs)};
    return e;
}
ExprPtr Expr::make_ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Ternary;
    e->args = {std::move(cond), std::move(then_e), std::move(else_e)};
    return e;
}
ExprPtr Expr::make_call(std::string fn, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Call;
    e->name = std::move(fn);
    e->args = std::move(args);
    return e;
}

namespace {

// Recursive-descent parser over the fixed precedence ladder.
class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ExprPtr parse_expression() {
        ExprPtr e = parse_ternary();
        if (!at_end())
            throw ParseError("trailing tokens after expression, starting with '" +
                                 peek().text + "'",
                             peek().pos);
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }
    bool at_end() const { return peek().kind == TokenKind::End; }

    bool match_op(const char* text) {
        if (peek().kind == TokenKind::Operator && peek().text == text) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool match_punct(char c) {
        if (peek().kind == TokenKind::Punct && peek().text[0] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_punct(char c, const char* what) {
        if (!match_punct(c))
            throw ParseError(std::string("expected '") + c + "' " + what + ", found '" +
                                 (at_end() ? "end of input" : peek().text) + "'",
                             peek().pos);
    }

    // ternary ?: (right-associative, loosest)
    ExprPtr parse_ternary() {
        ExprPtr cond = parse_or();
        if (match_punct('?')) {
            ExprPtr then_e = parse_ternary();
            expect_punct(':', "in conditional expression");
            ExprPtr else_e = parse_ternary();
            return Expr::make_ternary(std::move(cond), std::move(then_e), std::move(else_e));
        }
        return cond;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_comparison();
        while (match_op("||"))
            lhs = Expr::make_binary(BinOp::Or, std::move(lhs), parse_comparison());
        return lhs;
    }

    // comparisons are non-associative: a < b < c is a parse error
    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        const Token& t = peek();
        BinOp op;
        if (t.kind == TokenKind::Operator && t.text == "<") op = BinOp::Lt;
        else if (t.kind == TokenKind::Operator && t.text == ">") op = BinOp::Gt;
        else if (t.kind == TokenKind::Operator && t.text == "<=") op = BinOp::Le;
        else if (t.kind == TokenKind::Operator && t.text == ">=") op = BinOp::Ge;
        else if (t.kind == TokenKind::Operator && t.text == "==") op = BinOp::Eq;
        else return lhs;
        ++pos_;
        ExprPtr rhs = parse_additive();
        const Token& next = peek();
        if (next.kind == TokenKind::Operator &&
            (next.text == "<" || next.text == ">" || next.text == "<=" || next.text == ">=" ||
             next.text == "=="))
            throw ParseError("comparison operators do not chain; parenthesize", next.pos);
        return Expr::make_binary(op, std::move(lhs), std::move(rhs));
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        for (;;) {
            if (match_op("+"))
                lhs = Expr::make_binary(BinOp::Add, std::move(lhs), parse_multiplicative());
            else if (match_op("-"))
                lhs = Expr::make_binary(BinOp::Sub, std::move(lhs), parse_multiplicative());
            else
                return lhs;
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (match_op("*"))
                lhs = Expr::make_binary(BinOp::Mul, std::move(lhs), parse_unary());
            else if (match_op("/"))
                lhs = Expr::make_binary(BinOp::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (match_op("-")) return Expr::make_negate(parse_unary());
        return parse_power();
    }

    // ^ binds tightest of the operators, right-associative
    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (match_op("^")) return Expr::make_binary(BinOp::Pow, std::move(base), parse_unary());
        return base;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number:
                ++pos_;
                return Expr::make_number(t.value);
            case TokenKind::DottedIdentifier: {
                ++pos_;
                const std::string& text = t.text;
                const auto dot = text.find('.');
                const std::string head = text.substr(0, dot);
                const std::string tail = text.substr(dot + 1);
                if (head != "indclass")
                    throw ParseError("unknown dotted identifier '" + text + "'", t.pos);
                if (!industry_level_from_string(tail))
                    throw ParseError("unknown industry level '" + tail + "'", t.pos);
                return Expr::make_group(tail);
            }
            case TokenKind::Identifier: {
                ++pos_;
                if (match_punct('(')) {
                    std::vector<ExprPtr> args;
                    if (!match_punct(')')) {
                        args.push_back(parse_ternary());
                        while (match_punct(',')) args.push_back(parse_ternary());
                        expect_punct(')', "to close argument list (unbalanced parenthesis)");
                    }
                    return Expr::make_call(t.text, std::move(args));
                }
                return Expr::make_input(t.text);
            }
            case TokenKind::Punct:
                if (t.text == "(") {
                    ++pos_;
                    ExprPtr inner = parse_ternary();
                    expect_punct(')', "to close parenthesized expression (unbalanced parenthesis)");
                    return inner;
                }
                if (t.text == "?" || t.text == ":")
                    throw ParseError("misplaced '" + t.text + "' in conditional expression",
                                     t.pos);
                throw ParseError("unexpected '" + t.text + "'; expected an expression", t.pos);
            case TokenKind::Operator:
                throw ParseError("unexpected operator '" + t.text + "'; expected an expression",
                                 t.pos);
            case TokenKind::End:
                throw ParseError("unexpected end of input; expected an expression", t.pos);
        }
        throw ParseError("unexpected token", t.pos);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void print(const Expr& e, std::string& out) {
    char buf[64];
    switch (e.kind) {
        case ExprKind::Number:
            std::snprintf(buf, sizeof buf, "%.17g", e.number);
            out += buf;
            return;
        case ExprKind::Input:
            out += e.name;
            return;
        case ExprKind::Group:
            out += "indclass.";
            out += e.name;
            return;
        case ExprKind::Unary:
            out += "(-";
            print(*e.args[0], out);
            out += ')';
            return;
        case ExprKind::Binary:
            out += '(';
            print(*e.args[0], out);
            out += ' ';
            out += to_string(e.bin);
            out += ' ';
            print(*e.args[1], out);
            out += ')';
            return;
        case ExprKind::Ternary:
            out += '(';
            print(*e.args[0], out);
            out += " ? ";
            print(*e.args[1], out);
            out += " : ";
            print(*e.args[2], out);
            out += ')';
            return;
        case ExprKind::Call:
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                print(*e.args[i], out);
            }
            out += ')';
            return;
    }
}

} // namespace

ExprPtr parse(std::string_view source) {
    Parser p(tokenize(source));
    return p.parse_expression();
}

std::string pretty_print(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Number:
            return a.number == b.number || (std::isnan(a.number) && std::isnan(b.number));
        case ExprKind::Input:
        case ExprKind::Group:
            return a.name == b.name;
        case ExprKind::Binary:
            if (a.bin != b.bin) return false;
            break;
        case ExprKind::Call:
            if (a.name != b.name) return false;
            break;
        default:
            break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

} // namespace alphaforge
