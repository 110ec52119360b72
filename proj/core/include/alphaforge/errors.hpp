#pragma once

#include <stdexcept>
#include <string>

namespace alphaforge {

struct SourcePos {
    int line = 1;
    int column = 1;
};

/// Lex/parse/validate failure; carries the offending source position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourcePos pos)
        : std::runtime_error(msg + " (line " + std::to_string(pos.line) +
                             ", column " + std::to_string(pos.column) + ")"),
          pos(pos) {}
    SourcePos pos;
};

/// Bad or inconsistent market data (ingestion, invariant violations).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation-time failure (missing input, insufficient history).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace alphaforge
