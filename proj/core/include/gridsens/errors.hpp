#pragma once

#include <stdexcept>
#include <string>

namespace gridsens {

/// Malformed or unreadable input (case files, configs). CLI maps this to exit 1.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_ = -1;
};

/// Violated numerical precondition or infeasible analysis. CLI maps this to exit 2.
class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridsens
