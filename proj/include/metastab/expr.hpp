#pragma once

#include <functional>
#include <string>

namespace metastab {

/// A real function of the player count n, parsed from text.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'n' | 'e' | fn '(' expr ')' | '(' expr ')'
///   fn      := exp | log | ln | sqrt
///
/// '^' is right-associative; log is natural.
class NExpr {
public:
    NExpr() = default;
    static NExpr parse(const std::string& text);

    double operator()(double n) const { return fn_(n); }
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::function<double(double)> fn_ = [](double) { return 0.0; };
};

}  // namespace metastab
