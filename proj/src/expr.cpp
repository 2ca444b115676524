#include "metastab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "metastab/errors.hpp"

namespace metastab {

namespace {

using Fn = std::function<double(double)>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Fn run() {
        Fn f = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("expression \"" + s_ + "\" at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Fn expr() {
        Fn lhs = term();
        for (;;) {
            if (eat('+')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double n) { return lhs(n) + rhs(n); };
            } else if (eat('-')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double n) { return lhs(n) - rhs(n); };
            } else {
                return lhs;
            }
        }
    }

    Fn term() {
        Fn lhs = unary();
        for (;;) {
            if (eat('*')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](double n) { return lhs(n) * rhs(n); };
            } else if (eat('/')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](double n) { return lhs(n) / rhs(n); };
            } else {
                return lhs;
            }
        }
    }

    Fn unary() {
        if (eat('-')) {
            Fn inner = unary();
            return [inner](double n) { return -inner(n); };
        }
        return power();
    }

    Fn power() {
        Fn base = primary();
        if (eat('^')) {
            Fn ex = unary();
            return [base, ex](double n) { return std::pow(base(n), ex(n)); };
        }
        return base;
    }

    Fn primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return [v](double) { return v; };
        }
        if (c == '(') {
            ++pos_;
            Fn inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string word = s_.substr(start, pos_ - start);
            if (word == "n") return [](double n) { return n; };
            if (word == "e") return [](double) { return std::exp(1.0); };
            double (*f)(double) = nullptr;
            if (word == "exp") f = [](double x) { return std::exp(x); };
            if (word == "log" || word == "ln") f = [](double x) { return std::log(x); };
            if (word == "sqrt") f = [](double x) { return std::sqrt(x); };
            if (!f) {
                pos_ = start;
                fail("unknown identifier '" + word + "' (allowed: n, e, exp, log, ln, sqrt)");
            }
            if (!eat('(')) fail("expected '(' after " + word);
            Fn arg = expr();
            if (!eat(')')) fail("expected ')'");
            return [f, arg](double n) { return f(arg(n)); };
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

NExpr NExpr::parse(const std::string& text) {
    NExpr e;
    e.fn_ = Parser(text).run();
    e.text_ = text;
    return e;
}

}  // namespace metastab
