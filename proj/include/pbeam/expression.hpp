#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pbeam {

class ExpressionError : public std::invalid_argument {
 public:
  ExpressionError(const std::string& msg, std::size_t position)
      : std::invalid_argument(msg + " at position " + std::to_string(position)), position_(position) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Compiled arithmetic expression in one variable x.
///
/// Grammar: + - * / ^ (right-associative, binds tighter than unary minus),
/// parentheses, numbers, x, pi, e and the functions abs sign sqrt exp log
/// sin cos tan.
class Expression {
 public:
  Expression() = default;

  [[nodiscard]] static Expression parse(std::string_view text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ExpressionError("unexpected character '" + std::string(1, text[p.pos]) + "'", p.pos);
    e.source_ = std::string(text);
    return e;
  }

  [[nodiscard]] double operator()(double x) const { return root_ ? root_(x) : 0.0; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

 private:
  using Node = std::function<double(double)>;

  struct Parser {
    std::string_view text;
    std::size_t pos;

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Node parse_expr() {
      Node lhs = parse_term();
      for (;;) {
        if (accept('+')) {
          lhs = [l = lhs, r = parse_term()](double x) { return l(x) + r(x); };
        } else if (accept('-')) {
          lhs = [l = lhs, r = parse_term()](double x) { return l(x) - r(x); };
        } else {
          return lhs;
        }
      }
    }

    Node parse_term() {
      Node lhs = parse_unary();
      for (;;) {
        if (accept('*')) {
          lhs = [l = lhs, r = parse_unary()](double x) { return l(x) * r(x); };
        } else if (accept('/')) {
          lhs = [l = lhs, r = parse_unary()](double x) { return l(x) / r(x); };
        } else {
          return lhs;
        }
      }
    }

    Node parse_unary() {
      if (accept('-')) return [o = parse_unary()](double x) { return -o(x); };
      if (accept('+')) return parse_unary();
      return parse_power();
    }

    Node parse_power() {
      Node base = parse_primary();
      if (accept('^')) {
        Node exponent = parse_unary();
        return [b = base, e = exponent](double x) { return std::pow(b(x), e(x)); };
      }
      return base;
    }

    Node parse_primary() {
      skip_ws();
      if (pos >= text.size()) throw ExpressionError("unexpected end of expression", pos);
      const char c = text[pos];
      if (accept('(')) {
        Node inner = parse_expr();
        if (!accept(')')) throw ExpressionError("expected ')'", pos);
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
      throw ExpressionError("unexpected character '" + std::string(1, c) + "'", pos);
    }

    Node parse_number() {
      const std::size_t start = pos;
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(std::string(text.substr(start)), &used);
      } catch (const std::exception&) {
        throw ExpressionError("malformed number", start);
      }
      pos = start + used;
      return [value](double) { return value; };
    }

    Node parse_identifier() {
      const std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
      const std::string name(text.substr(start, pos - start));
      if (name == "x") return [](double x) { return x; };
      if (name == "pi") return [](double) { return std::numbers::pi; };
      if (name == "e") return [](double) { return std::numbers::e; };

      double (*fn)(double) = nullptr;
      if (name == "abs") fn = [](double v) { return std::abs(v); };
      else if (name == "sign") fn = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
      else if (name == "sqrt") fn = [](double v) { return std::sqrt(v); };
      else if (name == "exp") fn = [](double v) { return std::exp(v); };
      else if (name == "log") fn = [](double v) { return std::log(v); };
      else if (name == "sin") fn = [](double v) { return std::sin(v); };
      else if (name == "cos") fn = [](double v) { return std::cos(v); };
      else if (name == "tan") fn = [](double v) { return std::tan(v); };
      else throw ExpressionError("unknown identifier '" + name + "'", start);

      if (!accept('(')) throw ExpressionError("expected '(' after " + name, pos);
      Node arg = parse_expr();
      if (!accept(')')) throw ExpressionError("expected ')'", pos);
      return [fn, a = std::move(arg)](double x) { return fn(a(x)); };
    }
  };

  Node root_;
  std::string source_;
};

}  // namespace pbeam
