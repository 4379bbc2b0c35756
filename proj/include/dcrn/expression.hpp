#pragma once

// Arithmetic expressions in one variable `s`, used for analytic initial
// histories such as "sin(s)+2".
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 's' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dcrn/errors.hpp"

namespace dcrn {

class ExpressionAst {
 public:
  enum class Kind { Constant, Variable, Sin, Cos, Exp, Neg, Add, Sub, Mul, Div, Pow };

  struct Node {
    Kind kind;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  static ExpressionAst parse(std::string_view text) {
    ExpressionAst ast;
    ast.source_ = std::string(text);
    Parser p{text, 0, ast.nodes_};
    ast.root_ = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected character");
    return ast;
  }

  double evaluate(double s) const { return eval(root_, s); }

  const std::string& source() const { return source_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  struct Parser {
    std::string_view text;
    std::size_t pos;
    std::vector<Node>& nodes;

    [[noreturn]] void fail(const std::string& what) const {
      throw ParseError("expression '" + std::string(text) + "': " + what +
                           " at offset " + std::to_string(pos),
                       0, 0);
    }

    void skip_ws() {
      while (pos < text.size() &&
             std::isspace(static_cast<unsigned char>(text[pos])))
        ++pos;
    }

    bool consume(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    int add(Kind k, int lhs = -1, int rhs = -1, double v = 0.0) {
      nodes.push_back({k, v, lhs, rhs});
      return static_cast<int>(nodes.size()) - 1;
    }

    int expr() {
      int lhs = term();
      for (;;) {
        if (consume('+')) lhs = add(Kind::Add, lhs, term());
        else if (consume('-')) lhs = add(Kind::Sub, lhs, term());
        else return lhs;
      }
    }

    int term() {
      int lhs = unary();
      for (;;) {
        if (consume('*')) lhs = add(Kind::Mul, lhs, unary());
        else if (consume('/')) lhs = add(Kind::Div, lhs, unary());
        else return lhs;
      }
    }

    int unary() {
      if (consume('-')) return add(Kind::Neg, unary());
      if (consume('+')) return unary();
      return power();
    }

    int power() {
      int base = primary();
      if (consume('^')) return add(Kind::Pow, base, unary());
      return base;
    }

    int primary() {
      skip_ws();
      if (pos >= text.size()) fail("unexpected end of input");
      const char c = text[pos];
      if (c == '(') {
        ++pos;
        int inner = expr();
        if (!consume(')')) fail("expected ')'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        double v = 0.0;
        auto [ptr, ec] =
            std::from_chars(text.data() + pos, text.data() + text.size(), v);
        if (ec != std::errc()) fail("bad number");
        pos = static_cast<std::size_t>(ptr - text.data());
        return add(Kind::Constant, -1, -1, v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < text.size() &&
               std::isalnum(static_cast<unsigned char>(text[pos])))
          ++pos;
        const auto ident = text.substr(start, pos - start);
        if (ident == "s") return add(Kind::Variable);
        Kind k;
        if (ident == "sin") k = Kind::Sin;
        else if (ident == "cos") k = Kind::Cos;
        else if (ident == "exp") k = Kind::Exp;
        else {
          pos = start;
          fail("unknown identifier '" + std::string(ident) + "'");
        }
        if (!consume('(')) fail("expected '(' after function name");
        int arg = expr();
        if (!consume(')')) fail("expected ')'");
        return add(k, arg);
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  double eval(int i, double s) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.kind) {
      case Kind::Constant: return n.value;
      case Kind::Variable: return s;
      case Kind::Sin: return std::sin(eval(n.lhs, s));
      case Kind::Cos: return std::cos(eval(n.lhs, s));
      case Kind::Exp: return std::exp(eval(n.lhs, s));
      case Kind::Neg: return -eval(n.lhs, s);
      case Kind::Add: return eval(n.lhs, s) + eval(n.rhs, s);
      case Kind::Sub: return eval(n.lhs, s) - eval(n.rhs, s);
      case Kind::Mul: return eval(n.lhs, s) * eval(n.rhs, s);
      case Kind::Div: return eval(n.lhs, s) / eval(n.rhs, s);
      case Kind::Pow: return std::pow(eval(n.lhs, s), eval(n.rhs, s));
    }
    return 0.0;
  }

  std::string source_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace dcrn
