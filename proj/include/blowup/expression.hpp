#pragma once

// Scalar expressions in one variable: numbers, + - * / ^, unary minus,
// sin cos exp log sqrt and parentheses.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" factor)?
//   base   := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")" | "-" base

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace blowup {

class Expression {
 public:
  enum class Op { number, variable, add, sub, mul, div, pow, neg, sin, cos, exp, log, sqrt };

  /// Parses `text` with `variable` as the only admissible identifier.
  /// Throws ParseError carrying the offending position.
  static Expression parse(std::string_view text, char variable = 'u');

  static Expression number(double value, char variable = 'u');
  static Expression var(char variable = 'u');
  static Expression unary(Op op, const Expression& arg);
  static Expression binary(Op op, const Expression& lhs, const Expression& rhs);

  /// Throws EvaluationError on division by zero, log or sqrt outside their
  /// domain, or any non-finite intermediate.
  double operator()(double x) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  char variable() const { return variable_; }
  int depth() const;

  struct Node;  // opaque AST node

 private:
  struct Instr {
    Op op;
    double value;
  };
  Expression(std::shared_ptr<const Node> root, char variable);
  void compile();

  std::shared_ptr<const Node> root_;
  std::vector<Instr> program_;  // postfix form of root_
  std::size_t max_stack_ = 0;
  char variable_ = 'u';
};

}  // namespace blowup
