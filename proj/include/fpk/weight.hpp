#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fpk/grid.hpp"

namespace fpk {

// Sign summary of a weight over the grid nodes.
enum class SignClass { zero, nonnegative, nonpositive, sign_changing };

const char* sign_class_name(SignClass c);

namespace detail {
struct ExprNode;
}

// A weight evaluated at the nodes of one grid.
struct BoundWeight {
  std::string expression;
  std::vector<double> values;
  SignClass sign_class = SignClass::zero;
  double sup_abs = 0.0;  // max_i |w(x_i)|

  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

// Parsed arithmetic expression in the variable x. Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' base)?
//   base   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')' | '-' base
//   func   := 'sin' | 'cos' | 'exp' | 'abs'
// Numbers may carry a decimal point and an exponent suffix (1.5e-2).
class WeightSpec {
 public:
  WeightSpec() = default;

  const std::string& expression() const { return expression_; }
  bool parsed() const { return static_cast<bool>(ast_); }

  // Throws Errc::eval_error on a non-finite value.
  double eval(double x) const;

  // Evaluates at every node, classifies the sign, caches sup |w|.
  BoundWeight on(const GridDomain& grid) const;

  friend WeightSpec parse_weight(const std::string& expression);

 private:
  std::string expression_;
  std::shared_ptr<const detail::ExprNode> ast_;
};

// Throws Errc::parse_error with the offending position in the message.
WeightSpec parse_weight(const std::string& expression);

}  // namespace fpk
