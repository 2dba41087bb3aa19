#include "fpk/weight.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace fpk {

const char* sign_class_name(SignClass c) {
  switch (c) {
    case SignClass::zero: return "zero";
    case SignClass::nonnegative: return "nonnegative";
    case SignClass::nonpositive: return "nonpositive";
    case SignClass::sign_changing: return "sign_changing";
  }
  return "?";
}

namespace detail {

enum class Op { add, sub, mul, div, pow, neg, sin, cos, exp, abs, num, var, pi };

struct ExprNode {
  Op op;
  double value = 0.0;  // for num
  std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    std::ostringstream os;
    os << what << " at position " << pos_ << " in \"" << s_ << "\"";
    fail(Errc::parse_error, os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (consume('+')) {
        lhs = make(Op::add, lhs, term());
      } else if (consume('-')) {
        lhs = make(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      if (consume('*')) {
        lhs = make(Op::mul, lhs, factor());
      } else if (consume('/')) {
        lhs = make(Op::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr b = base();
    if (consume('^')) return make(Op::pow, b, base());
    return b;
  }

  NodePtr base() {
    if (at_end()) error("unexpected end of expression");
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return make(Op::neg, base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    error("unexpected character");
  }

  NodePtr number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to something else; not part of this number
      }
    }
    const std::string text = s_.substr(start, pos_ - start);
    if (text.empty() || text == ".") error("malformed number");
    auto n = std::make_shared<ExprNode>();
    n->op = Op::num;
    try {
      n->value = std::stod(text);
    } catch (const std::exception&) {
      error("malformed number");
    }
    return n;
  }

  NodePtr word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id == "x") return make(Op::var);
    if (id == "pi") return make(Op::pi);
    Op op;
    if (id == "sin") {
      op = Op::sin;
    } else if (id == "cos") {
      op = Op::cos;
    } else if (id == "exp") {
      op = Op::exp;
    } else if (id == "abs") {
      op = Op::abs;
    } else {
      pos_ = start;
      error("unknown identifier '" + id + "'");
    }
    if (!consume('(')) error("expected '(' after function name");
    NodePtr arg = expr();
    if (!consume(')')) error("expected ')'");
    return make(op, arg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const ExprNode& n, double x) {
  switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return x;
    case Op::pi: return 3.14159265358979323846;
    case Op::neg: return -eval_node(*n.lhs, x);
    case Op::add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Op::sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Op::mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Op::div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case Op::pow: return std::pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case Op::sin: return std::sin(eval_node(*n.lhs, x));
    case Op::cos: return std::cos(eval_node(*n.lhs, x));
    case Op::exp: return std::exp(eval_node(*n.lhs, x));
    case Op::abs: return std::fabs(eval_node(*n.lhs, x));
  }
  return 0.0;
}

}  // namespace
}  // namespace detail

double WeightSpec::eval(double x) const {
  if (!ast_) fail(Errc::invalid_argument, "weight has not been parsed");
  const double v = detail::eval_node(*ast_, x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "weight \"" << expression_ << "\" evaluates to " << v << " at x = " << x;
    fail(Errc::eval_error, os.str());
  }
  return v;
}

BoundWeight WeightSpec::on(const GridDomain& grid) const {
  BoundWeight w;
  w.expression = expression_;
  w.values.resize(static_cast<std::size_t>(grid.n_nodes()));
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double v = eval(grid.node(i));
    w.values[static_cast<std::size_t>(i)] = v;
    w.sup_abs = std::max(w.sup_abs, std::fabs(v));
    has_pos = has_pos || v > 0.0;
    has_neg = has_neg || v < 0.0;
  }
  if (has_pos && has_neg) {
    w.sign_class = SignClass::sign_changing;
  } else if (has_pos) {
    w.sign_class = SignClass::nonnegative;
  } else if (has_neg) {
    w.sign_class = SignClass::nonpositive;
  } else {
    w.sign_class = SignClass::zero;
  }
  return w;
}

WeightSpec parse_weight(const std::string& expression) {
  WeightSpec spec;
  spec.expression_ = expression;
  spec.ast_ = detail::Parser(expression).parse();
  return spec;
}

}  // namespace fpk
