#include "sdqw/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace sdqw {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Cos, Sin, Acos, Ln, Exp, Sqrt };

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  Variable var = Variable::X;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

const char* function_name(Op op) {
  switch (op) {
    case Op::Cos: return "cos";
    case Op::Sin: return "sin";
    case Op::Acos: return "acos";
    case Op::Ln: return "ln";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

const char* variable_name(Variable v) {
  switch (v) {
    case Variable::X: return "x";
    case Variable::T: return "t";
    case Variable::X1: return "x1";
    case Variable::X2: return "x2";
    case Variable::A: return "a";
  }
  return "?";
}

double binding(const Bindings& b, Variable v) {
  switch (v) {
    case Variable::X: return b.x;
    case Variable::T: return b.t;
    case Variable::X1: return b.x1;
    case Variable::X2: return b.x2;
    case Variable::A: return b.a;
  }
  return 0.0;
}

[[noreturn]] void domain_failure(const std::string& what, double arg, const Bindings& b) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (argument " << arg << ")";
  throw DomainError(os.str(), -1, b.x, b.t);
}

double eval(const Expression::Node& n, const Bindings& b) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return binding(b, n.var);
    case Op::Neg: return -eval(*n.lhs, b);
    case Op::Add: return eval(*n.lhs, b) + eval(*n.rhs, b);
    case Op::Sub: return eval(*n.lhs, b) - eval(*n.rhs, b);
    case Op::Mul: return eval(*n.lhs, b) * eval(*n.rhs, b);
    case Op::Div: {
      const double d = eval(*n.rhs, b);
      if (d == 0.0) domain_failure("division by zero", d, b);
      return eval(*n.lhs, b) / d;
    }
    case Op::Pow: {
      const double base = eval(*n.lhs, b), ex = eval(*n.rhs, b);
      const double r = std::pow(base, ex);
      if (!std::isfinite(r)) domain_failure("pow outside its domain", base, b);
      return r;
    }
    case Op::Cos: return std::cos(eval(*n.lhs, b));
    case Op::Sin: return std::sin(eval(*n.lhs, b));
    case Op::Acos: {
      const double u = eval(*n.lhs, b);
      if (!(u >= -1.0 && u <= 1.0)) domain_failure("acos argument outside [-1, 1]", u, b);
      return std::acos(u);
    }
    case Op::Ln: {
      const double u = eval(*n.lhs, b);
      if (!(u > 0.0)) domain_failure("ln of a non-positive value", u, b);
      return std::log(u);
    }
    case Op::Exp: return std::exp(eval(*n.lhs, b));
    case Op::Sqrt: {
      const double u = eval(*n.lhs, b);
      if (!(u >= 0.0)) domain_failure("sqrt of a negative value", u, b);
      return std::sqrt(u);
    }
  }
  return 0.0;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

NodePtr make_var(Variable v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Var;
  n->var = v;
  return n;
}

// Builds a node and folds constant operands where the result is finite.
NodePtr make(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  switch (op) {
    case Op::Add:
      if (is_const(lhs, 0.0)) return rhs;
      if (is_const(rhs, 0.0)) return lhs;
      break;
    case Op::Sub:
      if (is_const(rhs, 0.0)) return lhs;
      if (is_const(lhs, 0.0)) return make(Op::Neg, rhs);
      break;
    case Op::Mul:
      if (is_const(lhs, 0.0) || is_const(rhs, 0.0)) return make_const(0.0);
      if (is_const(lhs, 1.0)) return rhs;
      if (is_const(rhs, 1.0)) return lhs;
      break;
    case Op::Div:
      if (is_const(lhs, 0.0) && !is_const(rhs, 0.0)) return make_const(0.0);
      if (is_const(rhs, 1.0)) return lhs;
      break;
    case Op::Pow:
      if (is_const(rhs, 1.0)) return lhs;
      if (is_const(rhs, 0.0)) return make_const(1.0);
      break;
    case Op::Neg:
      if (lhs->op == Op::Neg) return lhs->lhs;
      break;
    default:
      break;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  const bool foldable = n->lhs->op == Op::Const && (!n->rhs || n->rhs->op == Op::Const);
  if (foldable) {
    try {
      const double v = eval(*n, Bindings{});
      if (std::isfinite(v)) return make_const(v);
    } catch (const DomainError&) {
      // Left unfolded; evaluation reports the error.
    }
  }
  return n;
}

NodePtr differentiate(const NodePtr& n, Variable v) {
  const NodePtr zero = make_const(0.0);
  switch (n->op) {
    case Op::Const: return zero;
    case Op::Var: return make_const(n->var == v ? 1.0 : 0.0);
    case Op::Neg: return make(Op::Neg, differentiate(n->lhs, v));
    case Op::Add: return make(Op::Add, differentiate(n->lhs, v), differentiate(n->rhs, v));
    case Op::Sub: return make(Op::Sub, differentiate(n->lhs, v), differentiate(n->rhs, v));
    case Op::Mul:
      return make(Op::Add, make(Op::Mul, differentiate(n->lhs, v), n->rhs),
                  make(Op::Mul, n->lhs, differentiate(n->rhs, v)));
    case Op::Div: {
      const NodePtr num = make(Op::Sub, make(Op::Mul, differentiate(n->lhs, v), n->rhs),
                               make(Op::Mul, n->lhs, differentiate(n->rhs, v)));
      return make(Op::Div, num, make(Op::Pow, n->rhs, make_const(2.0)));
    }
    case Op::Pow: {
      const NodePtr du = differentiate(n->lhs, v), dw = differentiate(n->rhs, v);
      if (is_const(dw, 0.0)) {
        // w u^(w-1) u'
        return make(Op::Mul, make(Op::Mul, n->rhs, make(Op::Pow, n->lhs, make(Op::Sub, n->rhs, make_const(1.0)))),
                    du);
      }
      // u^w (w' ln u + w u' / u)
      const NodePtr inner = make(Op::Add, make(Op::Mul, dw, make(Op::Ln, n->lhs)),
                                 make(Op::Div, make(Op::Mul, n->rhs, du), n->lhs));
      return make(Op::Mul, n, inner);
    }
    case Op::Cos:
      return make(Op::Neg, make(Op::Mul, make(Op::Sin, n->lhs), differentiate(n->lhs, v)));
    case Op::Sin: return make(Op::Mul, make(Op::Cos, n->lhs), differentiate(n->lhs, v));
    case Op::Acos: {
      const NodePtr root =
          make(Op::Sqrt, make(Op::Sub, make_const(1.0), make(Op::Pow, n->lhs, make_const(2.0))));
      return make(Op::Neg, make(Op::Div, differentiate(n->lhs, v), root));
    }
    case Op::Ln: return make(Op::Div, differentiate(n->lhs, v), n->lhs);
    case Op::Exp: return make(Op::Mul, n, differentiate(n->lhs, v));
    case Op::Sqrt:
      return make(Op::Div, differentiate(n->lhs, v), make(Op::Mul, make_const(2.0), n));
  }
  return zero;
}

bool depends(const NodePtr& n, Variable v) {
  if (!n) return false;
  if (n->op == Op::Var) return n->var == v;
  return depends(n->lhs, v) || depends(n->rhs, v);
}

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const NodePtr& n, int parent) {
  const int p = precedence(n->op);
  const bool wrap = p < parent;
  if (wrap) os << '(';
  switch (n->op) {
    case Op::Const: {
      if (n->value == std::numbers::pi) {
        os << "pi";
      } else {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, n->value);
        const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
        if (n->value < 0) os << '(' << text << ')';
        else os << text;
      }
      break;
    }
    case Op::Var: os << variable_name(n->var); break;
    case Op::Neg: os << '-'; print(os, n->lhs, 4); break;
    case Op::Add: print(os, n->lhs, 1); os << " + "; print(os, n->rhs, 2); break;
    case Op::Sub: print(os, n->lhs, 1); os << " - "; print(os, n->rhs, 2); break;
    case Op::Mul: print(os, n->lhs, 2); os << " * "; print(os, n->rhs, 3); break;
    case Op::Div: print(os, n->lhs, 2); os << " / "; print(os, n->rhs, 3); break;
    case Op::Pow: print(os, n->lhs, 5); os << '^'; print(os, n->rhs, 4); break;
    default: os << function_name(n->op) << '('; print(os, n->lhs, 0); os << ')'; break;
  }
  if (wrap) os << ')';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == "x") return make_var(Variable::X);
    if (name == "t") return make_var(Variable::T);
    if (name == "x1") return make_var(Variable::X1);
    if (name == "x2") return make_var(Variable::X2);
    if (name == "a") return make_var(Variable::A);
    if (name == "pi") return make_const(std::numbers::pi);

    Op op;
    if (name == "cos") op = Op::Cos;
    else if (name == "sin") op = Op::Sin;
    else if (name == "acos") op = Op::Acos;
    else if (name == "ln") op = Op::Ln;
    else if (name == "exp") op = Op::Exp;
    else if (name == "sqrt") op = Op::Sqrt;
    else if (name == "pow") op = Op::Pow;
    else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    NodePtr arg = expr();
    if (op == Op::Pow) {
      expect(',');
      NodePtr ex = expr();
      expect(')');
      return make(Op::Pow, arg, ex);
    }
    expect(')');
    return make(op, arg);
  }
};

}  // namespace

Expression::Expression() : root_(make_const(0.0)) {}
Expression::Expression(double value) : root_(make_const(value)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

double Expression::evaluate(const Bindings& b) const {
  const double v = eval(*root_, b);
  if (!std::isfinite(v)) domain_failure("non-finite value", v, b);
  return v;
}

Expression Expression::derivative(Variable v) const { return Expression(differentiate(root_, v)); }

bool Expression::depends_on(Variable v) const { return depends(root_, v); }

bool Expression::is_constant() const { return root_->op == Op::Const; }

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print(os, root_, 0);
  return os.str();
}

ScalarField Expression::field(double a) const {
  return [root = root_, a](double x, double t) {
    Bindings b;
    b.x = x;
    b.t = t;
    b.a = a;
    const double v = eval(*root, b);
    if (!std::isfinite(v)) domain_failure("non-finite value", v, b);
    return v;
  };
}

std::function<double(double, double, double)> Expression::pair_field(double a) const {
  return [root = root_, a](double x1, double x2, double t) {
    Bindings b;
    b.x1 = x1;
    b.x2 = x2;
    b.t = t;
    b.a = a;
    const double v = eval(*root, b);
    if (!std::isfinite(v)) domain_failure("non-finite value", v, b);
    return v;
  };
}

}  // namespace sdqw
