#include "bkern/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "bkern/error.hpp"

namespace bkern {

struct Expr::Node {
  enum class Op { Num, X, Y, R2, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos, Sqrt, Tanh } op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y) const {
    switch (op) {
      case Op::Num: return value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::R2: return x * x + y * y;
      case Op::Add: return a->eval(x, y) + b->eval(x, y);
      case Op::Sub: return a->eval(x, y) - b->eval(x, y);
      case Op::Mul: return a->eval(x, y) * b->eval(x, y);
      case Op::Div: return a->eval(x, y) / b->eval(x, y);
      case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
      case Op::Neg: return -a->eval(x, y);
      case Op::Exp: return std::exp(a->eval(x, y));
      case Op::Log: return std::log(a->eval(x, y));
      case Op::Sin: return std::sin(a->eval(x, y));
      case Op::Cos: return std::cos(a->eval(x, y));
      case Op::Sqrt: return std::sqrt(a->eval(x, y));
      case Op::Tanh: return std::tanh(a->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = decltype(Expr::Node::op);

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = v;
  return n;
}

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := '-' unary | power
// power  := atom ('^' unary)?
// atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, msg + " at column " + std::to_string(pos_) + " in '" + s_ + "'");
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

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    auto n = atom();
    if (accept('^')) return make(Op::Pow, n, unary());
    return n;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return make(Op::Num, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Op::X);
      if (id == "y") return make(Op::Y);
      if (id == "r2") return make(Op::R2);
      if (id == "pi") return make(Op::Num, nullptr, nullptr, std::numbers::pi);
      static const std::vector<std::pair<std::string, Op>> fns = {
          {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin},
          {"cos", Op::Cos}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh}};
      for (const auto& [name, op] : fns) {
        if (id == name) {
          if (!accept('(')) fail("expected '(' after " + id);
          auto arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(op, arg);
        }
      }
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  Parser p(text);
  e.root_ = p.parse();
  return e;
}

double Expr::operator()(double x, double y) const {
  return root_ ? root_->eval(x, y) : 0.0;
}

}  // namespace bkern
