#pragma once

#include <memory>
#include <string>

namespace bkern {

// Small arithmetic expression over the chart coordinate, used for metric
// perturbations. Variables: x (Re z), y (Im z), r2 (|z|^2), pi.
// Operators: + - * / ^, unary minus, parentheses.
// Functions: exp log sin cos sqrt tanh.
class Expr {
 public:
  struct Node;

  Expr() = default;
  static Expr parse(const std::string& text);

  double operator()(double x, double y) const;
  bool empty() const { return !root_; }
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace bkern
