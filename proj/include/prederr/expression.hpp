#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace prederr {

class ExpressionParseError : public std::runtime_error {
public:
  ExpressionParseError(const std::string &what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string &what, std::string attribute)
      : std::runtime_error(what), attribute_(std::move(attribute)) {}
  const std::string &attribute() const { return attribute_; }

private:
  std::string attribute_;
};

// Feature expressions over attribute names:
//   expr := name | number | expr ('+'|'-'|'*') expr | '(' expr ')' | expr '<' expr
// '*' binds tighter than '+'/'-', and '<' is loosest. '<' yields 1 or 0.
class Expression {
public:
  struct Node;

  Expression() = default;
  static Expression parse(const std::string &source);
  static Expression attribute(const std::string &name);
  static Expression constant(double value);

  double evaluate(const std::map<std::string, double> &attrs) const;
  const std::string &source() const { return source_; }
  std::set<std::string> attributes() const;

private:
  Expression(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  std::shared_ptr<const Node> root_;
  std::string source_;
};

} // namespace prederr
