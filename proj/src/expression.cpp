#include "prederr/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <array>

namespace prederr {

struct Expression::Node {
  enum class Kind { attribute, constant, add, subtract, multiply, less };
  Kind kind;
  std::string name;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make_binary(Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
public:
  explicit Parser(const std::string &src) : src_(src) {}

  NodePtr parse() {
    auto root = comparison();
    skip_space();
    if (pos_ != src_.size())
      fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

private:
  NodePtr comparison() {
    auto lhs = additive();
    while (consume('<'))
      lhs = make_binary(Kind::less, lhs, additive());
    return lhs;
  }

  NodePtr additive() {
    auto lhs = term();
    for (;;) {
      if (consume('+'))
        lhs = make_binary(Kind::add, lhs, term());
      else if (consume('-'))
        lhs = make_binary(Kind::subtract, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = primary();
    while (consume('*'))
      lhs = make_binary(Kind::multiply, lhs, primary());
    return lhs;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size())
      fail("unexpected end of expression");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = comparison();
      if (!consume(')'))
        fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char *first = src_.data() + pos_;
    const char *last = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v))
      fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::constant;
    n->value = v;
    return n;
  }

  NodePtr name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_' || src_[pos_] == '.'))
      ++pos_;
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::attribute;
    n->name = src_.substr(start, pos_ - start);
    return n;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ExpressionParseError("expression '" + src_ + "' at offset " +
                                   std::to_string(pos_) + ": " + msg,
                               pos_);
  }

  const std::string &src_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node &n,
            const std::map<std::string, double> &attrs) {
  switch (n.kind) {
  case Kind::attribute: {
    auto it = attrs.find(n.name);
    if (it == attrs.end())
      throw EvaluationError("unknown attribute '" + n.name + "'", n.name);
    return it->second;
  }
  case Kind::constant:
    return n.value;
  case Kind::add:
    return eval(*n.lhs, attrs) + eval(*n.rhs, attrs);
  case Kind::subtract:
    return eval(*n.lhs, attrs) - eval(*n.rhs, attrs);
  case Kind::multiply:
    return eval(*n.lhs, attrs) * eval(*n.rhs, attrs);
  case Kind::less:
    return eval(*n.lhs, attrs) < eval(*n.rhs, attrs) ? 1.0 : 0.0;
  }
  return 0.0;
}

void collect(const Expression::Node &n, std::set<std::string> &out) {
  if (n.kind == Kind::attribute)
    out.insert(n.name);
  if (n.lhs)
    collect(*n.lhs, out);
  if (n.rhs)
    collect(*n.rhs, out);
}

} // namespace

Expression Expression::parse(const std::string &source) {
  return Expression(Parser(source).parse(), source);
}

Expression Expression::attribute(const std::string &name) {
  return parse(name);
}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = value;
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return Expression(n, std::string(buf.data(), ptr));
}

double Expression::evaluate(const std::map<std::string, double> &attrs) const {
  if (!root_)
    throw EvaluationError("empty expression", "");
  return eval(*root_, attrs);
}

std::set<std::string> Expression::attributes() const {
  std::set<std::string> out;
  if (root_)
    collect(*root_, out);
  return out;
}

} // namespace prederr
