#include "cupgeo/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "cupgeo/errors.hpp"

namespace cupgeo {

enum class Func { exp, log, sqrt, sin, cos };

struct Expression::Node {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };

  Kind kind = Kind::number;
  double number = 0.0;
  std::size_t variable = 0;
  Func func = Func::exp;
  std::shared_ptr<const Node> lhs, rhs;
  // Subtree free of coordinates; `number` then holds its value.
  bool constant = false;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

double apply(Func f, double x) {
  switch (f) {
    case Func::exp: return std::exp(x);
    case Func::log: return std::log(x);
    case Func::sqrt: return std::sqrt(x);
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
  }
  return x;
}

Jet apply(Func f, const Jet& x) {
  switch (f) {
    case Func::exp: return exp(x);
    case Func::log: return log(x);
    case Func::sqrt: return sqrt(x);
    case Func::sin: return sin(x);
    case Func::cos: return cos(x);
  }
  return x;
}

double eval(const Node& n, std::span<const double> x) {
  if (n.constant) return n.number;
  switch (n.kind) {
    case Node::Kind::number: return n.number;
    case Node::Kind::variable: return x[n.variable];
    case Node::Kind::negate: return -eval(*n.lhs, x);
    case Node::Kind::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Node::Kind::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Node::Kind::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Node::Kind::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Node::Kind::pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
    case Node::Kind::call: return apply(n.func, eval(*n.lhs, x));
  }
  return 0.0;
}

Jet eval(const Node& n, std::span<const Jet> x, std::size_t dim, int order) {
  if (n.constant) return Jet(dim, order, n.number);
  switch (n.kind) {
    case Node::Kind::number: return Jet(dim, order, n.number);
    case Node::Kind::variable: return x[n.variable];
    case Node::Kind::negate: return -eval(*n.lhs, x, dim, order);
    case Node::Kind::add: return eval(*n.lhs, x, dim, order) + eval(*n.rhs, x, dim, order);
    case Node::Kind::sub: return eval(*n.lhs, x, dim, order) - eval(*n.rhs, x, dim, order);
    case Node::Kind::mul: return eval(*n.lhs, x, dim, order) * eval(*n.rhs, x, dim, order);
    case Node::Kind::div: return eval(*n.lhs, x, dim, order) / eval(*n.rhs, x, dim, order);
    case Node::Kind::pow:
      if (n.rhs->constant) return pow(eval(*n.lhs, x, dim, order), n.rhs->number);
      return pow(eval(*n.lhs, x, dim, order), eval(*n.rhs, x, dim, order));
    case Node::Kind::call: return apply(n.func, eval(*n.lhs, x, dim, order));
  }
  return Jet(dim, order);
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> identifiers)
      : text_(text), ids_(identifiers) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    const bool constant = lhs->constant && rhs->constant;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    if (constant) n->number = eval(*n, {});
    n->constant = constant;
    return n;
  }

  static NodePtr make_unary(Node::Kind kind, NodePtr arg, Func f = Func::exp) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->func = f;
    const bool constant = arg->constant;
    n->lhs = std::move(arg);
    if (constant) n->number = eval(*n, {});
    n->constant = constant;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) lhs = make_binary(Node::Kind::add, lhs, term());
      else if (accept('-')) lhs = make_binary(Node::Kind::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) lhs = make_binary(Node::Kind::mul, lhs, unary());
      else if (accept('/')) lhs = make_binary(Node::Kind::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Node::Kind::negate, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) fail("malformed number", start);
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->number = value;
    n->constant = true;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    const bool is_function = name == "exp" || name == "log" || name == "sqrt" || name == "sin" || name == "cos";
    if (is_function && (pos_ >= text_.size() || text_[pos_] != '(')) fail("expected '(' after " + name);
    if (pos_ < text_.size() && text_[pos_] == '(') {
      Func f;
      if (name == "exp") f = Func::exp;
      else if (name == "log") f = Func::log;
      else if (name == "sqrt") f = Func::sqrt;
      else if (name == "sin") f = Func::sin;
      else if (name == "cos") f = Func::cos;
      else fail("unknown function '" + name + "'", start);
      ++pos_;
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make_unary(Node::Kind::call, arg, f);
    }
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i] == name) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->variable = i;
        return n;
      }
    }
    fail("unknown identifier '" + name + "'", start);
  }

  std::string_view text_;
  std::span<const std::string> ids_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, std::span<const std::string> identifiers) {
  Expression e;
  e.text_ = std::string(text);
  e.arity_ = identifiers.size();
  e.root_ = Parser(e.text_, identifiers).parse();
  return e;
}

bool Expression::is_constant() const noexcept { return root_ && root_->constant; }

Jet Expression::evaluate(std::span<const Jet> vars) const {
  if (vars.size() != arity_) throw DimensionError("expression evaluated on the wrong number of variables");
  const std::size_t dim = vars.empty() ? 0 : vars[0].dim();
  const int order = vars.empty() ? 0 : vars[0].order();
  return eval(*root_, vars, dim, order);
}

double Expression::evaluate(std::span<const double> x) const {
  if (x.size() != arity_) throw DimensionError("expression evaluated on the wrong number of variables");
  return eval(*root_, x);
}

ScalarField Expression::to_field() const {
  Expression self = *this;
  return ScalarField::analytic(arity_, [self](std::span<const Jet> vars) { return self.evaluate(vars); });
}

}  // namespace cupgeo
