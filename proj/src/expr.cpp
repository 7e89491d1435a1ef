#include "mew/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace mew {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(NodeKind kind, std::size_t offset, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->offset = offset;
  n->children = std::move(children);
  return n;
}

struct FunctionInfo {
  std::string_view name;
  Function function;
  int arity;
};

constexpr std::array<FunctionInfo, 6> kFunctions{{
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"exp", Function::Exp, 1},
    {"ln", Function::Ln, 1},
    {"sqrt", Function::Sqrt, 1},
    {"pow", Function::Pow, 2},
}};

std::string_view function_name(Function f) {
  for (const auto& info : kFunctions)
    if (info.function == f) return info.name;
  return "?";
}

// --- lexer ----------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End, Invalid };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, {}};
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, src_.substr(start, pos_ - start)};
    }
    ++pos_;
    const auto single = [&](Tok k) { return Token{k, start, src_.substr(start, 1)}; };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      default: return single(Tok::Invalid);
    }
  }

 private:
  Token lex_number(std::size_t start) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        digits();
      else
        pos_ = save;  // not an exponent; leave 'e' for the next token
    }
    const auto text = src_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return {Tok::Invalid, start, text};
    return {Tok::Number, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// --- parser ---------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  NodePtr parse_all() {
    NodePtr e = expr();
    if (tok_.kind != Tok::End) fail({"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = tok_.kind == Tok::End ? "end of input" : std::string(tok_.text);
    throw SyntaxError(tok_.offset, std::move(expected), std::move(found));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const auto kind = tok_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      const auto off = tok_.offset;
      advance();
      lhs = make(kind, off, {lhs, term()});
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const auto kind = tok_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      const auto off = tok_.offset;
      advance();
      lhs = make(kind, off, {lhs, factor()});
    }
    return lhs;
  }

  NodePtr factor() {
    if (tok_.kind == Tok::Minus) {
      const auto off = tok_.offset;
      advance();
      return make(NodeKind::Neg, off, {factor()});
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (tok_.kind != Tok::Caret) return base;
    const auto off = tok_.offset;
    advance();
    if (tok_.kind != Tok::Number || tok_.text.find_first_not_of("0123456789") != std::string_view::npos)
      fail({"integer"});
    int n = 0;
    auto [ptr, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), n);
    if (ec != std::errc{}) fail({"integer"});
    advance();
    auto node = std::make_shared<ExprNode>();
    node->kind = NodeKind::Pow;
    node->offset = off;
    node->exponent = n;
    node->children = {base};
    return node;
  }

  NodePtr atom() {
    const Token t = tok_;
    switch (t.kind) {
      case Tok::Number: {
        advance();
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::Number;
        n->offset = t.offset;
        n->number = t.number;
        return n;
      }
      case Tok::LParen: {
        advance();
        NodePtr inner = expr();
        if (tok_.kind != Tok::RParen) fail({")"});
        advance();
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail({"number", "identifier", "(", "-"});
    }
  }

  NodePtr identifier() {
    const Token t = tok_;
    advance();
    if (t.text == "x") return make(NodeKind::VarX, t.offset);
    if (t.text == "y") return make(NodeKind::VarY, t.offset);
    if (t.text == "pi") return make(NodeKind::Pi, t.offset);
    const FunctionInfo* info = nullptr;
    for (const auto& f : kFunctions)
      if (f.name == t.text) info = &f;
    if (info == nullptr) throw UnknownIdentifier(t.offset, std::string(t.text));
    if (tok_.kind != Tok::LParen) fail({"("});
    advance();
    std::vector<NodePtr> args{expr()};
    if (info->arity == 2) {
      if (tok_.kind != Tok::Comma) fail({","});
      advance();
      args.push_back(expr());
    }
    if (tok_.kind != Tok::RParen) fail({")"});
    advance();
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Call;
    n->offset = t.offset;
    n->function = info->function;
    n->children = std::move(args);
    return n;
  }

  Lexer lexer_;
  Token tok_{Tok::End, 0, {}};
};

// --- evaluation -------------------------------------------------------------

double eval_plain(const ExprNode& n, Point p) {
  auto arg = [&](int i) { return eval_plain(*n.children[i], p); };
  switch (n.kind) {
    case NodeKind::Number: return n.number;
    case NodeKind::Pi: return std::numbers::pi;
    case NodeKind::VarX: return p.x;
    case NodeKind::VarY: return p.y;
    case NodeKind::Neg: return -arg(0);
    case NodeKind::Add: return arg(0) + arg(1);
    case NodeKind::Sub: return arg(0) - arg(1);
    case NodeKind::Mul: return arg(0) * arg(1);
    case NodeKind::Div: {
      const double d = arg(1);
      if (d == 0.0) throw EvaluationError("division by zero", n.offset);
      return arg(0) / d;
    }
    case NodeKind::Pow: {
      double r = 1.0;
      const double b = arg(0);
      for (int k = 0; k < n.exponent; ++k) r *= b;
      return r;
    }
    case NodeKind::Call: {
      const double a = arg(0);
      switch (n.function) {
        case Function::Sin: return std::sin(a);
        case Function::Cos: return std::cos(a);
        case Function::Exp: return std::exp(a);
        case Function::Ln:
          if (!(a > 0)) throw EvaluationError("ln of a non-positive value", n.offset);
          return std::log(a);
        case Function::Sqrt:
          if (!(a > 0)) throw EvaluationError("sqrt of a non-positive value", n.offset);
          return std::sqrt(a);
        case Function::Pow: {
          const double e = arg(1);
          if (!(a > 0) && e != std::round(e)) throw EvaluationError("pow of a non-positive base", n.offset);
          return std::pow(a, e);
        }
      }
    }
  }
  return 0.0;
}

bool is_constant(const Jet<double>& j) {
  for (int k = 1; k < j.coeffs().size(); ++k)
    if (j.coeffs()[k] != 0.0) return false;
  return true;
}

Jet<double> eval_jet_node(const ExprNode& n, Point p, int order) {
  auto arg = [&](int i) { return eval_jet_node(*n.children[i], p, order); };
  const auto base = p.array();
  try {
    switch (n.kind) {
      case NodeKind::Number: return Jet<double>::constant(order, n.number, base);
      case NodeKind::Pi: return Jet<double>::constant(order, std::numbers::pi, base);
      case NodeKind::VarX: return Jet<double>::coordinate(order, 0, base);
      case NodeKind::VarY: return Jet<double>::coordinate(order, 1, base);
      case NodeKind::Neg: return -arg(0);
      case NodeKind::Add: return arg(0) + arg(1);
      case NodeKind::Sub: return arg(0) - arg(1);
      case NodeKind::Mul: return arg(0) * arg(1);
      case NodeKind::Div: return arg(0) / arg(1);
      case NodeKind::Pow: return ipow(arg(0), n.exponent);
      case NodeKind::Call: {
        const Jet<double> a = arg(0);
        switch (n.function) {
          case Function::Sin: return sin(a);
          case Function::Cos: return cos(a);
          case Function::Exp: return exp(a);
          case Function::Ln: return log(a);
          case Function::Sqrt: return sqrt(a);
          case Function::Pow: {
            const Jet<double> e = arg(1);
            if (is_constant(e)) {
              const double ev = e.value();
              if (a.value() > 0) return pow(a, ev);
              if (ev == std::round(ev)) return ipow(a, static_cast<int>(ev));
              throw DomainError("pow of a non-positive base with non-integer exponent");
            }
            return exp(e * log(a));
          }
        }
      }
    }
  } catch (const ExprError&) {
    throw;
  } catch (const DomainError& err) {
    throw EvaluationError(err.what(), n.offset);
  } catch (const DegenerateDivision& err) {
    throw EvaluationError(err.what(), n.offset);
  }
  return Jet<double>(order, 0.0, base);
}

bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::Call:
      if (a.function != b.function) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_tree(*a.children[i], *b.children[i])) return false;
  return true;
}

// Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
std::string print_node(const ExprNode& n, int min_prec) {
  auto wrap = [&](std::string s, int prec) { return prec < min_prec ? "(" + s + ")" : s; };
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      std::string s(buf);
      return n.number < 0 ? "(" + s + ")" : s;
    }
    case NodeKind::Pi: return "pi";
    case NodeKind::VarX: return "x";
    case NodeKind::VarY: return "y";
    case NodeKind::Neg: return wrap("-" + print_node(*n.children[0], 3), 3);
    case NodeKind::Add:
    case NodeKind::Sub:
      return wrap(print_node(*n.children[0], 1) + (n.kind == NodeKind::Add ? " + " : " - ") +
                      print_node(*n.children[1], 2),
                  1);
    case NodeKind::Mul:
    case NodeKind::Div:
      return wrap(print_node(*n.children[0], 2) + (n.kind == NodeKind::Mul ? "*" : "/") +
                      print_node(*n.children[1], 3),
                  2);
    case NodeKind::Pow:
      return wrap(print_node(*n.children[0], 5) + "^" + std::to_string(n.exponent), 4);
    case NodeKind::Call: {
      std::string s(function_name(n.function));
      s += "(" + print_node(*n.children[0], 1);
      if (n.children.size() == 2) s += ", " + print_node(*n.children[1], 1);
      return s + ")";
    }
  }
  return {};
}

Expr binary(NodeKind kind, const Expr& a, const Expr& b) {
  return Expr(make(kind, 0, {std::make_shared<ExprNode>(a.root()), std::make_shared<ExprNode>(b.root())}));
}

}  // namespace

Expr::Expr() : root_(make(NodeKind::Number, 0)), source_("0") {}

Expr::Expr(std::shared_ptr<const ExprNode> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
  if (source_.empty()) source_ = print_node(*root_, 0);
}

double Expr::evaluate(Point p) const { return eval_plain(*root_, p); }

Jet<double> Expr::eval_jet(Point base, int order) const { return eval_jet_node(*root_, base, order); }

bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

Expr parse(std::string_view source) {
  Parser parser(source);
  return Expr(parser.parse_all(), std::string(source));
}

std::string print(const Expr& e) { return print_node(e.root(), 0); }

Expr number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Number;
  n->number = v;
  return Expr(n);
}
Expr var_x() { return Expr(make(NodeKind::VarX, 0)); }
Expr var_y() { return Expr(make(NodeKind::VarY, 0)); }
Expr operator+(const Expr& a, const Expr& b) { return binary(NodeKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(NodeKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(NodeKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return binary(NodeKind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr(make(NodeKind::Neg, 0, {std::make_shared<ExprNode>(a.root())})); }

}  // namespace mew
