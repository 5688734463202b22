#include "crossreg/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace crossreg {

namespace detail {

void domain(const char* what, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s (operand %.17g)", what, v);
  throw DomainError(buf);
}

}  // namespace detail

namespace {

struct Func {
  const char* name;
  Op op;
};
constexpr Func kFuncs[] = {{"abs", Op::Abs}, {"sgn", Op::Sgn}, {"sqrt", Op::Sqrt},
                           {"exp", Op::Exp}, {"ln", Op::Ln},   {"sin", Op::Sin},
                           {"cos", Op::Cos}};

const char* func_name(Op op) {
  for (const auto& f : kFuncs)
    if (f.op == op) return f.name;
  return nullptr;
}

// Recursive descent over
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := '-' exponent | power
//   primary  := number | name | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& names) : s_(src), names_(names) {}

  Expr run() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return Expr(std::move(nodes_), names_);
  }

 private:
  int emit(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
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

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) {
        int rhs = term();
        lhs = emit({Op::Add, 0.0, -1, lhs, rhs});
      } else if (accept('-')) {
        int rhs = term();
        lhs = emit({Op::Sub, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) {
        int rhs = unary();
        lhs = emit({Op::Mul, 0.0, -1, lhs, rhs});
      } else if (accept('/')) {
        int rhs = unary();
        lhs = emit({Op::Div, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int unary() {
    if (accept('-')) {
      int a = unary();
      return emit({Op::Neg, 0.0, -1, a, -1});
    }
    return power();
  }

  int exponent() {
    if (accept('-')) {
      int a = exponent();
      return emit({Op::Neg, 0.0, -1, a, -1});
    }
    return power();
  }

  int power() {
    int base = primary();
    if (accept('^')) {
      int ex = exponent();
      return emit({Op::Pow, 0.0, -1, base, ex});
    }
    return base;
  }

  int primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("expected operand", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    if (c == '(') {
      ++pos_;
      int inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  int number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    if (text == ".") throw ParseError("malformed number", start);
    return emit({Op::Const, std::strtod(text.c_str(), nullptr), -1, -1, -1});
  }

  int name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    for (const auto& f : kFuncs) {
      if (id != f.name) continue;
      if (!accept('(')) throw ParseError("function '" + id + "' needs parentheses", pos_);
      int arg = expr();
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',')
        throw ParseError("function '" + id + "' takes one argument", pos_);
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return emit({f.op, 0.0, -1, arg, -1});
    }
    for (std::size_t k = 0; k < names_.size(); ++k)
      if (names_[k] == id) return emit({Op::Var, 0.0, static_cast<int>(k), -1, -1});
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

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

void print(const std::vector<Node>& nodes, const std::vector<std::string>& vars, int k, int min_prec,
           std::string& out) {
  const Node& n = nodes[k];
  const int p = precedence(n.op);
  const bool paren = p < min_prec || (n.op == Op::Const && n.value < 0.0);
  if (paren) out += '(';
  switch (n.op) {
    case Op::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    }
    case Op::Var: out += vars[n.slot]; break;
    case Op::Neg:
      out += '-';
      print(nodes, vars, n.a, 3, out);
      break;
    case Op::Add:
    case Op::Sub:
      print(nodes, vars, n.a, 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      print(nodes, vars, n.b, 2, out);
      break;
    case Op::Mul:
    case Op::Div:
      print(nodes, vars, n.a, 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      print(nodes, vars, n.b, 3, out);
      break;
    case Op::Pow:
      print(nodes, vars, n.a, 5, out);
      out += '^';
      print(nodes, vars, n.b, 3, out);
      break;
    default:
      out += func_name(n.op);
      out += '(';
      print(nodes, vars, n.a, 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

bool same_tree(const Expr& x, int i, const Expr& y, int j) {
  const Node& a = x.nodes()[i];
  const Node& b = y.nodes()[j];
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Const: return a.value == b.value;
    case Op::Var: return x.variables()[a.slot] == y.variables()[b.slot];
    default: break;
  }
  if (!same_tree(x, a.a, y, b.a)) return false;
  if (a.b >= 0 || b.b >= 0) return a.b >= 0 && b.b >= 0 && same_tree(x, a.b, y, b.b);
  return true;
}

}  // namespace

bool Expr::uses(int s) const {
  for (const auto& n : nodes_)
    if (n.op == Op::Var && n.slot == s) return true;
  return false;
}

int Expr::slot_of(std::string_view name) const {
  for (std::size_t k = 0; k < vars_.size(); ++k)
    if (vars_[k] == name) return static_cast<int>(k);
  return -1;
}

double Expr::value(const double* slots) const {
  std::vector<Jet<0>> j(vars_.size());
  for (std::size_t k = 0; k < vars_.size(); ++k) j[k] = Jet<0>(slots[k]);
  return eval<0>(j.data()).v;
}

std::string Expr::str() const {
  std::string out;
  if (!nodes_.empty()) print(nodes_, vars_, static_cast<int>(nodes_.size()) - 1, 0, out);
  return out;
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.empty() || y.empty()) return x.empty() && y.empty();
  return same_tree(x, static_cast<int>(x.nodes_.size()) - 1, y, static_cast<int>(y.nodes_.size()) - 1);
}

Expr parse_with_variables(std::string_view source, const std::vector<std::string>& names) {
  return Parser(source, names).run();
}

Expr parse(std::string_view source, const std::vector<std::string>& params) {
  std::vector<std::string> names{"x1", "x2"};
  names.insert(names.end(), params.begin(), params.end());
  return parse_with_variables(source, names);
}

Dual2 eval2(const Expr& e, const Point& x, const ParamMap& params) {
  const auto& vars = e.variables();
  std::vector<Dual2> slots(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k] == "x1") {
      slots[k] = Dual2::variable(x[0], 0);
    } else if (vars[k] == "x2") {
      slots[k] = Dual2::variable(x[1], 1);
    } else {
      auto it = params.find(vars[k]);
      if (it == params.end()) throw std::invalid_argument("unbound parameter '" + vars[k] + "'");
      slots[k] = Dual2(it->second);
    }
  }
  return e.eval<2>(slots.data());
}

double third_derivative(const Expr& e, const Point& x, const ParamMap& params, int i, int j,
                        int k) {
  return third_derivative_fd([&](const Point& p) { return eval2(e, p, params); }, x, i, j, k);
}

}  // namespace crossreg
