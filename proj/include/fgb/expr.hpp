#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "jet.hpp"

namespace fgb {

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(const std::string& msg, int line_, int column_)
      : std::runtime_error(format(msg, line_, column_)), line(line_), column(column_) {}

 private:
  static std::string format(const std::string& msg, int line, int column) {
    if (line <= 0) return "column " + std::to_string(column) + ": " + msg;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
  }
};

enum class Op { Const, U, V, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::Const;
  double value = 0;  // Const
  int exponent = 0;  // Pow
  ExprPtr a, b;
};

inline const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Tanh: return "tanh";
    default: return nullptr;
  }
}

inline bool is_function(Op op) { return function_name(op) != nullptr; }

namespace ex {

inline ExprPtr make(Op op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
inline ExprPtr num(double x) {
  auto e = std::make_shared<Expr>();
  e->value = x;
  return e;
}
inline ExprPtr u() { return make(Op::U); }
inline ExprPtr v() { return make(Op::V); }
inline bool is_const(const ExprPtr& e, double x) { return e->op == Op::Const && e->value == x; }

// constructors with constant folding
inline ExprPtr add(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return make(Op::Add, a, b);
}
inline ExprPtr neg(ExprPtr a) {
  if (a->op == Op::Const) return num(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, a);
}
inline ExprPtr sub(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value - b->value);
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return neg(b);
  return make(Op::Sub, a, b);
}
inline ExprPtr mul(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return num(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_const(a, -1)) return neg(b);
  if (is_const(b, -1)) return neg(a);
  return make(Op::Mul, a, b);
}
inline ExprPtr div(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const && b->value != 0) return num(a->value / b->value);
  if (is_const(a, 0)) return num(0);
  if (is_const(b, 1)) return a;
  return make(Op::Div, a, b);
}
inline ExprPtr pow(ExprPtr a, int n) {
  if (n == 0) return num(1);
  if (n == 1) return a;
  if (a->op == Op::Const) return num(std::pow(a->value, n));
  auto e = std::make_shared<Expr>();
  e->op = Op::Pow;
  e->exponent = n;
  e->a = std::move(a);
  return e;
}
inline ExprPtr call(Op f, ExprPtr a) { return make(f, std::move(a)); }

}  // namespace ex

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(const std::string& text, int line = 0) : s_(text), line_(line) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
  int line_;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, int(pos_) + 1); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (accept('+'))
        e = ex::make(Op::Add, e, term());
      else if (accept('-'))
        e = ex::make(Op::Sub, e, term());
      else
        return e;
    }
  }
  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (accept('*'))
        e = ex::make(Op::Mul, e, factor());
      else if (accept('/'))
        e = ex::make(Op::Div, e, factor());
      else
        return e;
    }
  }
  ExprPtr factor() {
    ExprPtr b = base();
    if (accept('^')) {
      skip_ws();
      size_t start = pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      size_t digits = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
      if (pos_ == digits) {
        pos_ = start;
        fail("exponent must be an integer");
      }
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) fail("exponent must be an integer");
      long n = std::stol(s_.substr(start, pos_ - start));
      if (n > 64 || n < -64) fail("exponent out of range");
      auto e = std::make_shared<Expr>();
      e->op = Op::Pow;
      e->exponent = int(n);
      e->a = b;
      return e;
    }
    return b;
  }
  ExprPtr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return ex::make(Op::Neg, base());
    }
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit((unsigned char)c) || c == '.') return number();
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      skip_ws();
      bool call = pos_ < s_.size() && s_[pos_] == '(';
      if (!call) {
        if (id == "u") return ex::u();
        if (id == "v") return ex::v();
        if (id == "pi") return ex::num(std::numbers::pi);
        if (lookup(id) != Op::Const) fail("function call requires parentheses: " + id + "(...)");
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      Op f = lookup(id);
      if (f == Op::Const) {
        pos_ = start;
        fail("unknown function '" + id + "'");
      }
      ++pos_;
      ExprPtr arg = expr();
      expect(')');
      return ex::make(f, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  ExprPtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double x = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += size_t(end - begin);
    return ex::num(x);
  }
  static Op lookup(const std::string& id) {
    static const std::pair<const char*, Op> table[] = {
        {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},   {"exp", Op::Exp},   {"log", Op::Log},
        {"sqrt", Op::Sqrt}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh},
    };
    for (auto& [name, op] : table)
      if (id == name) return op;
    return Op::Const;
  }
};

inline ExprPtr parse_expr(const std::string& text, int line = 0) { return Parser(text, line).parse(); }

// ---------------------------------------------------------------- printer

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Pow: return 3;
    case Op::Const: return e.value < 0 ? 4 : 5;
    case Op::Neg: return 4;
    default: return 5;
  }
}

inline std::string number_text(double x) {
  if (x == std::numbers::pi) return "pi";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::fabs(x));
  std::string s = buf;
  return x < 0 ? "-" + s : s;
}

inline std::string print(const Expr& e);

inline std::string wrap(const Expr& e, int min_prec) {
  std::string s = print(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

inline std::string print(const Expr& e) {
  switch (e.op) {
    case Op::Const: return number_text(e.value);
    case Op::U: return "u";
    case Op::V: return "v";
    case Op::Add: return wrap(*e.a, 1) + " + " + wrap(*e.b, 2);
    case Op::Sub: return wrap(*e.a, 1) + " - " + wrap(*e.b, 2);
    case Op::Mul: return wrap(*e.a, 2) + "*" + wrap(*e.b, 3);
    case Op::Div: return wrap(*e.a, 2) + "/" + wrap(*e.b, 3);
    case Op::Pow: return wrap(*e.a, 4) + "^" + std::to_string(e.exponent);
    case Op::Neg: return "-" + wrap(*e.a, 4);
    default: return std::string(function_name(e.op)) + "(" + print(*e.a) + ")";
  }
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e) { return detail::print(*e); }

// ---------------------------------------------------------------- symbolic derivative

inline ExprPtr derivative(const ExprPtr& e, Op var) {
  using namespace ex;
  switch (e->op) {
    case Op::Const: return num(0);
    case Op::U: return num(var == Op::U ? 1 : 0);
    case Op::V: return num(var == Op::V ? 1 : 0);
    case Op::Add: return add(derivative(e->a, var), derivative(e->b, var));
    case Op::Sub: return sub(derivative(e->a, var), derivative(e->b, var));
    case Op::Neg: return neg(derivative(e->a, var));
    case Op::Mul:
      return add(mul(derivative(e->a, var), e->b), mul(e->a, derivative(e->b, var)));
    case Op::Div: {
      auto num_part = sub(mul(derivative(e->a, var), e->b), mul(e->a, derivative(e->b, var)));
      return div(num_part, pow(e->b, 2));
    }
    case Op::Pow:
      return mul(mul(num(e->exponent), pow(e->a, e->exponent - 1)), derivative(e->a, var));
    default: break;
  }
  ExprPtr da = derivative(e->a, var);
  if (is_const(da, 0)) return num(0);
  const ExprPtr& a = e->a;
  ExprPtr outer;
  switch (e->op) {
    case Op::Sin: outer = call(Op::Cos, a); break;
    case Op::Cos: outer = neg(call(Op::Sin, a)); break;
    case Op::Tan: outer = div(num(1), pow(call(Op::Cos, a), 2)); break;
    case Op::Exp: outer = e; break;
    case Op::Log: outer = div(num(1), a); break;
    case Op::Sqrt: outer = div(num(0.5), e); break;
    case Op::Sinh: outer = call(Op::Cosh, a); break;
    case Op::Cosh: outer = call(Op::Sinh, a); break;
    case Op::Tanh: outer = div(num(1), pow(call(Op::Cosh, a), 2)); break;
    default: throw std::logic_error("derivative: unhandled op");
  }
  return mul(outer, da);
}

// ---------------------------------------------------------------- compiled tape

class Program {
 public:
  Program() = default;
  explicit Program(const std::vector<ExprPtr>& outputs) {
    for (auto& e : outputs) out_.push_back(emit(e));
  }

  size_t outputs() const { return out_.size(); }

  template <int N>
  void eval(double u, double v, Jet<N>* result) const {
    thread_local std::vector<Jet<N>> reg;
    if (reg.size() < code_.size()) reg.resize(code_.size());
    for (size_t k = 0; k < code_.size(); ++k) {
      const Instr& in = code_[k];
      Jet<N>& r = reg[k];
      switch (in.op) {
        case Op::Const: r = Jet<N>::constant(in.value); break;
        case Op::U: r = Jet<N>::var_u(u); break;
        case Op::V: r = Jet<N>::var_v(v); break;
        case Op::Add: r = reg[in.a] + reg[in.b]; break;
        case Op::Sub: r = reg[in.a] - reg[in.b]; break;
        case Op::Mul: r = reg[in.a] * reg[in.b]; break;
        case Op::Div: r = reg[in.a] / reg[in.b]; break;
        case Op::Pow: r = pow(reg[in.a], in.exponent); break;
        case Op::Neg: r = -reg[in.a]; break;
        case Op::Sin: r = sin(reg[in.a]); break;
        case Op::Cos: r = cos(reg[in.a]); break;
        case Op::Tan: r = tan(reg[in.a]); break;
        case Op::Exp: r = exp(reg[in.a]); break;
        case Op::Log: r = log(reg[in.a]); break;
        case Op::Sqrt: r = sqrt(reg[in.a]); break;
        case Op::Sinh: r = sinh(reg[in.a]); break;
        case Op::Cosh: r = cosh(reg[in.a]); break;
        case Op::Tanh: r = tanh(reg[in.a]); break;
      }
    }
    for (size_t i = 0; i < out_.size(); ++i) result[i] = reg[out_[i]];
  }

  double value(size_t output, double u, double v) const {
    std::vector<Jet<0>> r(out_.size());
    eval<0>(u, v, r.data());
    return r[output].value();
  }

 private:
  struct Instr {
    Op op;
    int a = -1, b = -1;
    double value = 0;
    int exponent = 0;
  };
  std::vector<Instr> code_;
  std::vector<int> out_;

  int emit(const ExprPtr& e) {
    Instr in{e->op};
    if (e->a) in.a = emit(e->a);
    if (e->b) in.b = emit(e->b);
    in.value = e->value;
    in.exponent = e->exponent;
    code_.push_back(in);
    return int(code_.size()) - 1;
  }
};

}  // namespace fgb
