#include "vwave/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "vwave/errors.hpp"

namespace vwave {

namespace {

enum class Op : unsigned char {
  kConst, kVarX, kVarU,
  kAdd, kSub, kMul, kDiv, kPow, kNeg,
  kSin, kCos, kExp, kSqrt, kTanh,
};

struct Instr {
  Op op;
  double imm = 0;        // constant value, or exponent for kPow
  bool integral = false; // exponent is an integer
};

constexpr int kMaxStack = 64;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

struct Expr::Node {
  Op op;
  double value = 0;       // kConst payload or kPow exponent
  bool integral = false;
  std::shared_ptr<const Node> a, b;

  // Flattened postfix program plus its stack requirement.
  std::vector<Instr> tape;
  int max_stack = 0;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

void flatten(const Expr::Node* n, std::vector<Instr>& out) {
  if (n->a) flatten(n->a.get(), out);
  if (n->b) flatten(n->b.get(), out);
  out.push_back({n->op, n->value, n->integral});
}

int stack_need(const std::vector<Instr>& tape) {
  int depth = 0, peak = 0;
  for (const Instr& in : tape) {
    switch (in.op) {
      case Op::kConst:
      case Op::kVarX:
      case Op::kVarU:
        ++depth;
        break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv:
        --depth;
        break;
      default:
        break;  // unary: depth unchanged
    }
    if (depth > peak) peak = depth;
  }
  return peak;
}

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr,
                  double value = 0, bool integral = false) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->integral = integral;
  n->a = std::move(a);
  n->b = std::move(b);
  flatten(n.get(), n->tape);
  n->max_stack = stack_need(n->tape);
  if (n->max_stack > kMaxStack)
    throw ParseError("expression nests too deeply", 0);
  return n;
}

template <typename T>
T run_tape(const std::vector<Instr>& tape, const T& x, const T& u) {
  std::array<T, kMaxStack> st;
  int top = -1;
  for (const Instr& in : tape) {
    switch (in.op) {
      case Op::kConst: st[++top] = T::constant(in.imm); break;
      case Op::kVarX:  st[++top] = x; break;
      case Op::kVarU:  st[++top] = u; break;
      case Op::kAdd:   st[top - 1] = st[top - 1] + st[top]; --top; break;
      case Op::kSub:   st[top - 1] = st[top - 1] - st[top]; --top; break;
      case Op::kMul:   st[top - 1] = st[top - 1] * st[top]; --top; break;
      case Op::kDiv:   st[top - 1] = vw_div(st[top - 1], st[top]); --top; break;
      case Op::kPow:   st[top] = vw_pow(st[top], in.imm, in.integral); break;
      case Op::kNeg:   st[top] = -st[top]; break;
      case Op::kSin:   st[top] = vw_sin(st[top]); break;
      case Op::kCos:   st[top] = vw_cos(st[top]); break;
      case Op::kExp:   st[top] = vw_exp(st[top]); break;
      case Op::kSqrt:  st[top] = vw_sqrt(st[top]); break;
      case Op::kTanh:  st[top] = vw_tanh(st[top]); break;
    }
  }
  return st[0];
}

// Plain-double specialization avoids the dual machinery in the hot path.
double run_tape_scalar(const std::vector<Instr>& tape, double x, double u) {
  std::array<double, kMaxStack> st;
  int top = -1;
  for (const Instr& in : tape) {
    switch (in.op) {
      case Op::kConst: st[++top] = in.imm; break;
      case Op::kVarX:  st[++top] = x; break;
      case Op::kVarU:  st[++top] = u; break;
      case Op::kAdd:   st[top - 1] += st[top]; --top; break;
      case Op::kSub:   st[top - 1] -= st[top]; --top; break;
      case Op::kMul:   st[top - 1] *= st[top]; --top; break;
      case Op::kDiv:   st[top - 1] = vw_div(st[top - 1], st[top]); --top; break;
      case Op::kPow:   st[top] = vw_pow(st[top], in.imm, in.integral); break;
      case Op::kNeg:   st[top] = -st[top]; break;
      case Op::kSin:   st[top] = std::sin(st[top]); break;
      case Op::kCos:   st[top] = std::cos(st[top]); break;
      case Op::kExp:   st[top] = std::exp(st[top]); break;
      case Op::kSqrt:  st[top] = vw_sqrt(st[top]); break;
      case Op::kTanh:  st[top] = std::tanh(st[top]); break;
    }
  }
  return st[0];
}

void check_finite(double v) {
  if (!std::isfinite(v))
    throw EvalDomainError("expression evaluated to a non-finite value");
}

void check_finite(const Dual1& d) {
  if (!std::isfinite(d.v) || !std::isfinite(d.dx) || !std::isfinite(d.du))
    throw EvalDomainError("expression derivative is non-finite");
}

void check_finite(const Dual2& d) {
  if (!std::isfinite(d.v) || !std::isfinite(d.dx) || !std::isfinite(d.du) ||
      !std::isfinite(d.dxx) || !std::isfinite(d.dxu) || !std::isfinite(d.duu))
    throw EvalDomainError("expression derivative is non-finite");
}

}  // namespace

Expr::Expr() : root_(make_node(Op::kConst, nullptr, nullptr, 0.0)) {}
Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expr Expr::constant(double c) {
  return Expr(make_node(Op::kConst, nullptr, nullptr, c));
}

double Expr::eval(double x, double u) const {
  double v = run_tape_scalar(root_->tape, x, u);
  check_finite(v);
  return v;
}

Dual1 Expr::eval_d1(double x, double u) const {
  Dual1 d = run_tape(root_->tape, Dual1::var_x(x), Dual1::var_u(u));
  check_finite(d);
  return d;
}

Dual2 Expr::eval_d2(double x, double u) const {
  Dual2 d = run_tape(root_->tape, Dual2::var_x(x), Dual2::var_u(u));
  check_finite(d);
  return d;
}

bool Expr::depends_on_x() const {
  for (const Instr& in : root_->tape)
    if (in.op == Op::kVarX) return true;
  return false;
}

bool Expr::depends_on_u() const {
  for (const Instr& in : root_->tape)
    if (in.op == Op::kVarU) return true;
  return false;
}

bool Expr::is_constant() const { return !depends_on_x() && !depends_on_u(); }

namespace {

std::string print_node(const Expr::Node* n) {
  switch (n->op) {
    case Op::kConst: return format_double(n->value);
    case Op::kVarX:  return "x";
    case Op::kVarU:  return "u";
    case Op::kAdd:   return "(" + print_node(n->a.get()) + " + " + print_node(n->b.get()) + ")";
    case Op::kSub:   return "(" + print_node(n->a.get()) + " - " + print_node(n->b.get()) + ")";
    case Op::kMul:   return "(" + print_node(n->a.get()) + " * " + print_node(n->b.get()) + ")";
    case Op::kDiv:   return "(" + print_node(n->a.get()) + " / " + print_node(n->b.get()) + ")";
    case Op::kPow:   return "(" + print_node(n->a.get()) + "^(" + format_double(n->value) + "))";
    case Op::kNeg:   return "(-" + print_node(n->a.get()) + ")";
    case Op::kSin:   return "sin(" + print_node(n->a.get()) + ")";
    case Op::kCos:   return "cos(" + print_node(n->a.get()) + ")";
    case Op::kExp:   return "exp(" + print_node(n->a.get()) + ")";
    case Op::kSqrt:  return "sqrt(" + print_node(n->a.get()) + ")";
    case Op::kTanh:  return "tanh(" + print_node(n->a.get()) + ")";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (eat('+')) lhs = make_node(Op::kAdd, lhs, parse_product());
      else if (eat('-')) lhs = make_node(Op::kSub, lhs, parse_product());
      else return lhs;
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*')) lhs = make_node(Op::kMul, lhs, parse_unary());
      else if (eat('/')) lhs = make_node(Op::kDiv, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_node(Op::kNeg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) {
      double c = parse_exponent();
      bool integral = std::rint(c) == c && std::abs(c) < 1e9;
      return make_node(Op::kPow, base, nullptr, c, integral);
    }
    return base;
  }

  // Exponents are numeric constants, optionally signed or parenthesized.
  double parse_exponent() {
    skip_ws();
    if (eat('(')) {
      double c = parse_exponent();
      if (!eat(')')) throw ParseError("expected ')' after exponent", pos_);
      return c;
    }
    double sign = 1.0;
    if (eat('-')) sign = -1.0;
    skip_ws();
    return sign * parse_number();
  }

  double parse_number() {
    skip_ws();
    double value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin)
      throw ParseError("expected a number", pos_);
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return make_node(Op::kConst, nullptr, nullptr, parse_number());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view id = text_.substr(start, pos_ - start);
      if (id == "x") return make_node(Op::kVarX);
      if (id == "u") return make_node(Op::kVarU);
      Op fn;
      if (id == "sin") fn = Op::kSin;
      else if (id == "cos") fn = Op::kCos;
      else if (id == "exp") fn = Op::kExp;
      else if (id == "sqrt") fn = Op::kSqrt;
      else if (id == "tanh") fn = Op::kTanh;
      else throw ParseError("unknown identifier '" + std::string(id) + "'", start);
      if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
      NodePtr arg = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return make_node(fn, arg);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }
};

}  // namespace

std::string Expr::to_string() const { return print_node(root_.get()); }

Expr parse_expr(std::string_view text) {
  Parser p(text);
  return Expr(p.parse());
}

}  // namespace vwave
