#include "pstop/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace pstop {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class expr_parser {
 public:
  expr_parser(const std::string& text, expression& out) : text_(text), out_(out) {}

  void run() {
    int root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    out_.root_ = root;
  }

 private:
  const std::string& text_;
  expression& out_;
  std::size_t pos_ = 0;

  using op = expression::op;

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

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

  int add_node(op kind, double value = 0.0, int lhs = -1, int rhs = -1) {
    out_.nodes_.push_back({kind, value, lhs, rhs});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (true) {
      if (eat('+'))
        lhs = add_node(op::add, 0.0, lhs, parse_term());
      else if (eat('-'))
        lhs = add_node(op::sub, 0.0, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (true) {
      if (eat('*'))
        lhs = add_node(op::mul, 0.0, lhs, parse_unary());
      else if (eat('/'))
        lhs = add_node(op::div, 0.0, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (eat('-')) return add_node(op::neg, 0.0, parse_unary());
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (eat('^')) return add_node(op::pow_bin, 0.0, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - start);
    return add_node(op::constant, v);
  }

  int parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return add_node(op::variable);

    op kind;
    bool binary = false;
    if (name == "exp")
      kind = op::fn_exp;
    else if (name == "log")
      kind = op::fn_log;
    else if (name == "sqrt")
      kind = op::fn_sqrt;
    else if (name == "abs")
      kind = op::fn_abs;
    else if (name == "sinh")
      kind = op::fn_sinh;
    else if (name == "cosh")
      kind = op::fn_cosh;
    else if (name == "min") {
      kind = op::fn_min;
      binary = true;
    } else if (name == "max") {
      kind = op::fn_max;
      binary = true;
    } else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }

    if (!eat('(')) fail("expected '(' after function name");
    int a = parse_expr();
    int b = -1;
    if (binary) {
      if (!eat(',')) fail("expected ',' in two-argument function");
      b = parse_expr();
    } else if (peek() == ',') {
      fail("function '" + name + "' takes one argument");
    }
    if (!eat(')')) fail("expected ')'");
    return add_node(kind, 0.0, a, b);
  }
};

expression expression::parse(const std::string& text) {
  expression e;
  expr_parser(text, e).run();
  return e;
}

double expression::eval_node(int idx, double x) const {
  const node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case op::constant:
      return n.value;
    case op::variable:
      return x;
    case op::add:
      return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case op::sub:
      return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case op::mul:
      return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case op::div:
      return eval_node(n.lhs, x) / eval_node(n.rhs, x);
    case op::pow_bin:
      return std::pow(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case op::neg:
      return -eval_node(n.lhs, x);
    case op::fn_exp:
      return std::exp(eval_node(n.lhs, x));
    case op::fn_log:
      return std::log(eval_node(n.lhs, x));
    case op::fn_sqrt:
      return std::sqrt(eval_node(n.lhs, x));
    case op::fn_abs:
      return std::fabs(eval_node(n.lhs, x));
    case op::fn_sinh:
      return std::sinh(eval_node(n.lhs, x));
    case op::fn_cosh:
      return std::cosh(eval_node(n.lhs, x));
    case op::fn_min:
      return std::fmin(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case op::fn_max:
      return std::fmax(eval_node(n.lhs, x), eval_node(n.rhs, x));
  }
  return kNan;
}

double expression::eval_raw(double x) const {
  if (root_ < 0) throw eval_error("evaluating empty expression");
  return eval_node(root_, x);
}

double expression::operator()(double x) const {
  double v = eval_raw(x);
  if (std::isnan(v))
    throw eval_error("domain error evaluating '" + render() + "' at x=" + format_double(x));
  return v;
}

bool expression::is_constant() const {
  return root_ >= 0 && nodes_[static_cast<std::size_t>(root_)].kind == op::constant;
}

double expression::constant_value() const { return nodes_[static_cast<std::size_t>(root_)].value; }

int expression::precedence(op kind) {
  switch (kind) {
    case op::add:
    case op::sub:
      return 1;
    case op::mul:
    case op::div:
      return 2;
    case op::neg:
      return 3;
    case op::pow_bin:
      return 4;
    default:
      return 6;  // atoms and function calls delimit themselves
  }
}

void expression::render_node(int idx, std::string& out) const {
  const node& n = nodes_[static_cast<std::size_t>(idx)];
  int prec = precedence(n.kind);
  auto child = [&](int c, bool needs_paren) {
    if (needs_paren) out += '(';
    render_node(c, out);
    if (needs_paren) out += ')';
  };
  switch (n.kind) {
    case op::constant:
      out += format_double(n.value);
      return;
    case op::variable:
      out += 'x';
      return;
    case op::add:
    case op::sub:
    case op::mul:
    case op::div: {
      child(n.lhs, precedence(nodes_[static_cast<std::size_t>(n.lhs)].kind) < prec);
      out += (n.kind == op::add ? '+' : n.kind == op::sub ? '-' : n.kind == op::mul ? '*' : '/');
      // left-associative: parenthesize an equal-precedence right child
      child(n.rhs, precedence(nodes_[static_cast<std::size_t>(n.rhs)].kind) <= prec);
      return;
    }
    case op::pow_bin: {
      // right-associative and tightest binder: parenthesize any compound base
      child(n.lhs, precedence(nodes_[static_cast<std::size_t>(n.lhs)].kind) <= prec);
      out += '^';
      child(n.rhs, precedence(nodes_[static_cast<std::size_t>(n.rhs)].kind) < prec);
      return;
    }
    case op::neg:
      out += '-';
      child(n.lhs, precedence(nodes_[static_cast<std::size_t>(n.lhs)].kind) < prec);
      return;
    case op::fn_exp:
    case op::fn_log:
    case op::fn_sqrt:
    case op::fn_abs:
    case op::fn_sinh:
    case op::fn_cosh: {
      const char* name = n.kind == op::fn_exp    ? "exp"
                         : n.kind == op::fn_log  ? "log"
                         : n.kind == op::fn_sqrt ? "sqrt"
                         : n.kind == op::fn_abs  ? "abs"
                         : n.kind == op::fn_sinh ? "sinh"
                                                 : "cosh";
      out += name;
      out += '(';
      render_node(n.lhs, out);
      out += ')';
      return;
    }
    case op::fn_min:
    case op::fn_max:
      out += (n.kind == op::fn_min ? "min(" : "max(");
      render_node(n.lhs, out);
      out += ',';
      render_node(n.rhs, out);
      out += ')';
      return;
  }
}

std::string expression::render() const {
  if (root_ < 0) return "";
  std::string out;
  render_node(root_, out);
  return out;
}

}  // namespace pstop
