#include "posdelay/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace posdelay {

ParseError::ParseError(Kind kind, std::size_t position, const std::string& what)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

struct Expr::Program {
  std::vector<Instr> code;  // postfix
  int n_vars = 0;
  std::string var_name;     // empty: indexed x1..xn
  std::string source;
  std::size_t max_depth = 1;
};

namespace {

struct FuncInfo {
  std::string_view name;
  Expr::Op op;
  int arity;
};

constexpr std::array<FuncInfo, 7> kFunctions{{
    {"exp", Expr::Op::Exp, 1},
    {"log", Expr::Op::Log, 1},
    {"sqrt", Expr::Op::Sqrt, 1},
    {"abs", Expr::Op::Abs, 1},
    {"min", Expr::Op::Min, 2},
    {"max", Expr::Op::Max, 2},
    {"pow", Expr::Op::PowFn, 2},
}};

int arity(Expr::Op op) {
  switch (op) {
    case Expr::Op::Const:
    case Expr::Op::Var:
      return 0;
    case Expr::Op::Neg:
    case Expr::Op::Exp:
    case Expr::Op::Log:
    case Expr::Op::Sqrt:
    case Expr::Op::Abs:
      return 1;
    default:
      return 2;
  }
}

class Parser {
public:
  Parser(std::string_view src, int n_vars, std::string_view name)
      : src_(src), n_vars_(n_vars), name_(name) {}

  std::vector<Expr::Instr> run() {
    skip_ws();
    if (pos_ == src_.size()) fail("empty expression");
    expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return std::move(code_);
  }

private:
  [[noreturn]] void fail(const std::string& msg) {
    if (pos_ >= src_.size()) throw ParseError(ParseError::Kind::Syntax, src_.size(), "syntax error: " + msg + " (end of input)");
    throw ParseError(ParseError::Kind::Syntax, pos_, "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void emit(Expr::Op op, int var = 0, double value = 0.0) { code_.push_back({op, var, value}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Expr::Op::Add);
      } else if (accept('-')) {
        term();
        emit(Expr::Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Expr::Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Expr::Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Expr::Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    atom();
    if (accept('^')) {
      unary();
      emit(Expr::Op::Pow);
    }
  }

  void atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected operand");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
    } else if (c == '(') {
      ++pos_;
      expr();
      expect(')');
    } else {
      fail("unexpected '" + std::string(1, c) + "'");
    }
  }

  void number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t nd = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark;
        fail("malformed exponent");
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value)) {
      pos_ = start;
      fail("numeric literal out of range");
    }
    emit(Expr::Op::Const, 0, value);
  }

  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      for (const auto& fn : kFunctions) {
        if (fn.name != id) continue;
        ++pos_;
        expr();
        for (int k = 1; k < fn.arity; ++k) {
          expect(',');
          expr();
        }
        if (accept(',')) fail(std::string(id) + " takes " + std::to_string(fn.arity) + " argument(s)");
        expect(')');
        emit(fn.op);
        return;
      }
      throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                       "unknown function '" + std::string(id) + "'");
    }

    if (!name_.empty()) {
      if (id == name_) {
        emit(Expr::Op::Var, 0);
        return;
      }
      throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                       "unknown identifier '" + std::string(id) + "'");
    }
    if (id.size() >= 2 && id[0] == 'x') {
      bool all_digits = true;
      for (char d : id.substr(1)) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(d));
      if (all_digits) {
        long index = 0;
        const auto res = std::from_chars(id.data() + 1, id.data() + id.size(), index);
        if (res.ec != std::errc() || index < 1 || index > n_vars_)
          throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                           "variable '" + std::string(id) + "' out of range (n = " +
                               std::to_string(n_vars_) + ")");
        emit(Expr::Op::Var, static_cast<int>(index - 1));
        return;
      }
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                     "unknown identifier '" + std::string(id) + "'");
  }

  std::string_view src_;
  int n_vars_;
  std::string_view name_;
  std::size_t pos_ = 0;
  std::vector<Expr::Instr> code_;
};

std::size_t stack_depth(const std::vector<Expr::Instr>& code) {
  std::size_t depth = 0, max_depth = 1;
  for (const auto& ins : code) {
    depth = depth - static_cast<std::size_t>(arity(ins.op)) + 1;
    max_depth = std::max(max_depth, depth);
  }
  return max_depth;
}

[[noreturn]] void domain(const char* what) { throw EvalError(EvalError::Kind::Domain, what); }

double checked(double r, const char* op) {
  if (std::isfinite(r)) return r;
  if (std::isnan(r)) throw EvalError(EvalError::Kind::Domain, std::string("undefined result in ") + op);
  throw EvalError(EvalError::Kind::Overflow, std::string("overflow in ") + op);
}

double apply_pow(double a, double b) {
  if (a < 0.0 && b != std::trunc(b)) domain("negative base with non-integer exponent");
  if (a == 0.0 && b < 0.0) domain("division by zero in power");
  return checked(std::pow(a, b), "power");
}

double run(const std::vector<Expr::Instr>& code, std::span<const double> x, double* st) {
  std::size_t sp = 0;
  for (const auto& ins : code) {
    switch (ins.op) {
      case Expr::Op::Const:
        st[sp++] = ins.value;
        break;
      case Expr::Op::Var: {
        const double v = x[static_cast<std::size_t>(ins.var)];
        if (!std::isfinite(v)) domain("non-finite variable value");
        st[sp++] = v;
        break;
      }
      case Expr::Op::Neg:
        st[sp - 1] = -st[sp - 1];
        break;
      case Expr::Op::Exp:
        st[sp - 1] = checked(std::exp(st[sp - 1]), "exp");
        break;
      case Expr::Op::Log:
        if (st[sp - 1] <= 0.0) domain("log of non-positive argument");
        st[sp - 1] = std::log(st[sp - 1]);
        break;
      case Expr::Op::Sqrt:
        if (st[sp - 1] < 0.0) domain("sqrt of negative argument");
        st[sp - 1] = std::sqrt(st[sp - 1]);
        break;
      case Expr::Op::Abs:
        st[sp - 1] = std::fabs(st[sp - 1]);
        break;
      default: {
        const double b = st[--sp];
        double& a = st[sp - 1];
        switch (ins.op) {
          case Expr::Op::Add: a = checked(a + b, "addition"); break;
          case Expr::Op::Sub: a = checked(a - b, "subtraction"); break;
          case Expr::Op::Mul: a = checked(a * b, "multiplication"); break;
          case Expr::Op::Div:
            if (b == 0.0) domain("division by zero");
            a = checked(a / b, "division");
            break;
          case Expr::Op::Pow:
          case Expr::Op::PowFn: a = apply_pow(a, b); break;
          case Expr::Op::Min: a = std::min(a, b); break;
          case Expr::Op::Max: a = std::max(a, b); break;
          default: break;
        }
      }
    }
  }
  return st[0];
}

std::string format_const(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Expr::Expr() {
  auto p = std::make_shared<Program>();
  p->code.push_back({Op::Const, 0, 0.0});
  p->source = "0";
  prog_ = std::move(p);
}

Expr Expr::parse(std::string_view source, int n_vars) {
  if (n_vars < 1) throw std::invalid_argument("expression dimension must be positive");
  auto p = std::make_shared<Program>();
  p->code = Parser(source, n_vars, {}).run();
  p->n_vars = n_vars;
  p->source = std::string(source);
  p->max_depth = stack_depth(p->code);
  return Expr(std::move(p));
}

Expr Expr::parse_in(std::string_view source, std::string_view name) {
  if (name.empty()) throw std::invalid_argument("variable name must be nonempty");
  auto p = std::make_shared<Program>();
  p->code = Parser(source, 1, name).run();
  p->n_vars = 1;
  p->var_name = std::string(name);
  p->source = std::string(source);
  p->max_depth = stack_depth(p->code);
  return Expr(std::move(p));
}

double Expr::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != prog_->n_vars && prog_->n_vars != 0)
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match expression dimension " +
                                std::to_string(prog_->n_vars));
  constexpr std::size_t kInline = 64;
  if (prog_->max_depth <= kInline) {
    double st[kInline];
    return run(prog_->code, x, st);
  }
  std::vector<double> st(prog_->max_depth);
  return run(prog_->code, x, st.data());
}

int Expr::n_vars() const { return prog_->n_vars; }

const std::string& Expr::source() const { return prog_->source; }

std::string Expr::to_string() const {
  std::vector<std::string> st;
  for (const auto& ins : prog_->code) {
    switch (ins.op) {
      case Op::Const: st.push_back(format_const(ins.value)); break;
      case Op::Var:
        st.push_back(prog_->var_name.empty() ? "x" + std::to_string(ins.var + 1) : prog_->var_name);
        break;
      case Op::Neg: st.back() = "(-" + st.back() + ")"; break;
      case Op::Exp: st.back() = "exp(" + st.back() + ")"; break;
      case Op::Log: st.back() = "log(" + st.back() + ")"; break;
      case Op::Sqrt: st.back() = "sqrt(" + st.back() + ")"; break;
      case Op::Abs: st.back() = "abs(" + st.back() + ")"; break;
      default: {
        std::string b = std::move(st.back());
        st.pop_back();
        std::string& a = st.back();
        switch (ins.op) {
          case Op::Add: a = "(" + a + " + " + b + ")"; break;
          case Op::Sub: a = "(" + a + " - " + b + ")"; break;
          case Op::Mul: a = "(" + a + " * " + b + ")"; break;
          case Op::Div: a = "(" + a + " / " + b + ")"; break;
          case Op::Pow: a = "(" + a + " ^ " + b + ")"; break;
          case Op::Min: a = "min(" + a + ", " + b + ")"; break;
          case Op::Max: a = "max(" + a + ", " + b + ")"; break;
          case Op::PowFn: a = "pow(" + a + ", " + b + ")"; break;
          default: break;
        }
      }
    }
  }
  return st.back();
}

}  // namespace posdelay
