#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace posdelay {

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, UnknownIdentifier, VariableOutOfRange };

  ParseError(Kind kind, std::size_t position, const std::string& what);

  Kind kind() const { return kind_; }
  /// Zero-based character offset into the source text.
  std::size_t position() const { return position_; }

private:
  Kind kind_;
  std::size_t position_;
};

class EvalError : public std::runtime_error {
public:
  enum class Kind { Domain, Overflow };

  EvalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Immutable scalar expression over variables x1..xn (or a single named
/// variable such as `t`). Copies share the compiled program.
///
/// Grammar, lowest to highest precedence:
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := ('-' | '+') unary | power
///   power := atom ('^' unary)?            right associative
///   atom  := number | variable | func '(' args ')' | '(' expr ')'
/// Functions: exp log sqrt abs (one argument), min max pow (two).
class Expr {
public:
  enum class Op : unsigned char {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow,
    Exp, Log, Sqrt, Abs, Min, Max, PowFn
  };

  struct Instr {
    Op op;
    int var;       // zero-based, for Var
    double value;  // for Const
  };

  Expr();  // the constant 0 over zero variables

  static Expr parse(std::string_view source, int n_vars);
  /// Single-variable expression; `name` is the only accepted identifier.
  static Expr parse_in(std::string_view source, std::string_view name);

  double eval(std::span<const double> x) const;

  int n_vars() const;
  /// Fully parenthesized text that re-parses to an identical program.
  std::string to_string() const;
  const std::string& source() const;

private:
  struct Program;
  explicit Expr(std::shared_ptr<const Program> p) : prog_(std::move(p)) {}
  std::shared_ptr<const Program> prog_;
};

}  // namespace posdelay
