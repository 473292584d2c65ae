#pragma once

#include <span>
#include <string>
#include <vector>

#include "posdelay/expr.hpp"
#include "posdelay/sampling.hpp"

namespace posdelay {

/// (f + g)(0) must vanish to within this absolute tolerance.
inline constexpr double kEquilibriumTol = 1e-12;

class EquilibriumError : public std::runtime_error {
public:
  EquilibriumError(std::size_t component, double residual);
  std::size_t component() const { return component_; }  // 1-based
  double residual() const { return residual_; }

private:
  std::size_t component_;
  double residual_;
};

/// An expression failure at a specific point (sample, stencil, or state).
class PointEvalError : public EvalError {
public:
  PointEvalError(const EvalError& cause, Point point, const std::string& context);
  const Point& point() const { return point_; }

private:
  Point point_;
};

/// The delayed system  x'(t) = f(x(t)) + g(x(t - tau))  with a declared
/// subhomogeneity degree.
class SystemSpec {
public:
  SystemSpec(std::vector<Expr> f, std::vector<Expr> g, double alpha);

  static SystemSpec from_strings(const std::vector<std::string>& f,
                                 const std::vector<std::string>& g, double alpha);

  std::size_t dim() const { return f_.size(); }
  double alpha() const { return alpha_; }
  const std::vector<Expr>& f() const { return f_; }
  const std::vector<Expr>& g() const { return g_; }

  /// Same fields, different declared degree.
  SystemSpec with_alpha(double alpha) const { return SystemSpec(f_, g_, alpha); }

  void eval_f(std::span<const double> x, std::span<double> out) const;
  void eval_g(std::span<const double> x, std::span<double> out) const;
  /// f(x) + g(delayed)
  void eval_rhs(std::span<const double> x, std::span<const double> delayed,
                std::span<double> out) const;

private:
  std::vector<Expr> f_;
  std::vector<Expr> g_;
  double alpha_;
};

}  // namespace posdelay
