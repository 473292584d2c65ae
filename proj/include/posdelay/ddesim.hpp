#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posdelay/boxopt.hpp"
#include "posdelay/parallel.hpp"
#include "posdelay/system.hpp"

namespace posdelay {

/// Initial function on [-tau, 0]: either a constant vector or one expression
/// in `t` per component.
class HistorySpec {
public:
  static HistorySpec constant(Point value);
  static HistorySpec expressions(std::vector<Expr> components);
  /// Comma-separated components, each a number or an expression in t.
  /// Commas inside parentheses do not split.
  static HistorySpec parse(std::string_view text, std::size_t n);

  bool is_constant() const { return exprs_.empty(); }
  std::size_t dim() const { return is_constant() ? value_.size() : exprs_.size(); }
  Point at(double t) const;
  /// Derivative in t (zero for constants, central differences otherwise).
  Point slope(double t) const;
  std::string to_string() const;

  /// Throws std::invalid_argument if any component is negative on a
  /// 201-point sample of [-tau, 0].
  void validate(double tau) const;

private:
  Point value_;
  std::vector<Expr> exprs_;
};

class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, double time, Point state);
  double time() const { return time_; }
  const Point& state() const { return state_; }

private:
  double time_;
  Point state_;
};

/// Dense-output solution on [-tau, t_end]. Mesh points before 0 carry the
/// history; on [0, t_end] the interpolant is piecewise cubic Hermite.
struct Trajectory {
  double tau = 0.0;
  std::vector<double> mesh;
  std::vector<Point> states;
  std::vector<Point> slopes;
  HistorySpec history;

  std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
  Point at(double t) const;
  const Point& final_state() const { return states.back(); }
  double final_norm() const;
  /// max over mesh points t >= 0 of max(0, -min_i x_i(t)).
  double max_negativity() const;
};

/// f(x) + g(delayed) or any other right-hand side with the same shape.
using DelayedRhs = std::function<void(std::span<const double> x, std::span<const double> delayed,
                                      std::span<double> out)>;

/// Method-of-steps RK4. For tau > 0 the step is tau / ceil(tau / dt), so
/// every multiple of tau is a mesh point; delayed values come from the
/// history (t - tau <= 0) or the Hermite interpolant of the computed solution.
Trajectory integrate_rhs(const DelayedRhs& rhs, std::size_t n, double tau, const HistorySpec& phi,
                         double t_end, double dt);

Trajectory integrate(const SystemSpec& sys, double tau, const HistorySpec& phi, double t_end,
                     double dt);

/// Comparison system: component i is max over the face {0 <= x <= x(t),
/// x_i = x_i(t)} of f_i plus max over [0, x(t - tau)] of g_i.
Trajectory integrate_comparison(const SystemSpec& sys, double tau, const HistorySpec& phi,
                                double t_end, double dt, const BoxSolverConfig& cfg);

/// Solver settings used for comparison-system integration by default.
inline BoxSolverConfig comparison_solver_defaults() {
  BoxSolverConfig cfg;
  cfg.resolution = 17;
  cfg.exec = Exec::Serial;
  return cfg;
}

struct DominanceReport {
  double max_excess = 0.0;  // max over mesh and components of x_i - xbar_i
  double time_of_max = 0.0;
  std::size_t component = 0;  // 1-based
  /// Largest ratio of excess to 1e-6 (1 + |xbar(t)|_inf); holds iff <= 1.
  double worst_ratio = 0.0;
  bool holds = true;
  Trajectory original;
  Trajectory comparison;
};

inline constexpr double kDominanceTol = 1e-6;

DominanceReport check_dominance(const SystemSpec& sys, double tau, const HistorySpec& phi,
                                double t_end, double dt,
                                const BoxSolverConfig& cfg = comparison_solver_defaults());

struct SweepRow {
  double tau = 0.0;
  std::size_t history = 0;  // index into SweepReport::histories
  double final_norm = 0.0;
  double max_negativity = 0.0;
  bool converged = false;
  std::string error;  // empty unless the integration failed
};

struct SweepReport {
  std::vector<double> taus;
  std::vector<HistorySpec> histories;
  double conv_tol = 0.0;
  std::vector<SweepRow> rows;  // tau-major, input order

  bool all_converged() const;
};

SweepReport delay_sweep(const SystemSpec& sys, const std::vector<double>& taus,
                        const std::vector<HistorySpec>& phis, double t_end, double dt,
                        double conv_tol, Exec exec = Exec::Parallel);

}  // namespace posdelay
