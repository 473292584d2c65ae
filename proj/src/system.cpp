#include "posdelay/system.hpp"

#include <cmath>
#include <sstream>

namespace posdelay {

namespace {

std::string describe_point(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t j = 0; j < p.size(); ++j) os << (j ? ", " : "") << p[j];
  os << ")";
  return os.str();
}

}  // namespace

EquilibriumError::EquilibriumError(std::size_t component, double residual)
    : std::runtime_error("origin is not an equilibrium: (f+g)_" + std::to_string(component) +
                         "(0) = " + std::to_string(residual)),
      component_(component),
      residual_(residual) {}

PointEvalError::PointEvalError(const EvalError& cause, Point point, const std::string& context)
    : EvalError(cause.kind(), context + " at x = " + describe_point(point) + ": " + cause.what()),
      point_(std::move(point)) {}

SystemSpec::SystemSpec(std::vector<Expr> f, std::vector<Expr> g, double alpha)
    : f_(std::move(f)), g_(std::move(g)), alpha_(alpha) {
  const std::size_t n = f_.size();
  if (n < 1) throw std::invalid_argument("system dimension must be at least 1");
  if (g_.size() != n) throw std::invalid_argument("f and g must have the same number of components");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw std::invalid_argument("alpha must be a positive real");
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(f_[i].n_vars()) != n || static_cast<std::size_t>(g_[i].n_vars()) != n)
      throw std::invalid_argument("component " + std::to_string(i + 1) + " has the wrong dimension");
  }
  const Point zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    try {
      r = f_[i].eval(zero) + g_[i].eval(zero);
    } catch (const EvalError& e) {
      throw PointEvalError(e, zero, "equilibrium check of component " + std::to_string(i + 1));
    }
    if (std::fabs(r) > kEquilibriumTol) throw EquilibriumError(i + 1, r);
  }
}

SystemSpec SystemSpec::from_strings(const std::vector<std::string>& f,
                                    const std::vector<std::string>& g, double alpha) {
  const int n = static_cast<int>(f.size());
  std::vector<Expr> fe, ge;
  for (const auto& s : f) fe.push_back(Expr::parse(s, n));
  for (const auto& s : g) ge.push_back(Expr::parse(s, n));
  return SystemSpec(std::move(fe), std::move(ge), alpha);
}

void SystemSpec::eval_f(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < f_.size(); ++i) out[i] = f_[i].eval(x);
}

void SystemSpec::eval_g(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < g_.size(); ++i) out[i] = g_[i].eval(x);
}

void SystemSpec::eval_rhs(std::span<const double> x, std::span<const double> delayed,
                          std::span<double> out) const {
  for (std::size_t i = 0; i < f_.size(); ++i) out[i] = f_[i].eval(x) + g_[i].eval(delayed);
}

}  // namespace posdelay
