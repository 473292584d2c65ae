#include "posdelay/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace posdelay {

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::P1: return "P1";
    case Hypothesis::P2: return "P2";
    case Hypothesis::Subhomogeneity: return "Subhomogeneity";
    case Hypothesis::Cooperative: return "Cooperative";
    case Hypothesis::Nondecreasing: return "Nondecreasing";
  }
  return "?";
}

std::string to_string(Verdict v) {
  return v == Verdict::Violated ? "violated" : "no-violation-found";
}

std::string to_string(Field f) { return f == Field::F ? "f" : "g"; }

namespace {

void check_region(double region_bound, std::size_t samples) {
  if (!(region_bound > 0.0) || !std::isfinite(region_bound))
    throw std::invalid_argument("region bound must be positive");
  if (samples < 1) throw std::invalid_argument("at least one sample is required");
}

double eval_at(const Expr& e, const Point& x, const char* what) {
  try {
    return e.eval(x);
  } catch (const EvalError& err) {
    throw PointEvalError(err, x, what);
  }
}

HypothesisReport finish(Hypothesis h, std::size_t used,
                        std::optional<std::pair<std::size_t, Counterexample>> hit) {
  HypothesisReport r;
  r.hypothesis = h;
  r.samples_used = used;
  if (hit) {
    r.verdict = Verdict::Violated;
    r.counterexample = std::move(hit->second);
  }
  return r;
}

}  // namespace

double partial_derivative(const Expr& expr, const Point& x, std::size_t j, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Point hi = x, lo = x;
  hi[j] += step;
  if (x[j] - step >= 0.0) {
    lo[j] -= step;
    return (eval_at(expr, hi, "finite-difference stencil") -
            eval_at(expr, lo, "finite-difference stencil")) /
           (2.0 * step);
  }
  return (eval_at(expr, hi, "finite-difference stencil") -
          eval_at(expr, x, "finite-difference stencil")) /
         step;
}

HypothesisReport check_p1(const SystemSpec& sys, double region_bound, std::size_t samples,
                          Exec exec) {
  check_region(region_bound, samples);
  const std::size_t n = sys.dim();
  const auto pts = region_samples(n, region_bound, samples);
  auto hit = first_hit<Counterexample>(exec, pts.size(), [&](std::size_t k) -> std::optional<Counterexample> {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = eval_at(sys.g()[i], pts[k], "P1 check");
      if (v < -kInequalitySlack) return Counterexample{pts[k], Field::G, i + 1, {}, {}, v, 0.0};
    }
    return std::nullopt;
  });
  return finish(Hypothesis::P1, pts.size(), std::move(hit));
}

HypothesisReport check_p2(const SystemSpec& sys, double region_bound, std::size_t samples,
                          Exec exec) {
  check_region(region_bound, samples);
  const std::size_t n = sys.dim();
  const auto pts = region_samples(n, region_bound, samples);
  auto hit = first_hit<Counterexample>(exec, pts.size() * n, [&](std::size_t idx) -> std::optional<Counterexample> {
    const std::size_t k = idx / n, i = idx % n;
    Point x = pts[k];
    x[i] = 0.0;
    const double v = eval_at(sys.f()[i], x, "P2 check");
    if (v < -kInequalitySlack) return Counterexample{std::move(x), Field::F, i + 1, {}, {}, v, 0.0};
    return std::nullopt;
  });
  return finish(Hypothesis::P2, pts.size() * n, std::move(hit));
}

HypothesisReport check_subhomogeneity(const SystemSpec& sys, double alpha, double region_bound,
                                      std::size_t samples, const std::vector<double>& lambdas,
                                      Exec exec) {
  check_region(region_bound, samples);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (lambdas.empty()) throw std::invalid_argument("at least one lambda is required");
  for (double l : lambdas)
    if (!(l >= 1.0) || !std::isfinite(l)) throw std::invalid_argument("every lambda must be >= 1");

  const std::size_t n = sys.dim();
  const std::size_t nl = lambdas.size();
  const auto pts = region_samples(n, region_bound, samples);
  auto hit = first_hit<Counterexample>(exec, pts.size() * nl, [&](std::size_t idx) -> std::optional<Counterexample> {
    const Point& x = pts[idx / nl];
    const double lambda = lambdas[idx % nl];
    const double scale = std::pow(lambda, alpha);
    Point lx(n);
    for (std::size_t j = 0; j < n; ++j) lx[j] = lambda * x[j];
    for (Field field : {Field::F, Field::G}) {
      const auto& comps = field == Field::F ? sys.f() : sys.g();
      for (std::size_t i = 0; i < n; ++i) {
        const double lhs = eval_at(comps[i], lx, "subhomogeneity check");
        const double rhs = scale * eval_at(comps[i], x, "subhomogeneity check");
        if (lhs > rhs + kInequalitySlack) return Counterexample{x, field, i + 1, {}, lambda, lhs, rhs};
      }
    }
    return std::nullopt;
  });
  return finish(Hypothesis::Subhomogeneity, pts.size() * nl, std::move(hit));
}

namespace {

HypothesisReport check_partials(Hypothesis h, const std::vector<Expr>& comps, Field field,
                                bool off_diagonal_only, double region_bound, std::size_t samples,
                                double fd_step, Exec exec) {
  check_region(region_bound, samples);
  if (!(fd_step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const std::size_t n = comps.size();
  const auto pts = region_samples(n, region_bound, samples);
  auto hit = first_hit<Counterexample>(exec, pts.size(), [&](std::size_t k) -> std::optional<Counterexample> {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (off_diagonal_only && i == j) continue;
        const double d = partial_derivative(comps[i], pts[k], j, fd_step);
        if (d < -kDerivativeSlack) return Counterexample{pts[k], field, i + 1, j + 1, {}, d, 0.0};
      }
    return std::nullopt;
  });
  return finish(h, pts.size(), std::move(hit));
}

}  // namespace

HypothesisReport check_cooperative(const SystemSpec& sys, double region_bound, std::size_t samples,
                                   double fd_step, Exec exec) {
  return check_partials(Hypothesis::Cooperative, sys.f(), Field::F, true, region_bound, samples,
                        fd_step, exec);
}

HypothesisReport check_nondecreasing(const SystemSpec& sys, double region_bound,
                                     std::size_t samples, double fd_step, Exec exec) {
  return check_partials(Hypothesis::Nondecreasing, sys.g(), Field::G, false, region_bound, samples,
                        fd_step, exec);
}

std::optional<double> largest_passing_alpha(const SystemSpec& sys, std::vector<double> candidates,
                                            double region_bound, std::size_t samples,
                                            const std::vector<double>& lambdas, Exec exec) {
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  for (double a : candidates)
    if (!check_subhomogeneity(sys, a, region_bound, samples, lambdas, exec).violated()) return a;
  return std::nullopt;
}

}  // namespace posdelay
