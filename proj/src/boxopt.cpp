#include "posdelay/boxopt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "posdelay/system.hpp"

namespace posdelay {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 32;
constexpr std::size_t kMaxRefineEvaluations = 200000;

double eval_at(const Expr& e, const Point& x) {
  try {
    return e.eval(x);
  } catch (const EvalError& err) {
    throw PointEvalError(err, x, "box maximization");
  }
}

}  // namespace

BoxSupResult maximize_on_box(const Expr& field, const Point& w, std::optional<std::size_t> pinned,
                             const BoxSolverConfig& cfg) {
  const std::size_t n = w.size();
  if (static_cast<int>(n) != field.n_vars())
    throw std::invalid_argument("box dimension " + std::to_string(n) +
                                " does not match field dimension " + std::to_string(field.n_vars()));
  if (cfg.resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  if (pinned && *pinned >= n) throw std::invalid_argument("face index out of range");
  for (double wj : w)
    if (!(wj >= 0.0) || !std::isfinite(wj))
      throw std::invalid_argument("box upper corner must be finite and nonnegative");

  const auto r = static_cast<std::size_t>(cfg.resolution);
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < n; ++j)
    if (w[j] > 0.0 && (!pinned || j != *pinned)) free.push_back(j);

  std::size_t total = 1;
  for (std::size_t k = 0; k < free.size(); ++k) {
    if (total > kMaxGridPoints / r) throw std::invalid_argument("grid too large for box maximization");
    total *= r;
  }

  const double denom = static_cast<double>(r - 1);
  // Coordinate free[0] is the most significant digit, so index order is
  // lexicographic order of grid multi-indices.
  auto grid_point = [&](std::size_t index) {
    Point x(n, 0.0);
    if (pinned) x[*pinned] = w[*pinned];
    for (std::size_t k = free.size(); k-- > 0;) {
      const std::size_t digit = index % r;
      index /= r;
      x[free[k]] = w[free[k]] * (static_cast<double>(digit) / denom);
    }
    return x;
  };

  const auto [best_index, best_value] =
      argmax(cfg.exec, total, [&](std::size_t i) { return eval_at(field, grid_point(i)); });

  BoxSupResult res;
  res.argmax = grid_point(best_index);
  res.value = best_value;
  res.grid_resolution = cfg.resolution;
  res.evaluations = total;
  res.refined = cfg.refine;
  if (!cfg.refine || free.empty()) return res;

  double wmax = 0.0;
  for (double wj : w) wmax = std::max(wmax, wj);
  const double tol = 1e-8 * std::max(1.0, wmax);
  std::vector<double> steps(n, 0.0);
  for (std::size_t j : free) steps[j] = w[j] / denom;
  auto largest_step = [&] {
    double s = 0.0;
    for (std::size_t j : free) s = std::max(s, steps[j]);
    return s;
  };

  Point x = res.argmax;
  double best = res.value;
  std::size_t extra = 0;
  while (largest_step() >= tol && extra < kMaxRefineEvaluations) {
    bool improved = false;
    for (std::size_t j : free) {
      for (double dir : {1.0, -1.0}) {
        Point cand = x;
        cand[j] = std::clamp(x[j] + dir * steps[j], 0.0, w[j]);
        if (cand[j] == x[j]) continue;
        const double v = eval_at(field, cand);
        ++extra;
        if (v > best) {
          best = v;
          x = std::move(cand);
          improved = true;
          break;
        }
      }
    }
    if (!improved)
      for (std::size_t j : free) steps[j] *= 0.5;
  }

  res.argmax = std::move(x);
  res.value = best;
  res.evaluations += extra;
  return res;
}

BoxSupResult sup_box(const Expr& field, const Point& w, const BoxSolverConfig& cfg) {
  return maximize_on_box(field, w, std::nullopt, cfg);
}

BoxSupResult sup_face(const Expr& field, const Point& w, std::size_t face,
                      const BoxSolverConfig& cfg) {
  if (face < 1 || face > w.size()) throw std::invalid_argument("face index must be in 1..n");
  return maximize_on_box(field, w, face - 1, cfg);
}

}  // namespace posdelay
