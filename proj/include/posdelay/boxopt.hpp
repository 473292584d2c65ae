#pragma once

#include <cstddef>
#include <optional>

#include "posdelay/expr.hpp"
#include "posdelay/parallel.hpp"
#include "posdelay/sampling.hpp"

namespace posdelay {

struct BoxSolverConfig {
  int resolution = 33;  // grid points per free coordinate
  bool refine = true;
  Exec exec = Exec::Parallel;
};

/// Grid-plus-refinement estimate of a maximum over a box. The estimate is a
/// lower bound on the true supremum; `value` is exactly field(argmax).
struct BoxSupResult {
  double value = 0.0;
  Point argmax;
  int grid_resolution = 0;
  bool refined = false;
  std::size_t evaluations = 0;
};

/// max of field over the order interval [0, w].
BoxSupResult sup_box(const Expr& field, const Point& w, const BoxSolverConfig& cfg = {});

/// max of field over the face {0 <= x <= w, x_i = w_i}; `face` is 1-based.
BoxSupResult sup_face(const Expr& field, const Point& w, std::size_t face,
                      const BoxSolverConfig& cfg = {});

/// Shared engine: coordinate `pinned` (zero-based), if any, is fixed at w.
BoxSupResult maximize_on_box(const Expr& field, const Point& w, std::optional<std::size_t> pinned,
                             const BoxSolverConfig& cfg);

}  // namespace posdelay
