#pragma once

// Sampling-based falsifiers for the structural hypotheses on f and g.
// A clean report means "no violation found on the sampled region", never a
// proof over the whole orthant.

#include <optional>
#include <string>
#include <vector>

#include "posdelay/parallel.hpp"
#include "posdelay/system.hpp"

namespace posdelay {

inline constexpr double kInequalitySlack = 1e-9;
inline constexpr double kDerivativeSlack = 1e-6;

enum class Hypothesis { P1, P2, Subhomogeneity, Cooperative, Nondecreasing };
enum class Verdict { NoViolationFound, Violated };
enum class Field { F, G };

std::string to_string(Hypothesis h);
std::string to_string(Verdict v);
std::string to_string(Field f);

/// The required relation is `value >= bound` for P1, P2, Cooperative and
/// Nondecreasing, and `value <= bound` for Subhomogeneity, where value is
/// field(lambda x) and bound is lambda^alpha field(x).
struct Counterexample {
  Point point;
  Field field = Field::F;
  std::size_t component = 0;           // 1-based
  std::optional<std::size_t> wrt;      // 1-based partial derivative index
  std::optional<double> lambda;
  double value = 0.0;
  double bound = 0.0;
};

struct HypothesisReport {
  Hypothesis hypothesis = Hypothesis::P1;
  Verdict verdict = Verdict::NoViolationFound;
  std::optional<Counterexample> counterexample;
  std::size_t samples_used = 0;

  bool violated() const { return verdict == Verdict::Violated; }
};

HypothesisReport check_p1(const SystemSpec& sys, double region_bound, std::size_t samples,
                          Exec exec = Exec::Parallel);

/// Samples the faces {x_i = 0} by projecting the shared sample set.
HypothesisReport check_p2(const SystemSpec& sys, double region_bound, std::size_t samples,
                          Exec exec = Exec::Parallel);

/// f(lambda x) <= lambda^alpha f(x) + slack, and the same for g.
HypothesisReport check_subhomogeneity(const SystemSpec& sys, double alpha, double region_bound,
                                      std::size_t samples, const std::vector<double>& lambdas,
                                      Exec exec = Exec::Parallel);

HypothesisReport check_cooperative(const SystemSpec& sys, double region_bound, std::size_t samples,
                                   double fd_step, Exec exec = Exec::Parallel);

HypothesisReport check_nondecreasing(const SystemSpec& sys, double region_bound,
                                     std::size_t samples, double fd_step,
                                     Exec exec = Exec::Parallel);

/// Largest candidate degree whose subhomogeneity check finds no violation.
std::optional<double> largest_passing_alpha(const SystemSpec& sys, std::vector<double> candidates,
                                            double region_bound, std::size_t samples,
                                            const std::vector<double>& lambdas,
                                            Exec exec = Exec::Parallel);

/// Finite-difference estimate of d expr / d x_j (j zero-based). Central
/// differences; forward when the backward stencil would leave the orthant.
double partial_derivative(const Expr& expr, const Point& x, std::size_t j, double step);

inline const std::vector<double>& default_lambdas() {
  static const std::vector<double> kLambdas{1.0, 1.5, 2.0, 4.0};
  return kLambdas;
}

}  // namespace posdelay
