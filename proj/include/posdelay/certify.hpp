#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "posdelay/boxopt.hpp"
#include "posdelay/hypotheses.hpp"
#include "posdelay/system.hpp"

namespace posdelay {

/// Strict inequalities are decided as "margin > kMarginEps".
inline constexpr double kMarginEps = 1e-9;

struct CertifyConfig {
  BoxSolverConfig solver;
  double margin_eps = kMarginEps;
  /// Depths whose interior grid has at most this many points are searched
  /// exhaustively; deeper levels refine around the best points of the
  /// previous level.
  std::size_t full_grid_limit = 50000;
  std::size_t beam_width = 16;
  Exec exec = Exec::Parallel;
};

/// h_i(w) = max{ f_i(x) : 0 <= x <= w, x_i = w_i } + max{ g_i(y) : 0 <= y <= w }.
Point comparison_h(const SystemSpec& sys, const Point& w, const BoxSolverConfig& cfg = {});

struct IndexDetail {
  std::size_t index = 0;  // 1-based
  double lhs = 0.0;       // sup g_i over [0, w]
  double rhs_neg = 0.0;   // sup f_i over the face x_i = w_i
  double margin = 0.0;    // -rhs_neg - lhs
};

/// Top-level lhs/rhs_neg/margin describe the witness index when satisfied,
/// otherwise the index with the largest (least negative) margin.
struct ConditionReport {
  Point w;
  bool satisfied = false;
  std::optional<std::size_t> witness_index;  // 1-based
  double lhs = 0.0;
  double rhs_neg = 0.0;
  double margin = 0.0;
  std::vector<IndexDetail> per_index;
};

ConditionReport check_condition(const SystemSpec& sys, const Point& w,
                                const BoxSolverConfig& cfg = {}, double margin_eps = kMarginEps);

/// Probe points used by scan_condition, in report order: the nonzero corners
/// of [0, bound]^n, `samples` Halton points, then for each coordinate i
/// ceil(samples / 2n) Halton points projected onto the face x_i = 0
/// (faces are skipped when n = 1). The origin never appears.
std::vector<Point> condition_scan_points(std::size_t n, double bound, std::size_t samples);

struct ScanReport {
  std::vector<ConditionReport> reports;
  std::size_t unsatisfied = 0;
  std::optional<std::size_t> first_unsatisfied;  // index into reports

  bool all_satisfied() const { return unsatisfied == 0; }
};

ScanReport scan_condition(const SystemSpec& sys, double region_bound, std::size_t samples,
                          const BoxSolverConfig& cfg = {}, double margin_eps = kMarginEps,
                          Exec exec = Exec::Parallel);

struct SearchTrace {
  int depth = 0;  // last depth searched
  std::size_t points_evaluated = 0;
};

struct Certificate {
  Point v;        // on the simplex, strictly positive
  Point h_value;
  double margin = 0.0;  // min_i -h_i(v)
  SearchTrace trace;
};

/// Search exhausted without a point where every h_i < -margin_eps. This is
/// inconclusive: either the hypotheses fail or the grid was too coarse.
class CertificateNotFound : public std::runtime_error {
public:
  CertificateNotFound(Point best, Point best_h, double best_margin, SearchTrace trace);
  const Point& best() const { return best_; }
  const Point& best_h() const { return best_h_; }
  double best_margin() const { return best_margin_; }
  const SearchTrace& trace() const { return trace_; }

private:
  Point best_;
  Point best_h_;
  double best_margin_;
  SearchTrace trace_;
};

class PreconditionFailed : public std::runtime_error {
public:
  PreconditionFailed(const std::string& what, std::vector<HypothesisReport> reports)
      : std::runtime_error(what), reports_(std::move(reports)) {}
  const std::vector<HypothesisReport>& reports() const { return reports_; }

private:
  std::vector<HypothesisReport> reports_;
};

using VectorMap = std::function<Point(const Point&)>;

/// Barycentric search over the open simplex. Depth d uses the grid
/// {k / N : k_i >= 1, sum k = N} with N = 2 * 3^d, so each level refines the
/// previous one and contains the barycentre for n = 2.
Certificate search_simplex(std::size_t n, const VectorMap& h, int grid_depth,
                           const CertifyConfig& cfg);

Certificate find_certificate(const SystemSpec& sys, int grid_depth, const CertifyConfig& cfg = {});

/// Cooperative f and nondecreasing g: the suprema sit at w, so h = f + g.
Certificate monotone_shortcut(const SystemSpec& sys, double region_bound, std::size_t samples,
                              const CertifyConfig& cfg = {}, int grid_depth = 6,
                              double fd_step = 1e-5);

/// Enumerates {k : k_i >= 1, sum k = total} in lexicographic order.
std::vector<std::vector<int>> interior_compositions(int total, std::size_t n);

}  // namespace posdelay
