#include "posdelay/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace posdelay {

Point comparison_h(const SystemSpec& sys, const Point& w, const BoxSolverConfig& cfg) {
  const std::size_t n = sys.dim();
  if (w.size() != n) throw std::invalid_argument("point dimension does not match system");
  Point h(n);
  for (std::size_t i = 0; i < n; ++i)
    h[i] = sup_face(sys.f()[i], w, i + 1, cfg).value + sup_box(sys.g()[i], w, cfg).value;
  return h;
}

ConditionReport check_condition(const SystemSpec& sys, const Point& w, const BoxSolverConfig& cfg,
                                double margin_eps) {
  const std::size_t n = sys.dim();
  if (w.size() != n) throw std::invalid_argument("point dimension does not match system");
  bool nonzero = false;
  for (double wi : w) {
    if (!(wi >= 0.0) || !std::isfinite(wi)) throw std::invalid_argument("w must be nonnegative");
    nonzero = nonzero || wi > 0.0;
  }
  if (!nonzero) throw std::invalid_argument("condition is undefined at w = 0");

  ConditionReport rep;
  rep.w = w;
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    IndexDetail d;
    d.index = i + 1;
    d.lhs = sup_box(sys.g()[i], w, cfg).value;
    d.rhs_neg = sup_face(sys.f()[i], w, i + 1, cfg).value;
    d.margin = -d.rhs_neg - d.lhs;
    if (!rep.witness_index && d.margin > margin_eps) rep.witness_index = i + 1;
    if (rep.per_index.empty() || d.margin > rep.per_index[best].margin) best = i;
    rep.per_index.push_back(d);
  }
  rep.satisfied = rep.witness_index.has_value();
  const IndexDetail& shown = rep.per_index[rep.satisfied ? *rep.witness_index - 1 : best];
  rep.lhs = shown.lhs;
  rep.rhs_neg = shown.rhs_neg;
  rep.margin = shown.margin;
  return rep;
}

std::vector<Point> condition_scan_points(std::size_t n, double bound, std::size_t samples) {
  std::vector<Point> pts;
  auto corners = box_corners(n, bound);
  pts.insert(pts.end(), corners.begin() + 1, corners.end());
  auto interior = halton_points(n, samples, bound);
  pts.insert(pts.end(), interior.begin(), interior.end());
  if (n >= 2) {
    const std::size_t per_face = (samples + 2 * n - 1) / (2 * n);
    const auto base = halton_points(n, per_face, bound);
    for (std::size_t i = 0; i < n; ++i)
      for (Point p : base) {
        p[i] = 0.0;
        if (std::any_of(p.begin(), p.end(), [](double v) { return v > 0.0; })) pts.push_back(std::move(p));
      }
  }
  return pts;
}

ScanReport scan_condition(const SystemSpec& sys, double region_bound, std::size_t samples,
                          const BoxSolverConfig& cfg, double margin_eps, Exec exec) {
  if (!(region_bound > 0.0)) throw std::invalid_argument("region bound must be positive");
  const auto pts = condition_scan_points(sys.dim(), region_bound, samples);
  BoxSolverConfig inner = cfg;
  if (exec == Exec::Parallel) inner.exec = Exec::Serial;
  ScanReport scan;
  scan.reports = map<ConditionReport>(exec, pts.size(), [&](std::size_t k) {
    return check_condition(sys, pts[k], inner, margin_eps);
  });
  for (std::size_t k = 0; k < scan.reports.size(); ++k)
    if (!scan.reports[k].satisfied) {
      if (!scan.first_unsatisfied) scan.first_unsatisfied = k;
      ++scan.unsatisfied;
    }
  return scan;
}

CertificateNotFound::CertificateNotFound(Point best, Point best_h, double best_margin,
                                         SearchTrace trace)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(6);
        os << "no certificate found up to depth " << trace.depth << " (" << trace.points_evaluated
           << " points); best margin " << best_margin;
        return os.str();
      }()),
      best_(std::move(best)),
      best_h_(std::move(best_h)),
      best_margin_(best_margin),
      trace_(trace) {}

std::vector<std::vector<int>> interior_compositions(int total, std::size_t n) {
  std::vector<std::vector<int>> out;
  if (n == 0 || total < static_cast<int>(n)) return out;
  std::vector<int> k(n, 1);
  // Recursive fill: position j takes values 1..remaining-(n-1-j).
  auto fill = [&](auto& self, std::size_t j, int remaining) -> void {
    if (j + 1 == n) {
      k[j] = remaining;
      out.push_back(k);
      return;
    }
    const int slack = remaining - static_cast<int>(n - 1 - j);
    for (int v = 1; v <= slack; ++v) {
      k[j] = v;
      self(self, j + 1, remaining - v);
    }
  };
  fill(fill, 0, total);
  return out;
}

namespace {

// C(total-1, n-1), saturating.
std::size_t interior_count(int total, std::size_t n) {
  if (total < static_cast<int>(n)) return 0;
  const double cap = static_cast<double>(std::numeric_limits<std::size_t>::max() / 2);
  double c = 1.0;
  const auto top = static_cast<double>(total - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c = c * (top - static_cast<double>(i)) / static_cast<double>(i + 1);
    if (c > cap) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llround(c));
}

std::vector<std::vector<int>> neighbourhood(const std::vector<std::vector<int>>& centres, std::size_t n) {
  std::set<std::vector<int>> uniq;
  std::vector<int> delta(n);
  for (const auto& c : centres) {
    // delta_i in [-2, 2] with sum zero around the refined centre 3c.
    auto rec = [&](auto& self, std::size_t j, int sum) -> void {
      if (j + 1 == n) {
        delta[j] = -sum;
        if (delta[j] < -2 || delta[j] > 2) return;
        std::vector<int> k(n);
        for (std::size_t i = 0; i < n; ++i) {
          k[i] = 3 * c[i] + delta[i];
          if (k[i] < 1) return;
        }
        uniq.insert(std::move(k));
        return;
      }
      for (int d = -2; d <= 2; ++d) {
        delta[j] = d;
        self(self, j + 1, sum + d);
      }
    };
    rec(rec, 0, 0);
  }
  return {uniq.begin(), uniq.end()};
}

double margin_of(const Point& h) {
  double m = std::numeric_limits<double>::infinity();
  for (double hi : h) m = std::min(m, -hi);
  return m;
}

}  // namespace

Certificate search_simplex(std::size_t n, const VectorMap& h, int grid_depth,
                           const CertifyConfig& cfg) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (grid_depth < 1) throw std::invalid_argument("grid depth must be at least 1");
  if (grid_depth > 12) throw std::invalid_argument("grid depth above 12 is not supported");

  SearchTrace trace;
  Point best_v, best_h;
  double best_margin = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> prev_points;
  std::vector<double> prev_margins;

  int total = 2;
  for (int depth = 1; depth <= grid_depth; ++depth) {
    total *= 3;
    trace.depth = depth;

    std::vector<std::vector<int>> pts;
    if (interior_count(total, n) <= cfg.full_grid_limit) {
      pts = interior_compositions(total, n);
    } else {
      std::vector<std::size_t> order(prev_points.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return prev_margins[a] > prev_margins[b]; });
      order.resize(std::min(order.size(), cfg.beam_width));
      std::vector<std::vector<int>> centres;
      for (std::size_t i : order) centres.push_back(prev_points[i]);
      pts = neighbourhood(centres, n);
    }

    const double denom = static_cast<double>(total);
    auto to_point = [&](const std::vector<int>& k) {
      Point v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(k[i]) / denom;
      return v;
    };
    const auto hs = map<Point>(cfg.exec, pts.size(), [&](std::size_t i) { return h(to_point(pts[i])); });
    trace.points_evaluated += pts.size();

    std::vector<double> margins(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) margins[i] = margin_of(hs[i]);

    if (!pts.empty()) {
      const auto [bi, bm] = serial::argmax(pts.size(), [&](std::size_t i) { return margins[i]; });
      if (bm > best_margin) {
        best_margin = bm;
        best_v = to_point(pts[bi]);
        best_h = hs[bi];
      }
      if (bm > cfg.margin_eps) {
        Certificate cert;
        cert.v = to_point(pts[bi]);
        cert.h_value = hs[bi];
        cert.margin = bm;
        cert.trace = trace;
        return cert;
      }
    }
    prev_points = std::move(pts);
    prev_margins = std::move(margins);
  }
  throw CertificateNotFound(std::move(best_v), std::move(best_h), best_margin, trace);
}

Certificate find_certificate(const SystemSpec& sys, int grid_depth, const CertifyConfig& cfg) {
  BoxSolverConfig inner = cfg.solver;
  if (cfg.exec == Exec::Parallel) inner.exec = Exec::Serial;
  return search_simplex(sys.dim(), [&](const Point& v) { return comparison_h(sys, v, inner); },
                        grid_depth, cfg);
}

Certificate monotone_shortcut(const SystemSpec& sys, double region_bound, std::size_t samples,
                              const CertifyConfig& cfg, int grid_depth, double fd_step) {
  auto coop = check_cooperative(sys, region_bound, samples, fd_step, cfg.exec);
  auto nondec = check_nondecreasing(sys, region_bound, samples, fd_step, cfg.exec);
  if (coop.violated() || nondec.violated()) {
    std::string what = "monotone shortcut requires ";
    if (coop.violated()) what += "cooperative f";
    if (coop.violated() && nondec.violated()) what += " and ";
    if (nondec.violated()) what += "nondecreasing g";
    throw PreconditionFailed(what, {std::move(coop), std::move(nondec)});
  }
  const std::size_t n = sys.dim();
  return search_simplex(
      n,
      [&](const Point& v) {
        Point out(n);
        try {
          sys.eval_rhs(v, v, out);
        } catch (const EvalError& e) {
          throw PointEvalError(e, v, "monotone shortcut");
        }
        return out;
      },
      grid_depth, cfg);
}

}  // namespace posdelay
