#include "posdelay/ddesim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace posdelay {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == ',' && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(text.substr(start)));
  return parts;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double inf_norm(const Point& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

HistorySpec HistorySpec::constant(Point value) {
  HistorySpec h;
  h.value_ = std::move(value);
  return h;
}

HistorySpec HistorySpec::expressions(std::vector<Expr> components) {
  for (const auto& e : components)
    if (e.n_vars() != 1) throw std::invalid_argument("history expressions must be univariate in t");
  HistorySpec h;
  h.exprs_ = std::move(components);
  return h;
}

HistorySpec HistorySpec::parse(std::string_view text, std::size_t n) {
  const auto parts = split_top_level(text);
  if (parts.size() != n)
    throw std::invalid_argument("history '" + std::string(text) + "' has " + std::to_string(parts.size()) +
                                " components, expected " + std::to_string(n));
  Point values(n);
  bool all_numbers = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = parts[i];
    const auto res = std::from_chars(p.data(), p.data() + p.size(), values[i]);
    all_numbers = all_numbers && !p.empty() && res.ec == std::errc() && res.ptr == p.data() + p.size();
  }
  if (all_numbers) return constant(std::move(values));
  std::vector<Expr> exprs;
  for (const auto& p : parts) exprs.push_back(Expr::parse_in(p, "t"));
  return expressions(std::move(exprs));
}

Point HistorySpec::at(double t) const {
  if (is_constant()) return value_;
  Point x(exprs_.size());
  const double arg[1] = {t};
  for (std::size_t i = 0; i < exprs_.size(); ++i) x[i] = exprs_[i].eval(arg);
  return x;
}

Point HistorySpec::slope(double t) const {
  if (is_constant()) return Point(value_.size(), 0.0);
  const double h = 1e-6 * std::max(1.0, std::fabs(t));
  const Point hi = at(t + h), lo = at(t - h);
  Point d(hi.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (hi[i] - lo[i]) / (2.0 * h);
  return d;
}

std::string HistorySpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) out += ',';
    out += is_constant() ? fmt17(value_[i]) : exprs_[i].source();
  }
  return out;
}

void HistorySpec::validate(double tau) const {
  constexpr int kSamples = 200;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = tau == 0.0 ? 0.0 : -tau + tau * (static_cast<double>(k) / kSamples);
    const Point x = at(t);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= 0.0))
        throw std::invalid_argument("history component " + std::to_string(i + 1) + " is negative at t = " +
                                    fmt17(t));
    if (tau == 0.0) break;
  }
}

IntegrationError::IntegrationError(const std::string& what, double time, Point state)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << what << " at t = " << time << ", x = (";
        for (std::size_t i = 0; i < state.size(); ++i) os << (i ? ", " : "") << state[i];
        os << ")";
        return os.str();
      }()),
      time_(time),
      state_(std::move(state)) {}

namespace {

Point hermite(double t0, double t1, const Point& y0, const Point& m0, const Point& y1,
              const Point& m1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  Point out(y0.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * y0[i] + h10 * h * m0[i] + h01 * y1[i] + h11 * h * m1[i];
  return out;
}

// Interpolates the computed solution for t >= 0; `first` is the mesh index of t = 0
// and `last` the newest point with a known slope.
Point lookup(const Trajectory& tr, std::size_t first, std::size_t last, double t) {
  if (t <= 0.0) return tr.history.at(t);
  if (t >= tr.mesh[last]) return tr.states[last];
  const auto begin = tr.mesh.begin() + static_cast<std::ptrdiff_t>(first);
  const auto end = tr.mesh.begin() + static_cast<std::ptrdiff_t>(last) + 1;
  const auto it = std::upper_bound(begin, end, t);
  const auto k = static_cast<std::size_t>(it - tr.mesh.begin()) - 1;
  // Delayed times on the aligned mesh differ from mesh points only by rounding.
  const double snap = 1e-9 * (tr.mesh[k + 1] - tr.mesh[k]);
  if (t - tr.mesh[k] <= snap) return tr.states[k];
  if (tr.mesh[k + 1] - t <= snap) return tr.states[k + 1];
  return hermite(tr.mesh[k], tr.mesh[k + 1], tr.states[k], tr.slopes[k], tr.states[k + 1],
                 tr.slopes[k + 1], t);
}

// Mesh on [0, t_end]: segments of length tau (or one segment when tau = 0),
// each ending exactly on its boundary.
std::vector<double> solution_mesh(double tau, double t_end, double h) {
  std::vector<double> mesh{0.0};
  const double seg_len = tau > 0.0 ? tau : t_end;
  for (std::size_t seg = 0;; ++seg) {
    const double start = static_cast<double>(seg) * seg_len;
    if (start >= t_end) break;
    const double stop = std::min(static_cast<double>(seg + 1) * seg_len, t_end);
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((stop - start) / h - 1e-9)));
    for (std::size_t m = 1; m < steps; ++m) mesh.push_back(start + static_cast<double>(m) * h);
    mesh.push_back(stop);
  }
  return mesh;
}

}  // namespace

Point Trajectory::at(double t) const {
  if (t < mesh.front() || t > mesh.back())
    throw std::out_of_range("time outside the trajectory mesh");
  const auto it = std::lower_bound(mesh.begin(), mesh.end(), t);
  const auto k = static_cast<std::size_t>(it - mesh.begin());
  if (mesh[k] == t) return states[k];
  if (t < 0.0) return history.at(t);
  return hermite(mesh[k - 1], mesh[k], states[k - 1], slopes[k - 1], states[k], slopes[k], t);
}

double Trajectory::final_norm() const { return inf_norm(states.back()); }

double Trajectory::max_negativity() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    if (mesh[k] < 0.0) continue;
    for (double v : states[k]) worst = std::max(worst, -v);
  }
  return worst;
}

Trajectory integrate_rhs(const DelayedRhs& rhs, std::size_t n, double tau, const HistorySpec& phi,
                         double t_end, double dt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be nonnegative");
  if (tau > 0.0 && dt > tau) throw std::invalid_argument("dt must not exceed tau");
  if (phi.dim() != n) throw std::invalid_argument("history dimension does not match system");
  phi.validate(tau);

  const double h = tau > 0.0 ? tau / std::ceil(tau / dt - 1e-9) : dt;

  Trajectory tr;
  tr.tau = tau;
  tr.history = phi;
  if (tau > 0.0) {
    const auto hist_steps = static_cast<std::size_t>(std::llround(tau / h));
    for (std::size_t m = 0; m < hist_steps; ++m) {
      const double t = -tau + static_cast<double>(m) * h;
      tr.mesh.push_back(t);
      tr.states.push_back(phi.at(t));
      tr.slopes.push_back(phi.slope(t));
    }
  }
  const std::size_t first = tr.mesh.size();
  const auto sol_mesh = solution_mesh(tau, t_end, h);
  tr.mesh.insert(tr.mesh.end(), sol_mesh.begin(), sol_mesh.end());
  tr.states.reserve(tr.mesh.size());
  tr.slopes.reserve(tr.mesh.size());
  tr.states.push_back(phi.at(0.0));

  Point k1(n), k2(n), k3(n), k4(n), stage(n);
  auto eval = [&](const Point& x, double t_delayed, double t_now, Point& out) {
    const Point delayed = tau > 0.0 ? lookup(tr, first, tr.states.size() - 1, t_delayed) : x;
    try {
      rhs(x, delayed, out);
    } catch (const EvalError& e) {
      throw IntegrationError(std::string("expression error (") + e.what() + ")", t_now, x);
    }
  };

  for (std::size_t k = first; k + 1 < tr.mesh.size(); ++k) {
    const double t = tr.mesh[k];
    const double step = tr.mesh[k + 1] - t;
    const Point& x = tr.states.back();
    eval(x, t - tau, t, k1);
    tr.slopes.push_back(k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * step * k1[i];
    eval(stage, t + 0.5 * step - tau, t, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * step * k2[i];
    eval(stage, t + 0.5 * step - tau, t, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + step * k3[i];
    eval(stage, t + step - tau, t, k4);
    Point next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = x[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) throw IntegrationError("non-finite state (blow-up)", tr.mesh[k + 1], next);
    }
    tr.states.push_back(std::move(next));
  }
  Point last(n);
  eval(tr.states.back(), tr.mesh.back() - tau, tr.mesh.back(), last);
  tr.slopes.push_back(std::move(last));
  return tr;
}

Trajectory integrate(const SystemSpec& sys, double tau, const HistorySpec& phi, double t_end,
                     double dt) {
  return integrate_rhs(
      [&](std::span<const double> x, std::span<const double> d, std::span<double> out) {
        sys.eval_rhs(x, d, out);
      },
      sys.dim(), tau, phi, t_end, dt);
}

namespace {

constexpr double kOrthantSlack = 1e-12;

Point order_bound(std::span<const double> x) {
  Point w(x.begin(), x.end());
  for (double& v : w) {
    if (v < -kOrthantSlack)
      throw EvalError(EvalError::Kind::Domain, "comparison state left the nonnegative orthant");
    v = std::max(v, 0.0);
  }
  return w;
}

}  // namespace

Trajectory integrate_comparison(const SystemSpec& sys, double tau, const HistorySpec& phi,
                                double t_end, double dt, const BoxSolverConfig& cfg) {
  const std::size_t n = sys.dim();
  return integrate_rhs(
      [&](std::span<const double> x, std::span<const double> d, std::span<double> out) {
        const Point w = order_bound(x);
        const Point wd = order_bound(d);
        for (std::size_t i = 0; i < n; ++i)
          out[i] = sup_face(sys.f()[i], w, i + 1, cfg).value + sup_box(sys.g()[i], wd, cfg).value;
      },
      n, tau, phi, t_end, dt);
}

DominanceReport check_dominance(const SystemSpec& sys, double tau, const HistorySpec& phi,
                                double t_end, double dt, const BoxSolverConfig& cfg) {
  DominanceReport rep;
  rep.original = integrate(sys, tau, phi, t_end, dt);
  rep.comparison = integrate_comparison(sys, tau, phi, t_end, dt, cfg);
  rep.max_excess = -std::numeric_limits<double>::infinity();
  const auto& a = rep.original;
  const auto& b = rep.comparison;
  for (std::size_t k = 0; k < a.mesh.size(); ++k) {
    const double scale = kDominanceTol * (1.0 + inf_norm(b.states[k]));
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const double excess = a.states[k][i] - b.states[k][i];
      if (excess > rep.max_excess) {
        rep.max_excess = excess;
        rep.time_of_max = a.mesh[k];
        rep.component = i + 1;
      }
      rep.worst_ratio = std::max(rep.worst_ratio, excess / scale);
    }
  }
  rep.holds = rep.worst_ratio <= 1.0;
  return rep;
}

bool SweepReport::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
}

SweepReport delay_sweep(const SystemSpec& sys, const std::vector<double>& taus,
                        const std::vector<HistorySpec>& phis, double t_end, double dt,
                        double conv_tol, Exec exec) {
  if (taus.empty() || phis.empty()) throw std::invalid_argument("sweep needs at least one delay and one history");
  SweepReport rep;
  rep.taus = taus;
  rep.histories = phis;
  rep.conv_tol = conv_tol;
  const std::size_t np = phis.size();
  rep.rows = map<SweepRow>(exec, taus.size() * np, [&](std::size_t cell) {
    SweepRow row;
    row.tau = taus[cell / np];
    row.history = cell % np;
    try {
      // dt larger than a short delay is reduced to the delay itself.
      const double step = row.tau > 0.0 ? std::min(dt, row.tau) : dt;
      const Trajectory tr = integrate(sys, row.tau, phis[row.history], t_end, step);
      row.final_norm = tr.final_norm();
      row.max_negativity = tr.max_negativity();
      row.converged = row.final_norm < conv_tol;
    } catch (const std::exception& e) {
      row.final_norm = std::numeric_limits<double>::quiet_NaN();
      row.max_negativity = std::numeric_limits<double>::quiet_NaN();
      row.converged = false;
      row.error = e.what();
    }
    return row;
  });
  return rep;
}

}  // namespace posdelay
