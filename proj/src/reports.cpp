#include "posdelay/reports.hpp"

#include <algorithm>
#include <stdexcept>

namespace posdelay {

namespace {

std::string opt_index(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::optional<std::size_t> parse_opt_index(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(s));
}

std::optional<double> parse_opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real(s);
}

bool parse_bool(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("expected 0 or 1, got '" + s + "'");
}

Hypothesis parse_hypothesis(const std::string& s) {
  for (Hypothesis h : {Hypothesis::P1, Hypothesis::P2, Hypothesis::Subhomogeneity,
                       Hypothesis::Cooperative, Hypothesis::Nondecreasing})
    if (to_string(h) == s) return h;
  throw std::invalid_argument("unknown hypothesis '" + s + "'");
}

void append_indexed(std::vector<std::string>& header, const std::string& prefix, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) header.push_back(prefix + std::to_string(i));
}

}  // namespace

CsvTable to_csv(const std::vector<HypothesisReport>& reports, std::size_t n) {
  CsvTable t;
  t.header = {"hypothesis", "verdict", "samples_used", "field", "component", "wrt", "lambda", "value", "bound"};
  append_indexed(t.header, "x", n);
  for (const auto& r : reports) {
    std::vector<std::string> row{to_string(r.hypothesis), to_string(r.verdict), std::to_string(r.samples_used)};
    if (r.counterexample) {
      const auto& c = *r.counterexample;
      row.insert(row.end(), {to_string(c.field), std::to_string(c.component), opt_index(c.wrt),
                             opt_real(c.lambda), format_real(c.value), format_real(c.bound)});
      for (double x : c.point) row.push_back(format_real(x));
    } else {
      row.resize(t.header.size());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<HypothesisReport> hypotheses_from_csv(const CsvTable& t, std::size_t n) {
  std::vector<HypothesisReport> out;
  for (const auto& row : t.rows) {
    HypothesisReport r;
    r.hypothesis = parse_hypothesis(row[0]);
    r.verdict = row[1] == "violated" ? Verdict::Violated : Verdict::NoViolationFound;
    r.samples_used = std::stoull(row[2]);
    if (r.violated()) {
      Counterexample c;
      c.field = row[3] == "g" ? Field::G : Field::F;
      c.component = std::stoull(row[4]);
      c.wrt = parse_opt_index(row[5]);
      c.lambda = parse_opt_real(row[6]);
      c.value = parse_real(row[7]);
      c.bound = parse_real(row[8]);
      for (std::size_t i = 0; i < n; ++i) c.point.push_back(parse_real(row[9 + i]));
      r.counterexample = std::move(c);
    }
    out.push_back(std::move(r));
  }
  return out;
}

CsvTable to_csv(const std::vector<ConditionReport>& reports, std::size_t n) {
  CsvTable t;
  append_indexed(t.header, "w", n);
  t.header.push_back("satisfied");
  t.header.push_back("witness_index");
  for (std::size_t i = 1; i <= n; ++i) {
    const auto s = std::to_string(i);
    t.header.insert(t.header.end(), {"lhs" + s, "rhs_neg" + s, "margin" + s});
  }
  for (const auto& r : reports) {
    std::vector<std::string> row;
    for (double w : r.w) row.push_back(format_real(w));
    row.push_back(r.satisfied ? "1" : "0");
    row.push_back(opt_index(r.witness_index));
    for (const auto& d : r.per_index)
      row.insert(row.end(), {format_real(d.lhs), format_real(d.rhs_neg), format_real(d.margin)});
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<ConditionReport> conditions_from_csv(const CsvTable& t, std::size_t n) {
  std::vector<ConditionReport> out;
  for (const auto& row : t.rows) {
    ConditionReport r;
    for (std::size_t i = 0; i < n; ++i) r.w.push_back(parse_real(row[i]));
    r.satisfied = parse_bool(row[n]);
    r.witness_index = parse_opt_index(row[n + 1]);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      IndexDetail d;
      d.index = i + 1;
      d.lhs = parse_real(row[n + 2 + 3 * i]);
      d.rhs_neg = parse_real(row[n + 3 + 3 * i]);
      d.margin = parse_real(row[n + 4 + 3 * i]);
      if (r.per_index.empty() || d.margin > r.per_index[best].margin) best = i;
      r.per_index.push_back(d);
    }
    const auto& shown = r.per_index[r.witness_index ? *r.witness_index - 1 : best];
    r.lhs = shown.lhs;
    r.rhs_neg = shown.rhs_neg;
    r.margin = shown.margin;
    out.push_back(std::move(r));
  }
  return out;
}

CsvTable to_csv(const Certificate& c) {
  CsvTable t;
  t.header = {"depth", "points_evaluated", "margin"};
  append_indexed(t.header, "v", c.v.size());
  append_indexed(t.header, "h", c.h_value.size());
  std::vector<std::string> row{std::to_string(c.trace.depth), std::to_string(c.trace.points_evaluated),
                               format_real(c.margin)};
  for (double v : c.v) row.push_back(format_real(v));
  for (double h : c.h_value) row.push_back(format_real(h));
  t.rows.push_back(std::move(row));
  return t;
}

Certificate certificate_from_csv(const CsvTable& t, std::size_t n) {
  if (t.rows.size() != 1) throw std::invalid_argument("certificate CSV must have exactly one row");
  const auto& row = t.rows.front();
  Certificate c;
  c.trace.depth = std::stoi(row[0]);
  c.trace.points_evaluated = std::stoull(row[1]);
  c.margin = parse_real(row[2]);
  for (std::size_t i = 0; i < n; ++i) c.v.push_back(parse_real(row[3 + i]));
  for (std::size_t i = 0; i < n; ++i) c.h_value.push_back(parse_real(row[3 + n + i]));
  return c;
}

CsvTable to_csv(const Trajectory& tr) {
  CsvTable t;
  t.header = {"t"};
  append_indexed(t.header, "x", tr.dim());
  t.rows.reserve(tr.mesh.size());
  for (std::size_t k = 0; k < tr.mesh.size(); ++k) {
    std::vector<std::string> row{format_real(tr.mesh[k])};
    for (double x : tr.states[k]) row.push_back(format_real(x));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Trajectory trajectory_from_csv(const CsvTable& t) {
  Trajectory tr;
  const std::size_t n = t.header.size() - 1;
  for (const auto& row : t.rows) {
    tr.mesh.push_back(parse_real(row[0]));
    Point x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = parse_real(row[1 + i]);
    tr.states.push_back(std::move(x));
  }
  if (!tr.mesh.empty()) tr.tau = -std::min(0.0, tr.mesh.front());
  return tr;
}

CsvTable to_csv(const DominanceReport& rep) {
  const std::size_t n = rep.original.dim();
  CsvTable t;
  t.header = {"t"};
  append_indexed(t.header, "x", n);
  append_indexed(t.header, "xbar", n);
  for (std::size_t k = 0; k < rep.original.mesh.size(); ++k) {
    std::vector<std::string> row{format_real(rep.original.mesh[k])};
    for (double x : rep.original.states[k]) row.push_back(format_real(x));
    for (double x : rep.comparison.states[k]) row.push_back(format_real(x));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable to_csv(const SweepReport& rep) {
  CsvTable t;
  t.header = {"tau", "history_index", "history", "final_norm", "max_negativity", "converged", "error"};
  for (const auto& r : rep.rows)
    t.rows.push_back({format_real(r.tau), std::to_string(r.history), rep.histories[r.history].to_string(),
                      format_real(r.final_norm), format_real(r.max_negativity), r.converged ? "1" : "0",
                      r.error});
  return t;
}

SweepReport sweep_from_csv(const CsvTable& t, std::size_t n, double conv_tol) {
  SweepReport rep;
  rep.conv_tol = conv_tol;
  std::vector<std::string> history_text;
  for (const auto& row : t.rows) {
    SweepRow r;
    r.tau = parse_real(row[0]);
    r.history = std::stoull(row[1]);
    r.final_norm = parse_real(row[3]);
    r.max_negativity = parse_real(row[4]);
    r.converged = parse_bool(row[5]);
    r.error = row[6];
    if (std::find(rep.taus.begin(), rep.taus.end(), r.tau) == rep.taus.end()) rep.taus.push_back(r.tau);
    if (r.history >= history_text.size()) history_text.resize(r.history + 1);
    history_text[r.history] = row[2];
    rep.rows.push_back(std::move(r));
  }
  for (const auto& h : history_text) rep.histories.push_back(HistorySpec::parse(h, n));
  return rep;
}

}  // namespace posdelay
