#include "posdelay/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "posdelay/certify.hpp"
#include "posdelay/ddesim.hpp"
#include "posdelay/hypotheses.hpp"
#include "posdelay/reports.hpp"
#include "posdelay/sysfile.hpp"

namespace posdelay {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string system_path;
  std::string output;
  int resolution = 0;  // 0: not given on the command line
  bool no_refine = false;
  bool serial = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("system", c.system_path, "System definition file")->required();
  sub->add_option("--output", c.output, "CSV report path (default: <system stem>.<command>.csv)");
  sub->add_option("--resolution", c.resolution, "Grid points per coordinate for box maximization")
      ->check(CLI::Range(2, 100000));
  sub->add_flag("--no-refine", c.no_refine, "Disable coordinate-descent refinement of grid maxima");
  sub->add_flag("--serial", c.serial, "Run kernels on one thread");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> parse_reals(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (auto& p : split(s, ',')) {
    p.erase(0, p.find_first_not_of(" \t"));
    p.erase(p.find_last_not_of(" \t") + 1);
    try {
      out.push_back(parse_real(p));
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + p + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<HistorySpec> parse_histories(const std::string& s, std::size_t n) {
  std::vector<HistorySpec> out;
  for (const auto& part : split(s, ';')) {
    try {
      out.push_back(HistorySpec::parse(part, n));
    } catch (const std::exception& e) {
      throw UsageError(std::string("--histories: ") + e.what());
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(p[i]);
  return s + ")";
}

class Runner {
public:
  Runner(const Common& c, std::string command, std::ostream& out)
      : common_(c), command_(std::move(command)), out_(out) {
    try {
      file_ = std::make_unique<SystemFile>(load_system(c.system_path));
    } catch (const SystemFileError& e) {
      throw UsageError(e.what());
    }
  }

  const SystemSpec& sys() const { return file_->system; }
  const RunDefaults& defaults() const { return file_->defaults; }
  std::ostream& out() { return out_; }
  Exec exec() const { return common_.serial ? Exec::Serial : Exec::Parallel; }

  BoxSolverConfig solver(int fallback_resolution) const {
    BoxSolverConfig cfg;
    cfg.resolution = common_.resolution ? common_.resolution : defaults().resolution.value_or(fallback_resolution);
    cfg.refine = !common_.no_refine;
    cfg.exec = exec();
    return cfg;
  }

  void write(const CsvTable& table) {
    std::string path = common_.output;
    if (path.empty()) path = std::filesystem::path(common_.system_path).stem().string() + "." + command_ + ".csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    write_csv(f, table);
    if (!f) throw UsageError("failed writing " + path);
    out_ << "report: " << path << "\n";
  }

private:
  const Common& common_;
  std::string command_;
  std::ostream& out_;
  std::unique_ptr<SystemFile> file_;
};

std::string describe(const HypothesisReport& r) {
  if (!r.counterexample) return "";
  const auto& c = *r.counterexample;
  std::string s = to_string(c.field) + std::to_string(c.component);
  if (c.wrt) s = "d" + s + "/dx" + std::to_string(*c.wrt);
  s += " at x = " + fmt_point(c.point);
  if (c.lambda) s += ", lambda = " + fmt(*c.lambda);
  s += ": " + fmt(c.value) + (r.hypothesis == Hypothesis::Subhomogeneity ? " > " : " < ") + fmt(c.bound);
  return s;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay-independent stability checks for positive time-delay systems", "posdelay"};
  app.require_subcommand(1);

  Common common;

  auto* hyp = app.add_subcommand("hypotheses", "Falsification checks of positivity, subhomogeneity and monotonicity");
  double hyp_alpha = 0.0, hyp_bound = 0.0, fd_step = 1e-5;
  std::size_t hyp_samples = 1000;
  std::string lambdas_text = "1,1.5,2,4";
  add_common(hyp, common);
  hyp->add_option("--alpha", hyp_alpha, "Subhomogeneity degree (default: from the file)");
  hyp->add_option("--bound", hyp_bound, "Sampled region [0, bound]^n (default: region_bound)");
  hyp->add_option("--samples", hyp_samples, "Halton samples")->capture_default_str();
  hyp->add_option("--fd-step", fd_step, "Finite-difference step")->capture_default_str();
  hyp->add_option("--lambdas", lambdas_text, "Scale factors for the subhomogeneity check")->capture_default_str();

  auto* cond = app.add_subcommand("condition", "Evaluate the stability condition at one point");
  std::string w_text;
  add_common(cond, common);
  cond->add_option("--w", w_text, "Probe point, comma separated")->required();

  auto* scan = app.add_subcommand("scan", "Evaluate the stability condition over a sampled region");
  double scan_bound = 0.0;
  std::size_t scan_samples = 500;
  add_common(scan, common);
  scan->add_option("--bound", scan_bound, "Region [0, bound]^n (default: region_bound)");
  scan->add_option("--samples", scan_samples, "Interior Halton samples")->capture_default_str();

  auto* cert = app.add_subcommand("certify", "Search the simplex for a certificate vector");
  int depth = 5;
  add_common(cert, common);
  cert->add_option("--depth", depth, "Maximum subdivision depth")->capture_default_str()->check(CLI::Range(1, 12));

  auto* shortcut = app.add_subcommand("shortcut", "Certificate search for cooperative f and nondecreasing g");
  double sc_bound = 0.0;
  std::size_t sc_samples = 1000;
  int sc_depth = 6;
  add_common(shortcut, common);
  shortcut->add_option("--bound", sc_bound, "Region for the monotonicity checks (default: region_bound)");
  shortcut->add_option("--samples", sc_samples, "Halton samples")->capture_default_str();
  shortcut->add_option("--depth", sc_depth, "Maximum subdivision depth")->capture_default_str()->check(CLI::Range(1, 12));

  double tau = 0.0, t_end = 0.0, dt = 0.0, conv_tol = 0.0;
  std::string history_text;
  auto* sim = app.add_subcommand("simulate", "Integrate the delayed system and write the trajectory");
  add_common(sim, common);
  auto* cmp = app.add_subcommand("compare", "Integrate the system and its comparison system; check dominance");
  add_common(cmp, common);
  for (auto* sub : {sim, cmp}) {
    sub->add_option("--tau", tau, "Delay")->required();
    sub->add_option("--history", history_text, "Initial function, comma separated numbers or expressions in t")->required();
    sub->add_option("--t-end", t_end, "Final time (default: t_end)");
    sub->add_option("--dt", dt, "Maximum step (default: dt)");
  }

  auto* sweep = app.add_subcommand("sweep", "Integrate over a grid of delays and histories");
  std::string taus_text, histories_text;
  add_common(sweep, common);
  sweep->add_option("--taus", taus_text, "Delays, comma separated")->required();
  sweep->add_option("--histories", histories_text, "Histories separated by ';'")->required();
  sweep->add_option("--t-end", t_end, "Final time (default: t_end)");
  sweep->add_option("--dt", dt, "Maximum step (default: dt)");
  sweep->add_option("--conv-tol", conv_tol, "Convergence threshold on the final inf-norm (default: conv_tol)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (hyp->parsed()) {
      Runner run(common, "hypotheses", out);
      const auto& sys = run.sys();
      const double bound = hyp_bound > 0.0 ? hyp_bound : run.defaults().region_bound;
      const double alpha = hyp_alpha > 0.0 ? hyp_alpha : sys.alpha();
      const auto lambdas = parse_reals(lambdas_text, "--lambdas");
      std::vector<HypothesisReport> reports{
          check_p1(sys, bound, hyp_samples, run.exec()),
          check_p2(sys, bound, hyp_samples, run.exec()),
          check_subhomogeneity(sys, alpha, bound, hyp_samples, lambdas, run.exec()),
          check_cooperative(sys, bound, hyp_samples, fd_step, run.exec()),
          check_nondecreasing(sys, bound, hyp_samples, fd_step, run.exec()),
      };
      out << "region [0, " << fmt(bound) << "]^" << sys.dim() << ", alpha = " << fmt(alpha) << "\n";
      for (const auto& r : reports)
        out << std::left << std::setw(16) << to_string(r.hypothesis) << std::setw(20) << to_string(r.verdict)
            << describe(r) << "\n";
      run.write(to_csv(reports, sys.dim()));
      const bool theorem_ok = !reports[0].violated() && !reports[1].violated() && !reports[2].violated();
      return theorem_ok ? kExitOk : kExitViolation;
    }

    if (cond->parsed()) {
      Runner run(common, "condition", out);
      const Point w = parse_reals(w_text, "--w");
      if (w.size() != run.sys().dim()) throw UsageError("--w must have " + std::to_string(run.sys().dim()) + " components");
      ConditionReport rep;
      try {
        rep = check_condition(run.sys(), w, run.solver(33));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      out << "w = " << fmt_point(w) << ": " << (rep.satisfied ? "satisfied" : "not satisfied");
      if (rep.witness_index) out << " (witness index " << *rep.witness_index << ")";
      out << "\n";
      for (const auto& d : rep.per_index)
        out << "  i = " << d.index << "  sup g = " << fmt(d.lhs) << "  sup f on face = " << fmt(d.rhs_neg)
            << "  margin = " << fmt(d.margin) << "\n";
      run.write(to_csv(std::vector<ConditionReport>{rep}, run.sys().dim()));
      return rep.satisfied ? kExitOk : kExitViolation;
    }

    if (scan->parsed()) {
      Runner run(common, "scan", out);
      const double bound = scan_bound > 0.0 ? scan_bound : run.defaults().region_bound;
      const auto rep = scan_condition(run.sys(), bound, scan_samples, run.solver(33), kMarginEps, run.exec());
      double min_margin = std::numeric_limits<double>::infinity();
      for (const auto& r : rep.reports) min_margin = std::min(min_margin, r.margin);
      out << rep.reports.size() << " points in [0, " << fmt(bound) << "]^" << run.sys().dim() << ": "
          << rep.reports.size() - rep.unsatisfied << " satisfied, " << rep.unsatisfied << " not satisfied\n";
      out << "smallest best-index margin: " << fmt(min_margin) << "\n";
      if (rep.first_unsatisfied)
        out << "first failure at w = " << fmt_point(rep.reports[*rep.first_unsatisfied].w) << "\n";
      run.write(to_csv(rep.reports, run.sys().dim()));
      return rep.all_satisfied() ? kExitOk : kExitViolation;
    }

    if (cert->parsed() || shortcut->parsed()) {
      const bool is_shortcut = shortcut->parsed();
      Runner run(common, is_shortcut ? "shortcut" : "certify", out);
      CertifyConfig cfg;
      cfg.solver = run.solver(33);
      cfg.exec = run.exec();
      try {
        const Certificate c =
            is_shortcut ? monotone_shortcut(run.sys(), sc_bound > 0.0 ? sc_bound : run.defaults().region_bound,
                                            sc_samples, cfg, sc_depth)
                        : find_certificate(run.sys(), depth, cfg);
        out << "certificate found at depth " << c.trace.depth << " (" << c.trace.points_evaluated
            << " points)\n  v = " << fmt_point(c.v) << "\n  h(v) = " << fmt_point(c.h_value)
            << "\n  margin = " << fmt(c.margin) << "\n";
        run.write(to_csv(c));
        return kExitOk;
      } catch (const CertificateNotFound& nf) {
        out << "no certificate found up to depth " << nf.trace().depth << " (" << nf.trace().points_evaluated
            << " points); inconclusive\n  best v = " << fmt_point(nf.best()) << "\n  h(v) = " << fmt_point(nf.best_h())
            << "\n  margin = " << fmt(nf.best_margin()) << "\n";
        if (!nf.best().empty()) run.write(to_csv(Certificate{nf.best(), nf.best_h(), nf.best_margin(), nf.trace()}));
        return kExitViolation;
      } catch (const PreconditionFailed& pf) {
        out << "precondition failed: " << pf.what() << "\n";
        for (const auto& r : pf.reports())
          out << "  " << std::left << std::setw(16) << to_string(r.hypothesis) << std::setw(20)
              << to_string(r.verdict) << describe(r) << "\n";
        run.write(to_csv(pf.reports(), run.sys().dim()));
        return kExitViolation;
      }
    }

    if (sim->parsed() || cmp->parsed()) {
      const bool is_compare = cmp->parsed();
      Runner run(common, is_compare ? "compare" : "simulate", out);
      HistorySpec phi;
      try {
        phi = HistorySpec::parse(history_text, run.sys().dim());
      } catch (const std::exception& e) {
        throw UsageError(std::string("--history: ") + e.what());
      }
      const double te = t_end > 0.0 ? t_end : run.defaults().t_end;
      double step = dt > 0.0 ? dt : run.defaults().dt;
      if (tau > 0.0) step = std::min(step, tau);
      try {
        if (!is_compare) {
          const Trajectory tr = integrate(run.sys(), tau, phi, te, step);
          out << "tau = " << fmt(tau) << ", t_end = " << fmt(te) << ", " << tr.mesh.size() << " mesh points\n"
              << "  x(t_end) = " << fmt_point(tr.final_state()) << "\n  |x(t_end)|_inf = " << fmt(tr.final_norm())
              << "\n  max negativity = " << fmt(tr.max_negativity()) << "\n";
          run.write(to_csv(tr));
          return kExitOk;
        }
        const DominanceReport rep = check_dominance(run.sys(), tau, phi, te, step, [&] {
          BoxSolverConfig c = run.solver(17);
          c.exec = Exec::Serial;
          return c;
        }());
        out << "dominance " << (rep.holds ? "holds" : "fails") << ": max x_i - xbar_i = " << fmt(rep.max_excess)
            << " (component " << rep.component << ", t = " << fmt(rep.time_of_max) << ")\n"
            << "  x(t_end) = " << fmt_point(rep.original.final_state())
            << "\n  xbar(t_end) = " << fmt_point(rep.comparison.final_state()) << "\n";
        run.write(to_csv(rep));
        return rep.holds ? kExitOk : kExitViolation;
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }

    if (sweep->parsed()) {
      Runner run(common, "sweep", out);
      const auto taus = parse_reals(taus_text, "--taus");
      for (double t : taus)
        if (!(t >= 0.0)) throw UsageError("--taus: delays must be nonnegative");
      const auto phis = parse_histories(histories_text, run.sys().dim());
      const double te = t_end > 0.0 ? t_end : run.defaults().t_end;
      const double step = dt > 0.0 ? dt : run.defaults().dt;
      const double tol = conv_tol > 0.0 ? conv_tol : run.defaults().conv_tol;
      const auto rep = delay_sweep(run.sys(), taus, phis, te, step, tol, run.exec());
      std::size_t ok = 0;
      for (const auto& r : rep.rows) {
        ok += r.converged ? 1 : 0;
        out << "tau = " << std::left << std::setw(8) << fmt(r.tau) << " history " << r.history << "  |x(t_end)| = "
            << std::setw(18) << fmt(r.final_norm) << (r.converged ? "converged" : "not converged");
        if (!r.error.empty()) out << "  (" << r.error << ")";
        out << "\n";
      }
      out << ok << " of " << rep.rows.size() << " cells converged (tol " << fmt(tol) << ")\n";
      run.write(to_csv(rep));
      return rep.all_converged() ? kExitOk : kExitViolation;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitUsage;
}

}  // namespace posdelay
