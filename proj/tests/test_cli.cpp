#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "posdelay/cli.hpp"
#include "posdelay/csv.hpp"

using namespace posdelay;
namespace fs = std::filesystem;

namespace {

const std::string kSystems = POSDELAY_SYSTEMS_DIR;

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run_command(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvTable load_csv(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return read_csv(f);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "posdelay_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string sys(const char* name) { return kSystems + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).status == kExitUsage);
  CHECK(run({"frobnicate"}).status == kExitUsage);
  CHECK(run({"condition", sys("example1.sys")}).status == kExitUsage);  // --w missing
  CHECK(run({"condition", sys("example1.sys"), "--w", "1,2,3", "--output", scratch("x.csv").string()}).status == kExitUsage);
  CHECK(run({"condition", sys("example1.sys"), "--w", "0,0", "--output", scratch("x.csv").string()}).status == kExitUsage);
  CHECK(run({"certify", sys("example1.sys"), "--depth", "0"}).status == kExitUsage);
  const Run missing = run({"certify", sys("nope.sys")});
  CHECK(missing.status == kExitUsage);
  CHECK(missing.err.find("nope.sys") != std::string::npos);
  CHECK(run({"simulate", sys("example1.sys"), "--tau", "1", "--history", "1", "--output", scratch("x.csv").string()}).status ==
        kExitUsage);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("certify example 1") {
  const fs::path out = scratch("cert.csv");
  const Run r = run({"certify", sys("example1.sys"), "--depth", "5", "--output", out.string()});
  CHECK(r.status == kExitOk);
  const CsvTable t = load_csv(out);
  REQUIRE(t.rows.size() == 1);
  const auto& row = t.rows[0];
  CHECK(parse_real(row[t.column("v1")]) > 0);
  CHECK(parse_real(row[t.column("h1")]) < 0);
  CHECK(parse_real(row[t.column("h2")]) < 0);
  CHECK(parse_real(row[t.column("margin")]) > 0.05);
}

TEST_CASE("certify an unstable system reports NotFound") {
  const fs::path out = scratch("unstable.csv");
  const Run r = run({"certify", sys("unstable.sys"), "--depth", "3", "--output", out.string()});
  CHECK(r.status == kExitViolation);
  CHECK(r.out.find("inconclusive") != std::string::npos);
  CHECK(load_csv(out).rows.size() == 1);
}

TEST_CASE("hypotheses at degree 2 report the f2 counterexample") {
  const fs::path out = scratch("hyp.csv");
  const Run r = run({"hypotheses", sys("example1.sys"), "--alpha", "2", "--output", out.string()});
  CHECK(r.status == kExitViolation);
  const CsvTable t = load_csv(out);
  REQUIRE(t.rows.size() == 5);
  const auto& sub = t.rows[2];
  CHECK(sub[t.column("hypothesis")] == "Subhomogeneity");
  CHECK(sub[t.column("verdict")] == "violated");
  CHECK(sub[t.column("field")] == "f");
  CHECK(sub[t.column("component")] == "2");

  const Run narrow = run({"hypotheses", sys("example1.sys"), "--alpha", "2", "--bound", "1", "--lambdas", "2",
                          "--output", out.string()});
  CHECK(narrow.status == kExitViolation);
  const CsvTable u = load_csv(out);
  CHECK(parse_real(u.rows[2][u.column("value")]) == -2.0);
  CHECK(parse_real(u.rows[2][u.column("bound")]) == -4.0);
  CHECK(parse_real(u.rows[2][u.column("x1")]) == 0.0);
  CHECK(parse_real(u.rows[2][u.column("x2")]) == 1.0);

  // Monotone and positive: every check comes back clean.
  CHECK(run({"hypotheses", sys("saturating.sys"), "--output", out.string()}).status == kExitOk);
}

TEST_CASE("condition and scan") {
  const fs::path out = scratch("cond.csv");
  Run r = run({"condition", sys("example1.sys"), "--w", "1,2", "--output", out.string()});
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("witness index 2") != std::string::npos);
  const CsvTable t = load_csv(out);
  CHECK(parse_real(t.rows[0][t.column("lhs2")]) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(parse_real(t.rows[0][t.column("rhs_neg2")]) == -2.0);

  CHECK(run({"condition", sys("unstable.sys"), "--w", "1", "--output", out.string()}).status == kExitViolation);
  CHECK(run({"scan", sys("linear_hurwitz.sys"), "--samples", "100", "--output", out.string()}).status == kExitOk);
  CHECK(run({"scan", sys("unstable.sys"), "--samples", "20", "--output", out.string()}).status == kExitViolation);
}

TEST_CASE("shortcut") {
  const fs::path out = scratch("sc.csv");
  CHECK(run({"shortcut", sys("linear_hurwitz.sys"), "--output", out.string()}).status == kExitOk);
  const CsvTable t = load_csv(out);
  CHECK(parse_real(t.rows[0][t.column("v1")]) == 0.5);
  CHECK(parse_real(t.rows[0][t.column("h1")]) == -0.5);

  const Run r = run({"shortcut", sys("example1.sys"), "--output", out.string()});
  CHECK(r.status == kExitViolation);
  CHECK(r.out.find("precondition failed") != std::string::npos);
}

TEST_CASE("simulate, compare and sweep") {
  const fs::path out = scratch("sim.csv");
  Run r = run({"simulate", sys("example1.sys"), "--tau", "1", "--history", "0.5,0.5", "--t-end", "50", "--output",
               out.string()});
  CHECK(r.status == kExitOk);
  const CsvTable t = load_csv(out);
  CHECK(t.header == std::vector<std::string>{"t", "x1", "x2"});
  CHECK(parse_real(t.rows.back()[0]) == 50.0);
  // Example 1 decays algebraically: after t = 50 the state is small but not below 1e-3.
  const double x1 = parse_real(t.rows.back()[1]), x2 = parse_real(t.rows.back()[2]);
  CHECK(std::max(x1, x2) < 0.05);

  r = run({"compare", sys("example1.sys"), "--tau", "1", "--history", "0.5,0.5", "--t-end", "5", "--output",
           out.string()});
  CHECK(r.status == kExitOk);
  CHECK(load_csv(out).header.size() == 5);

  r = run({"sweep", sys("decay.sys"), "--taus", "0,1", "--histories", "1,1;0.5*(1+t), 2", "--t-end", "20",
           "--output", out.string()});
  CHECK(r.status == kExitOk);
  CHECK(load_csv(out).rows.size() == 4);

  r = run({"sweep", sys("unstable.sys"), "--taus", "0", "--histories", "1", "--output", out.string()});
  CHECK(r.status == kExitViolation);
}

TEST_CASE("default output path and byte-identical reruns") {
  const fs::path dir = scratch("defaults");
  fs::create_directories(dir);
  const fs::path copy = dir / "lin.sys";
  fs::copy_file(sys("linear_hurwitz.sys"), copy, fs::copy_options::overwrite_existing);
  const fs::path old = fs::current_path();
  fs::current_path(dir);
  const Run a = run({"scan", copy.string(), "--samples", "200"});
  const std::string first = slurp("lin.scan.csv");
  const Run b = run({"scan", copy.string(), "--samples", "200", "--serial"});
  const std::string second = slurp("lin.scan.csv");
  fs::current_path(old);
  CHECK(a.status == kExitOk);
  CHECK(!first.empty());
  CHECK(first == second);
  CHECK(a.out == b.out);

  const fs::path out = scratch("rerun.csv");
  std::string prev;
  for (int k = 0; k < 2; ++k) {
    run({"hypotheses", sys("example1.sys"), "--output", out.string()});
    const std::string now = slurp(out);
    if (k) CHECK(now == prev);
    prev = now;
  }
}
