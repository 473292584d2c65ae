#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <thread>
#include <vector>

#include "posdelay/expr.hpp"

using posdelay::EvalError;
using posdelay::Expr;
using posdelay::ParseError;

namespace {

double ev(const char* src, std::vector<double> x) { return Expr::parse(src, static_cast<int>(x.size())).eval(x); }

ParseError::Kind parse_kind(const char* src, int n) {
  try {
    Expr::parse(src, n);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for " << src);
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("x2/(1+x2)", {0, 1}) == 0.5);
  CHECK(ev("x1*x2", {2, 3}) == 6.0);
  CHECK(ev("0", {0, 0, 0}) == 0.0);
  CHECK(ev("x1*(1 - exp(x1 + x2))", {0, 5}) == 0.0);
  CHECK(ev("2+3*4", {0}) == 14.0);
  CHECK(ev("-x1^2", {2}) == -4.0);
  CHECK(ev("2^3^2", {0}) == 512.0);  // right associative
  CHECK(ev("2^-1", {0}) == 0.5);
  CHECK(ev("(2+3)*4", {0}) == 20.0);
  CHECK(ev("8/4/2", {0}) == 1.0);
  CHECK(ev("10-4-3", {0}) == 3.0);
  CHECK(ev("--x1", {3}) == 3.0);
  CHECK(ev("+x1", {3}) == 3.0);
  CHECK(ev("1.5e2 + .5 + 2.", {0}) == 152.5);
  CHECK(ev("2E-1", {0}) == doctest::Approx(0.2));
  CHECK(ev("  x1\t*\n x1 ", {3}) == 9.0);
}

TEST_CASE("functions") {
  CHECK(ev("exp(0)", {0}) == 1.0);
  CHECK(ev("log(exp(2))", {0}) == doctest::Approx(2.0));
  CHECK(ev("sqrt(16)", {0}) == 4.0);
  CHECK(ev("abs(-3)", {0}) == 3.0);
  CHECK(ev("min(x1, x2)", {4, 2}) == 2.0);
  CHECK(ev("max(0, 1 - x2)", {0, 3}) == 0.0);
  CHECK(ev("pow(2, 10)", {0}) == 1024.0);
  CHECK(ev("max(min(x1, 2), pow(x2, 2))", {5, 1}) == 2.0);
}

TEST_CASE("parse errors carry kind and position") {
  try {
    Expr::parse("x1 + ", 2);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.position() == 5);
  }
  try {
    Expr::parse("x1 + y", 2);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::UnknownIdentifier);
    CHECK(e.position() == 5);
  }
  CHECK(parse_kind("x3", 2) == ParseError::Kind::VariableOutOfRange);
  CHECK(parse_kind("x0", 2) == ParseError::Kind::VariableOutOfRange);
  CHECK(parse_kind("sin(x1)", 1) == ParseError::Kind::UnknownIdentifier);
  CHECK(parse_kind("t", 1) == ParseError::Kind::UnknownIdentifier);
  CHECK(parse_kind("", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("(x1", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("x1)", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("min(x1)", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("exp(x1, 2)", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("1e", 1) == ParseError::Kind::Syntax);
  CHECK(parse_kind("2 ** 3", 1) == ParseError::Kind::Syntax);
}

TEST_CASE("named variable") {
  const Expr e = Expr::parse_in("0.5*(1+t/2)", "t");
  const double t = -1.0;
  CHECK(e.eval(std::span(&t, 1)) == 0.25);
  CHECK(e.to_string() == "(0.5 * (1 + (t / 2)))");
  CHECK_THROWS_AS(Expr::parse_in("x1", "t"), ParseError);
}

TEST_CASE("evaluation errors are reported, never silent infinities") {
  auto kind = [](const char* src, std::vector<double> x) {
    try {
      Expr::parse(src, static_cast<int>(x.size())).eval(x);
    } catch (const EvalError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  const int domain = static_cast<int>(EvalError::Kind::Domain);
  const int overflow = static_cast<int>(EvalError::Kind::Overflow);
  CHECK(kind("log(x1)", {-1}) == domain);
  CHECK(kind("log(x1)", {0}) == domain);
  CHECK(kind("sqrt(x1)", {-1}) == domain);
  CHECK(kind("1/x1", {0}) == domain);
  CHECK(kind("x1^0.5", {-4}) == domain);
  CHECK(kind("x1^-1", {0}) == domain);
  CHECK(kind("exp(x1)", {1000}) == overflow);
  CHECK(kind("x1*x1", {1e200}) == overflow);
  CHECK(kind("x1^2", {-3}) == -1);  // integer exponent of a negative base is fine
  CHECK(kind("sqrt(x1)", {0}) == -1);
}

TEST_CASE("dimension mismatch is rejected") {
  const Expr e = Expr::parse("x1+x2", 2);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(e.eval(one), std::invalid_argument);
}

namespace {

// Random expression text over x1..xn built from the whole grammar.
std::string random_expr(std::mt19937& rng, int n, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
  std::uniform_real_distribution<double> num(0.1, 3.0);
  auto sub = [&] { return random_expr(rng, n, depth - 1); };
  switch (pick(rng)) {
    case 0: return "x" + std::to_string(std::uniform_int_distribution<int>(1, n)(rng));
    case 1: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", num(rng));
      return buf;
    }
    case 2: return sub() + " + " + sub();
    case 3: return sub() + " - " + sub();
    case 4: return sub() + "*" + sub();
    case 5: return "(" + sub() + ")/(1 + abs(" + sub() + "))";
    case 6: return "-" + sub();
    case 7: return "(" + sub() + ")^2";
    case 8: return "exp(-abs(" + sub() + "))";
    case 9: return "sqrt(abs(" + sub() + "))";
    case 10: return "min(" + sub() + ", " + sub() + ")";
    default: return "max(" + sub() + ", log(1 + abs(" + sub() + ")))";
  }
}

}  // namespace

TEST_CASE("printing and re-parsing preserves evaluation bit for bit") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> coord(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const std::string src = random_expr(rng, n, 4);
    const Expr a = Expr::parse(src, n);
    const Expr b = Expr::parse(a.to_string(), n);
    CHECK(b.to_string() == a.to_string());
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (auto& v : x) v = coord(rng);
      double va = 0, vb = 0;
      bool ea = false, eb = false;
      try { va = a.eval(x); } catch (const EvalError&) { ea = true; }
      try { vb = b.eval(x); } catch (const EvalError&) { eb = true; }
      REQUIRE(ea == eb);
      if (!ea) {
        REQUIRE(std::memcmp(&va, &vb, sizeof va) == 0);
        REQUIRE(a.eval(x) == va);  // repeated evaluation is deterministic
      }
    }
  }
}

TEST_CASE("shared expressions evaluate concurrently") {
  const Expr e = Expr::parse("x1*(1 - exp(x1 + x2)) + x2/(1+x2)", 2);
  std::vector<double> results(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t)
    threads.emplace_back([&, t] {
      double acc = 0;
      for (int k = 0; k < 10000; ++k) {
        const double x[2] = {0.001 * k, 0.5};
        acc += e.eval(x);
      }
      results[t] = acc;
    });
  for (auto& th : threads) th.join();
  for (double r : results) CHECK(r == results.front());
}
