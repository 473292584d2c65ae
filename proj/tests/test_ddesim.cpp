#include <doctest.h>

#include <cmath>
#include <random>

#include "posdelay/certify.hpp"
#include "posdelay/ddesim.hpp"

using namespace posdelay;

namespace {

SystemSpec example1() {
  return SystemSpec::from_strings({"x1*(1 - exp(x1 + x2))", "-x2"}, {"x1*x2", "x2/(1+x2)"}, 1.0);
}
SystemSpec linear_hurwitz() {
  return SystemSpec::from_strings({"-2*x1", "-2*x2"}, {"x2", "x1"}, 1.0);
}
SystemSpec saturating() {
  return SystemSpec::from_strings({"-2*x1 + 0.5*x2", "0.5*x1 - 2*x2"}, {"x2/(1+x2)", "x1/(1+x1)"}, 1.0);
}

double inf_dist(const Point& a, const Point& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("analytic decays") {
  const auto decay = SystemSpec::from_strings({"-x1"}, {"0"}, 1.0);
  auto tr = integrate(decay, 0.0, HistorySpec::constant({1.0}), 1.0, 1e-3);
  CHECK(std::fabs(tr.final_state()[0] - std::exp(-1.0)) <= 1e-8);
  CHECK(tr.mesh.back() == 1.0);

  // On [0, 1] the delayed term is the history 1, so x' = -2x + 1, x(0) = 1.
  const auto delayed = SystemSpec::from_strings({"-2*x1"}, {"x1"}, 1.0);
  tr = integrate(delayed, 1.0, HistorySpec::constant({1.0}), 1.0, 1e-3);
  CHECK(std::fabs(tr.final_state()[0] - 0.5676676416183064) <= 1e-6);

  // Later intervals against a fine reference.
  const auto coarse = integrate(delayed, 1.0, HistorySpec::constant({1.0}), 3.0, 1e-2);
  const auto fine = integrate(delayed, 1.0, HistorySpec::constant({1.0}), 3.0, 1e-4);
  CHECK(std::fabs(coarse.final_state()[0] - fine.final_state()[0]) <= 1e-8);
}

TEST_CASE("mesh alignment and interpolation") {
  const auto sys = example1();
  const double tau = 0.7;
  const auto tr = integrate(sys, tau, HistorySpec::constant({0.5, 0.5}), 5.0, 0.03);
  CHECK(tr.mesh.front() == -tau);
  for (std::size_t k = 1; k < tr.mesh.size(); ++k) CHECK(tr.mesh[k] > tr.mesh[k - 1]);
  CHECK(tr.mesh.back() == 5.0);
  for (int m = 0; m * tau <= 5.0; ++m) {
    const double t = m * tau;
    bool found = false;
    for (double s : tr.mesh) found = found || std::fabs(s - t) <= 1e-12;
    CAPTURE(t);
    CHECK(found);
  }
  for (std::size_t k = 0; k < tr.mesh.size(); ++k)
    if (tr.mesh[k] >= 0) CHECK(tr.at(tr.mesh[k]) == tr.states[k]);
  CHECK(tr.at(-0.3) == Point{0.5, 0.5});

  // Between mesh points the interpolant stays close to a fine solution.
  const auto fine = integrate(sys, tau, HistorySpec::constant({0.5, 0.5}), 5.0, 0.0005);
  for (double t = 0.01; t < 5.0; t += 0.173) CHECK(inf_dist(tr.at(t), fine.at(t)) <= 1e-6);
}

TEST_CASE("Hermite interpolant is exact on cubics") {
  // x' = 3 t^2 is produced by x2' = 1 (x2 = t) and x1' = 3 x2^2.
  const DelayedRhs rhs = [](std::span<const double> x, std::span<const double>, std::span<double> out) {
    out[0] = 3 * x[1] * x[1];
    out[1] = 1.0;
  };
  const auto tr = integrate_rhs(rhs, 2, 0.0, HistorySpec::constant({0, 0}), 2.0, 0.25);
  for (double t = 0.0; t <= 2.0; t += 0.0625) {
    const Point x = tr.at(t);
    CHECK(x[0] == doctest::Approx(t * t * t).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("RK4 step halving ratios") {
  // Example 1 is stiff in x1 (rate about 1 + 2e at (0.5, 0.5)); starting at
  // (0.25, 0.25) keeps dt = 0.05 inside the asymptotic regime.
  const auto decay = SystemSpec::from_strings({"-x1", "-x2"}, {"0", "0"}, 1.0);
  for (const auto& sys : {example1(), linear_hurwitz(), saturating(), decay}) {
    const HistorySpec phi = HistorySpec::constant({0.25, 0.25});
    const double t_end = 2.0, dt = 0.05;
    const Point ref = integrate(sys, 0.0, phi, t_end, dt / 64).final_state();
    const double e1 = inf_dist(integrate(sys, 0.0, phi, t_end, dt).final_state(), ref);
    const double e2 = inf_dist(integrate(sys, 0.0, phi, t_end, dt / 2).final_state(), ref);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
  }
}

TEST_CASE("positivity is preserved") {
  for (const auto& sys : {example1(), saturating(), linear_hurwitz()})
    for (double tau : {0.0, 0.5, 2.0})
      for (const Point& p : {Point{0.5, 0.5}, Point{0, 3}, Point{2, 0}}) {
        const auto tr = integrate(sys, tau, HistorySpec::constant(p), 10.0, 0.01);
        CHECK(tr.max_negativity() <= 1e-9);
      }
}

TEST_CASE("histories") {
  auto h = HistorySpec::parse("0.5*(1+t/2), 0.25", 2);
  CHECK(!h.is_constant());
  CHECK(h.at(-2.0) == Point{0.0, 0.25});
  CHECK(h.slope(-1.0)[0] == doctest::Approx(0.25));
  h.validate(2.0);
  CHECK_THROWS_AS(h.validate(3.0), std::invalid_argument);

  h = HistorySpec::parse("2, 1", 2);
  CHECK(h.is_constant());
  CHECK(h.at(-5) == Point{2, 1});
  CHECK(h.slope(-1) == Point{0, 0});

  CHECK(HistorySpec::parse("max(0, t + 1), 1", 2).at(0.0) == Point{1, 1});
  CHECK_THROWS(HistorySpec::parse("1", 2));
  CHECK_THROWS_AS(HistorySpec::constant({-1.0}).validate(1.0), std::invalid_argument);
  CHECK_THROWS(integrate(example1(), 1.0, HistorySpec::constant({-0.1, 0}), 1.0, 0.01));
}

TEST_CASE("argument checks") {
  const auto sys = example1();
  const auto phi = HistorySpec::constant({0.5, 0.5});
  CHECK_THROWS_AS(integrate(sys, 0.1, phi, 1.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, 0.0, phi, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, 0.0, phi, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, -1.0, phi, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, 0.0, HistorySpec::constant({1.0}), 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("blow-up is reported with a time") {
  const auto sys = SystemSpec::from_strings({"x1^2"}, {"0"}, 1.0);
  try {
    integrate(sys, 0.0, HistorySpec::constant({1.0}), 5.0, 0.01);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() > 0.9);
    CHECK(e.time() < 1.1);
  }
}

TEST_CASE("comparison system") {
  const auto sys = example1();
  const auto cfg = comparison_solver_defaults();

  SUBCASE("initial slope equals the comparison map") {
    const auto tr = integrate_comparison(sys, 1.0, HistorySpec::constant({0.5, 0.5}), 1.0, 0.01, cfg);
    const Point h = comparison_h(sys, {0.5, 0.5}, cfg);
    std::size_t k0 = 0;
    while (tr.mesh[k0] < 0) ++k0;
    CHECK(tr.mesh[k0] == 0.0);
    CHECK(inf_dist(tr.slopes[k0], h) <= 1e-12);
    CHECK(tr.slopes[k0][0] == doctest::Approx(-0.0743606353500641).epsilon(1e-9));
    for (std::size_t k = k0 + 1; k < tr.mesh.size(); ++k)
      for (std::size_t i = 0; i < 2; ++i) CHECK(tr.states[k][i] <= tr.states[k - 1][i] + 1e-12);
  }

  SUBCASE("cooperative f with g = 0 coincides with the original") {
    const auto coop = SystemSpec::from_strings({"-2*x1 + 0.5*x2", "0.5*x1 - x2"}, {"0", "0"}, 1.0);
    const auto rep = check_dominance(coop, 0.0, HistorySpec::constant({1, 2}), 5.0, 0.01);
    for (std::size_t k = 0; k < rep.original.states.size(); ++k)
      CHECK(inf_dist(rep.original.states[k], rep.comparison.states[k]) <= 1e-6);
    CHECK(rep.holds);
  }

  SUBCASE("dominance on example 1") {
    auto rep = check_dominance(sys, 1.0, HistorySpec::constant({0.5, 0.5}), 10.0, 0.01);
    CHECK(rep.holds);
    CHECK(rep.original.mesh == rep.comparison.mesh);
    rep = check_dominance(sys, 2.0, HistorySpec::parse("0.5*(1+t/2), 0.25", 2), 10.0, 0.01);
    CHECK(rep.holds);
  }

  SUBCASE("monotone in the history") {
    const std::vector<std::pair<Point, Point>> pairs = {
        {{0.2, 0.2}, {0.5, 0.5}}, {{0.5, 0.0}, {0.5, 1.0}}, {{0.0, 0.3}, {1.0, 0.3}}};
    for (const auto& [lo, hi] : pairs) {
      const auto a = integrate_comparison(sys, 0.5, HistorySpec::constant(lo), 5.0, 0.02, cfg);
      const auto b = integrate_comparison(sys, 0.5, HistorySpec::constant(hi), 5.0, 0.02, cfg);
      REQUIRE(a.mesh == b.mesh);
      for (std::size_t k = 0; k < a.mesh.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i) CHECK(a.states[k][i] <= b.states[k][i] + 1e-6);
    }
  }

  SUBCASE("certificate history decays monotonically") {
    const auto lin = linear_hurwitz();
    const Certificate cert = find_certificate(lin, 3);
    const auto tr = integrate_comparison(lin, 1.0, HistorySpec::constant(cert.v), 30.0, 0.05, cfg);
    std::size_t k0 = 0;
    while (tr.mesh[k0] < 0) ++k0;
    for (std::size_t k = k0 + 1; k < tr.mesh.size(); ++k)
      for (std::size_t i = 0; i < 2; ++i) CHECK(tr.states[k][i] <= tr.states[k - 1][i] + 1e-6);
    CHECK(tr.final_norm() < 1e-3);
  }
}

TEST_CASE("delay sweeps") {
  const auto decay = SystemSpec::from_strings({"-x1", "-x2"}, {"0", "0"}, 1.0);
  const std::vector<HistorySpec> phis{HistorySpec::constant({1, 1}), HistorySpec::constant({0, 3})};
  auto rep = delay_sweep(decay, {0.0, 0.5, 3.0}, phis, 20.0, 0.01, 1e-3);
  CHECK(rep.rows.size() == 6);
  CHECK(rep.all_converged());
  CHECK(rep.rows[2].tau == 0.5);
  CHECK(rep.rows[3].history == 1);

  const auto unstable = SystemSpec::from_strings({"x1"}, {"0"}, 1.0);
  rep = delay_sweep(unstable, {0.0}, {HistorySpec::constant({1.0})}, 10.0, 0.01, 1e-3);
  CHECK(!rep.all_converged());
  CHECK(rep.rows[0].final_norm == doctest::Approx(std::exp(10.0)).epsilon(1e-6));

  const auto blow = SystemSpec::from_strings({"x1^2"}, {"0"}, 1.0);
  rep = delay_sweep(blow, {0.0, 1.0}, {HistorySpec::constant({1.0})}, 5.0, 0.01, 1e-3);
  CHECK(!rep.rows[0].error.empty());
  CHECK(std::isnan(rep.rows[0].final_norm));
  CHECK(!rep.rows[0].converged);

  // Serial and parallel sweeps produce identical rows.
  const auto sys = linear_hurwitz();
  const auto a = delay_sweep(sys, {0.0, 1.0, 2.5}, phis, 10.0, 0.01, 1e-3, Exec::Serial);
  const auto b = delay_sweep(sys, {0.0, 1.0, 2.5}, phis, 10.0, 0.01, 1e-3, Exec::Parallel);
  for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].final_norm == b.rows[k].final_norm);
}

TEST_CASE("example 1 decays slowly") {
  // The x2 equation linearizes to x2' = 0 at the origin and x1 behaves like
  // x1' ~ -x1^2, so convergence is algebraic rather than exponential.
  const auto sys = example1();
  const auto tr = integrate(sys, 1.0, HistorySpec::constant({0.5, 0.5}), 50.0, 0.01);
  const auto fine = integrate(sys, 1.0, HistorySpec::constant({0.5, 0.5}), 50.0, 0.001);
  CHECK(inf_dist(tr.final_state(), fine.final_state()) <= 1e-8);
  CHECK(tr.final_norm() < 0.05);
  CHECK(tr.final_norm() > 1e-3);
  CHECK(tr.max_negativity() <= 1e-9);
}
