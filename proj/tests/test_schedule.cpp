#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hddm/schedule.hpp"

using namespace hddm;

TEST_CASE("built-in families evaluate analytically") {
  const Schedule lin = Schedule::linear();
  const Schedule quad = Schedule::quadratic();

  auto [lv, ld] = lin.eval(0.5);
  CHECK(lv == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ld == doctest::Approx(-1.0).epsilon(1e-15));

  auto [qv, qd] = quad.eval(0.5);
  CHECK(qv == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(qd == doctest::Approx(-1.0).epsilon(1e-15));

  for (const Schedule& s : {lin, quad, Schedule::power(3)}) {
    CHECK(s.value(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.value(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(lin.eval(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(lin.eval(1.1), std::invalid_argument);
}

TEST_CASE("derivatives match central finite differences") {
  const double h = 1e-6;
  for (const Schedule& s : {Schedule::linear(), Schedule::quadratic(),
                            Schedule::power(3), Schedule::power(4)}) {
    for (int i = 1; i < 20; ++i) {
      const double t = i / 20.0;
      const double fd = (s.value(t + h) - s.value(t - h)) / (2 * h);
      CHECK(std::abs(s.derivative(t) - fd) <= 1e-6);
    }
  }
}

TEST_CASE("conditional ratio") {
  const Schedule lin = Schedule::linear();
  CHECK(lin.conditional_ratio(0.5, 0.8) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lin.conditional_ratio(0.3, 0.3) == 1.0);
  CHECK(lin.conditional_ratio(1.0, 1.0) == 1.0);  // convention at the endpoint
  CHECK(Schedule::quadratic().conditional_ratio(0.5, 1.0) == 0.0);
  CHECK_THROWS_AS(Schedule::linear().conditional_ratio(0.8, 0.5),
                  std::invalid_argument);

  // Degenerate ratio: value(s) == 0 with t > s.
  const Schedule dead = Schedule::polynomial({0.0}, "zero");
  CHECK_THROWS_AS(dead.conditional_ratio(0.5, 0.8), std::domain_error);
}

TEST_CASE("ratio composes multiplicatively") {
  for (const Schedule& s : {Schedule::linear(), Schedule::quadratic(),
                            Schedule::power(3)}) {
    for (double r = 0.0; r < 0.9; r += 0.17) {
      for (double mid = r; mid < 0.95; mid += 0.13) {
        for (double t = mid; t < 0.99; t += 0.11) {
          const double combined =
              s.conditional_ratio(r, mid) * s.conditional_ratio(mid, t);
          CHECK(std::abs(combined - s.conditional_ratio(r, t)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("validation names the violated property") {
  // The experiment pair is fine.
  validate_schedules({Schedule::linear(), Schedule::quadratic()});

  // Swapped pair violates the ordering.
  CHECK_THROWS_WITH_AS(
      validate_schedules({Schedule::quadratic(), Schedule::linear()}),
      doctest::Contains("ordering violation"), std::invalid_argument);

  // Constant 1 breaks the t=1 boundary.
  CHECK_THROWS_WITH_AS(validate_schedules({Schedule::polynomial({1.0}, "one")}),
                       doctest::Contains("boundary violation"),
                       std::invalid_argument);

  // Increasing polynomial breaks monotonicity (and boundaries).
  CHECK_THROWS_WITH_AS(
      validate_schedules({Schedule::polynomial({0.0, 1.0}, "t")}),
      doctest::Contains("monotonically"), std::invalid_argument);
}

TEST_CASE("schedule names resolve") {
  CHECK(Schedule::from_name("linear").name() == "linear");
  CHECK(Schedule::from_name("quadratic").name() == "quadratic");
  CHECK(Schedule::from_name("power:3").value(0.5) ==
        doctest::Approx(1.0 - 0.125));
  CHECK_THROWS_AS(Schedule::from_name("cosine"), std::invalid_argument);
}
