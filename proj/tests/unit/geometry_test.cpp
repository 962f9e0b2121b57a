#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "sfn/geometry.hpp"

using namespace sfn::geometry;

TEST_CASE("received power") {
  CHECK(received_power(1.0, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(received_power(1.0, 10.0, 2.0) == doctest::Approx(0.01));
  CHECK(received_power(1.0, 10.0, 3.5) == doctest::Approx(3.16227766e-4).epsilon(1e-8));
  CHECK_THROWS_AS(received_power(1.0, 0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(received_power(-1.0, 1.0, 2.0), std::domain_error);
}

TEST_CASE("beta from distances") {
  CHECK(beta_from_distances(700.0, 700.0, 2.0) == 0.0);
  CHECK(beta_from_distances(2000.0, 1000.0, 2.0) == doctest::Approx(-6.0206).epsilon(1e-5));
  CHECK(beta_from_distances(10000.0, 1000.0, 3.5) == doctest::Approx(-35.0));
  CHECK_THROWS_AS(beta_from_distances(900.0, 1000.0, 2.0), std::domain_error);
}

TEST_CASE("relative delay") {
  CHECK(relative_delay(0.0, 5000.0, 2.0) == 0.0);
  // Oracle: invert the dB relation to a distance, then take the path difference over c.
  auto via_distance = [](double beta, double d1, double alpha) {
    const double di = d1 * std::pow(10.0, -beta / (10.0 * alpha));
    return (di - d1) / kSpeedOfLight;
  };
  CHECK(relative_delay(-12.0, 5000.0, 2.0) == doctest::Approx(4.9719e-5).epsilon(1e-4));
  CHECK(relative_delay(-12.0, 5000.0, 2.0) == doctest::Approx(via_distance(-12.0, 5000.0, 2.0)).epsilon(1e-12));
  CHECK(relative_delay(-6.0206, 5000.0, 2.0) == doctest::Approx(1.6678e-5).epsilon(1e-4));
  CHECK_THROWS_AS(relative_delay(1.0, 5000.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(relative_delay(-1.0, 0.0, 2.0), std::domain_error);
}

TEST_CASE("delay and power relations are consistent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ratio(1.0, 50.0), alpha(1.5, 4.5), d1(100.0, 20000.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = alpha(rng), r = d1(rng), di = r * ratio(rng);
    const double beta = beta_from_distances(di, r, a);
    CHECK(beta <= 0.0);
    const double expect = (di - r) / kSpeedOfLight;
    CHECK(std::abs(relative_delay(beta, r, a) - expect) <= 1e-9 * expect);
    const double ratio_db = 10.0 * std::log10(received_power(1.0, di, a) / received_power(1.0, r, a));
    CHECK(ratio_db == doctest::Approx(beta).epsilon(1e-12));
  }
}

TEST_CASE("relative delay decreases strictly with beta") {
  double prev = INFINITY;
  for (double beta = -40.0; beta <= 0.0; beta += 0.5) {
    const double d = relative_delay(beta, 5000.0, 2.0);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("scenario validation") {
  SfnScenario sc{5000.0, 2.0, {0.0, -12.0}};
  const auto d = sc.delays_s();
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(4.9719e-5).epsilon(1e-4));
  CHECK(sc.powers_linear()[1] == doctest::Approx(std::pow(10.0, -1.2)));
  CHECK_THROWS_AS((SfnScenario{5000.0, 2.0, {-1.0, -3.0}}.validate()), std::domain_error);
  CHECK_THROWS_AS((SfnScenario{5000.0, 2.0, {0.0, 3.0}}.validate()), std::domain_error);
  CHECK_THROWS_AS((SfnScenario{-1.0, 2.0, {0.0}}.validate()), std::domain_error);
}
