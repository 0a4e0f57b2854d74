#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "l0bb/errors.hpp"
#include "l0bb/penalty.hpp"
#include "support.hpp"

using namespace l0bb;
using testing::close;

namespace {

std::vector<PenaltyModel> samples() {
  return {PenaltyModel::big_m(1.3),       PenaltyModel::l1(0.7),
          PenaltyModel::power(1.5, 2.0),  PenaltyModel::power(0.8, 1.4),
          PenaltyModel::power(2.0, 3.5),  PenaltyModel::l1_l2(0.6, 1.7),
          PenaltyModel::big_m_l1(1.2, 0.5), PenaltyModel::big_m_l2(0.9, 2.0),
          PenaltyModel::positive_l1(0.8), PenaltyModel::positive_l2(1.1)};
}

// Largest |x| worth searching for a prox or conjugate oracle.
double reach(const PenaltyModel& h) { return h.M > 0.0 ? 1.5 * h.M : 60.0; }

}  // namespace

TEST_CASE("value examples") {
  CHECK(value(PenaltyModel::big_m(1.0), 0.5) == 0.0);
  CHECK(value(PenaltyModel::big_m(1.0), 1.5) == kInf);
  CHECK(value(PenaltyModel::l1_l2(1.0, 2.0), 2.0) == doctest::Approx(6.0));
  CHECK(value(PenaltyModel::positive_l1(1.0), -0.1) == kInf);
  CHECK(value(PenaltyModel::positive_l2(2.0), 3.0) == doctest::Approx(9.0));
}

TEST_CASE("conjugate examples against a grid supremum") {
  const auto bigm = PenaltyModel::big_m(1.0);
  CHECK(conjugate(bigm, 3.0) == doctest::Approx(3.0));
  CHECK(testing::grid_sup([&](double x) { return value(bigm, x); }, 3.0, -1.0, 1.0) ==
        doctest::Approx(3.0));
  const auto pow2 = PenaltyModel::power(2.0, 2.0);
  CHECK(conjugate(pow2, 2.0) == doctest::Approx(1.0));
  CHECK(testing::grid_sup([&](double x) { return value(pow2, x); }, 2.0, -5.0, 5.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& h : samples()) CHECK(conjugate(h, 0.0) == 0.0);
}

TEST_CASE("conjugate matches a grid supremum for every family") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-2.5, 2.5);
  for (const auto& h : samples()) {
    for (int k = 0; k < 20; ++k) {
      const double v = unit(rng);
      const double exact = conjugate(h, v);
      if (!std::isfinite(exact)) continue;
      const double grid = testing::grid_sup([&](double x) { return value(h, x); }, v, -reach(h), reach(h));
      CAPTURE(family_name(h.family));
      CAPTURE(v);
      CHECK(close(grid, exact, 1e-4, 1e-4));
    }
  }
}

TEST_CASE("prox examples against golden-section minimization") {
  const auto bigm = PenaltyModel::big_m(1.0);
  CHECK(prox(bigm, 1.0, 2.0) == 1.0);
  CHECK(prox(PenaltyModel::l1(1.0), 1.0, 2.5) == doctest::Approx(1.5));
  for (const auto& h : samples()) CHECK(prox(h, 0.7, 0.0) == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-4.0, 4.0);
  std::uniform_real_distribution<double> gam(0.1, 3.0);
  for (const auto& h : samples()) {
    for (int k = 0; k < 20; ++k) {
      const double x = unit(rng), gamma = gam(rng);
      const double want = testing::prox([&](double u) { return value(h, u); }, gamma, x, std::abs(x) + 1.0);
      CAPTURE(family_name(h.family));
      CAPTURE(x);
      CHECK(close(prox(h, gamma, x), want, 1e-6, 1e-7));
    }
  }
}

TEST_CASE("subdiff examples") {
  CHECK(subdiff(PenaltyModel::l1(2.0), 0.0) == Interval{-2.0, 2.0});
  CHECK(subdiff(PenaltyModel::power(2.0, 2.0), 1.0) == Interval{2.0, 2.0});
  CHECK(subdiff(PenaltyModel::big_m(1.0), 1.0) == Interval{0.0, kInf});
  CHECK_THROWS_AS(subdiff(PenaltyModel::big_m(1.0), 1.5), DomainError);
  CHECK_THROWS_AS(subdiff(PenaltyModel::positive_l1(1.0), -1.0), DomainError);
}

TEST_CASE("subdiff endpoints are the one-sided derivatives") {
  for (const auto& h : samples()) {
    for (double x : {-0.6, -0.2, 0.3, 0.55}) {
      if (!std::isfinite(value(h, x)) || !std::isfinite(value(h, x + 1e-6)) ||
          !std::isfinite(value(h, x - 1e-6)))
        continue;
      const auto f = [&](double t) { return value(h, t); };
      const Interval s = subdiff(h, x);
      CAPTURE(family_name(h.family));
      CAPTURE(x);
      CHECK(close(s.lo, testing::left_diff(f, x), 1e-5, 1e-5));
      CHECK(close(s.hi, testing::right_diff(f, x), 1e-5, 1e-5));
    }
  }
}

TEST_CASE("conjugate_subdiff examples") {
  CHECK(conjugate_subdiff(PenaltyModel::big_m(1.0), 1.0) == Interval{1.0, 1.0});
  CHECK(conjugate_subdiff(PenaltyModel::l1(2.0), 1.0) == Interval{0.0, 0.0});
  CHECK(conjugate_subdiff(PenaltyModel::l1(2.0), 2.0) == Interval{0.0, kInf});
  CHECK_THROWS_AS(conjugate_subdiff(PenaltyModel::l1(2.0), 2.5), DomainError);
}

TEST_CASE("compute_params reproduces the closed forms") {
  const double lambda = 0.8;
  SUBCASE("BigM") {
    const auto p = compute_params(PenaltyModel::big_m(2.0), lambda);
    CHECK(p.tau == doctest::Approx(0.4));
    CHECK(p.mu == 2.0);
    CHECK(p.kappa == kInf);
  }
  SUBCASE("L1") {
    const auto p = compute_params(PenaltyModel::l1(1.5), lambda);
    CHECK(p.tau == 1.5);
    CHECK(p.mu == kInf);
    CHECK(p.kappa == kInf);
    CHECK(p.beta == 1.5);
  }
  SUBCASE("PowerP p = 2") {
    const auto p = compute_params(PenaltyModel::power(3.0, 2.0), lambda);
    CHECK(p.tau == doctest::Approx(std::sqrt(2.0 * lambda * 3.0)));
    CHECK(p.mu == doctest::Approx(std::sqrt(2.0 * lambda / 3.0)));
    CHECK(p.kappa == doctest::Approx(p.tau));
  }
  SUBCASE("L1L2") {
    const auto p = compute_params(PenaltyModel::l1_l2(0.5, 2.0), lambda);
    CHECK(p.tau == doctest::Approx(0.5 + std::sqrt(2.0 * lambda * 2.0)));
    CHECK(p.mu == doctest::Approx(std::sqrt(2.0 * lambda / 2.0)));
    CHECK(p.kappa == doctest::Approx(p.tau));
  }
  SUBCASE("BigML2 in the box-active regime") {
    const auto p = compute_params(PenaltyModel::big_m_l2(1.0, 1.0), 2.0);
    CHECK(p.tau == doctest::Approx(2.0 + 0.5));
    CHECK(p.mu == 1.0);
    CHECK(p.kappa == kInf);
  }
  SUBCASE("lambda must be positive") {
    CHECK_THROWS_AS(compute_params(PenaltyModel::l1(1.0), 0.0), ConfigError);
  }
}

TEST_CASE("generic fallback handles h identically zero") {
  const auto h = [](double) { return 0.0; };
  const auto hc = [](double v) { return v == 0.0 ? 0.0 : kInf; };
  const PenaltyParams p = generic_params(h, hc, 1.0);
  CHECK(p.tau == 0.0);
  CHECK(p.mu == kInf);
  CHECK(p.kappa == kInf);
}

TEST_CASE("parameter invariants") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.05, 5.0);
  for (const auto& h : samples()) {
    for (int k = 0; k < 10; ++k) {
      const double lambda = lam(rng);
      const PenaltyParams p = compute_params(h, lambda);
      CAPTURE(family_name(h.family));
      CAPTURE(lambda);
      CHECK(std::isfinite(p.tau));
      CHECK(p.tau > 0.0);
      CHECK(p.mu > 0.0);
      CHECK(p.kappa >= p.tau);
      CHECK(p.tau <= p.beta);
      if (std::isfinite(p.mu)) CHECK(close(value(h, p.mu), p.tau * p.mu - lambda, 1e-12, 1e-12));
      // tau is where h* reaches lambda (or the edge of dom h*)
      if (std::isfinite(conjugate(h, p.tau * 1.001))) CHECK(conjugate(h, p.tau * 1.001) > lambda);
      CHECK(conjugate(h, p.tau * 0.999) <= lambda);
      // agreement with the generic fallback
      const PenaltyParams g = generic_params(h, lambda);
      CHECK(close(p.tau, g.tau, 1e-8));
      CHECK(close(p.mu, g.mu, 1e-8));
      CHECK(close(p.kappa, g.kappa, 1e-8));
    }
  }
}

TEST_CASE("one-sided families collapse on the negative half-line") {
  for (const auto& h : {PenaltyModel::positive_l1(1.0), PenaltyModel::positive_l2(1.0)}) {
    const PenaltyParams p = compute_params(h, 0.5, Side::Negative);
    CHECK(p.tau == kInf);
    CHECK(p.mu == kInf);
    CHECK(conjugate(h, -3.0) == 0.0);
  }
}

TEST_CASE("h* is nonnegative and non-decreasing on the positive half-line") {
  for (const auto& h : samples()) {
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double v = 0.01 * k;
      const double c = conjugate(h, v);
      CHECK(c >= 0.0);
      CHECK(c >= prev);
      prev = c;
      if (!std::isfinite(c)) break;
    }
  }
}

TEST_CASE("prox and subdiff agree (Fermat rule)") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  std::uniform_real_distribution<double> gam(0.05, 4.0);
  for (const auto& h : samples()) {
    for (int k = 0; k < 200; ++k) {
      const double x = unit(rng), gamma = gam(rng);
      const double u = prox(h, gamma, x);
      const double s = (x - u) / gamma;
      CHECK(subdiff(h, u).contains(s, 1e-9 * std::max(1.0, std::abs(s))));
      const double uc = conjugate_prox(h, gamma, x);
      const double sc = (x - uc) / gamma;
      CHECK(conjugate_subdiff(h, uc).contains(sc, 1e-9 * std::max(1.0, std::abs(sc))));
    }
  }
}

TEST_CASE("closed-form conjugate prox agrees with the Moreau route") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  std::uniform_real_distribution<double> gam(0.05, 4.0);
  for (const auto& h : samples()) {
    for (int k = 0; k < 100; ++k) {
      const double v = unit(rng), gamma = gam(rng);
      CHECK(close(conjugate_prox(h, gamma, v), conjugate_prox_moreau(h, gamma, v), 1e-12, 1e-12));
    }
  }
}

TEST_CASE("even families are symmetric") {
  for (const auto& h : samples()) {
    if (!h.is_even()) continue;
    for (double x : {0.1, 0.7, 1.2, 3.0}) {
      CHECK(value(h, -x) == value(h, x));
      CHECK(conjugate(h, -x) == conjugate(h, x));
      CHECK(prox(h, 0.9, -x) == -prox(h, 0.9, x));
    }
  }
}

TEST_CASE("factories reject invalid parameters") {
  CHECK_THROWS_AS(PenaltyModel::big_m(0.0), ConfigError);
  CHECK_THROWS_AS(PenaltyModel::l1(-1.0), ConfigError);
  CHECK_THROWS_AS(PenaltyModel::power(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(PenaltyModel::l1_l2(1.0, std::nan("")), ConfigError);
}
