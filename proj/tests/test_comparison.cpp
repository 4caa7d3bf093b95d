#include <doctest.h>

#include <cmath>

#include "bz/comparison.hpp"
#include "bz/error.hpp"
#include "ode_oracle.hpp"

using namespace bz;

TEST_CASE("logistic hitting time") {
  const auto p = ModelParams::standard(1.0);
  CHECK(logistic_hit_time(0.1, 0.1, p) == 0.0);
  CHECK(logistic_hit_time(1e-5, p.q(), p) == doctest::Approx(0.032 * std::log((1 - 1e-5) * 2e-4 / (1e-5 * (1 - 2e-4)))).epsilon(1e-12));
  CHECK(logistic_hit_time(1e-5, p.q(), p) == doctest::Approx(0.09588).epsilon(1e-4));
  const ModelParams p2(2 * p.epsilon(), 1.0, p.q(), p.d());
  CHECK(logistic_hit_time(1e-5, 0.5, p2) == doctest::Approx(2 * logistic_hit_time(1e-5, 0.5, p)).epsilon(1e-15));
  CHECK_THROWS_AS(logistic_hit_time(0.5, 0.1, p), DomainError);

  HitOptions opt;
  opt.step = p.epsilon() / 100.0;
  const auto logistic = [&](double r) { return r * (1.0 - r) / p.epsilon(); };
  for (double target : {p.q(), 0.1, 0.9}) {
    CHECK(std::abs(ode_hit_time(logistic, 1e-5, target, opt) - logistic_hit_time(1e-5, target, p)) <= 1e-8);
  }
}

TEST_CASE("relaxation hitting time") {
  CHECK(relaxation_hit_time(0.3, 0.5, 0.3) == 0.0);
  CHECK(relaxation_hit_time(0.01, 0.5, 0.4) == doctest::Approx(std::log(0.49 / 0.1)));
  CHECK(relaxation_hit_time(0.01, 0.5, 0.4) == doctest::Approx(1.589).epsilon(1e-3));
  CHECK(relaxation_hit_time(2.0, 0.5, 1.0) == doctest::Approx(std::log(1.5 / 0.5)));
  CHECK_THROWS_AS(relaxation_hit_time(0.01, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(relaxation_hit_time(0.01, 0.5, 0.6), DomainError);
}

TEST_CASE("ode hitting time") {
  CHECK(ode_hit_time([](double y) { return -y; }, 1.0, 1.0) == 0.0);
  CHECK(ode_hit_time([](double y) { return -y; }, 1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(ode_hit_time([](double y) { return -y; }, 1.0, 2.0), DomainError);
  HitOptions opt;
  opt.max_T = 1.0;
  CHECK_THROWS_AS(ode_hit_time([](double y) { return 1.0 - y; }, 0.0, 1.0 - 1e-3, opt), ConvergenceError);
}

TEST_CASE("trap chain at the standard parameters") {
  const auto p = ModelParams::standard(1.0);
  const auto r = trap_chain(p.q() / 2, 1.0, p);
  CHECK(p.q() < r.q3);
  CHECK(r.q3 < r.q2);
  CHECK(r.q2 < r.q1);
  CHECK(r.q1 < 1.0);
  CHECK(p.q() < r.kappa_star);
  CHECK(r.kappa_star < r.u_star);
  CHECK(r.u_star < r.u_bar);
  CHECK(0.0 <= r.T1);
  CHECK(r.T1 <= r.T2);
  CHECK(r.T2 <= r.T3);
  CHECK(r.T3 <= r.T4);
  CHECK(r.T4 <= r.T_sharp);

  // legs against an independent adaptive integrator
  const double sigma = oracle::scalar([&](double s) { return rhs_G_m(s, 1.0, p); }, p.q(), r.T2 - r.T1, 1e-13);
  CHECK(std::abs(sigma - r.q2) <= 1e-9);
  const double kappa = oracle::scalar([&](double s) { return rhs_G_star(s, r.q3, p); }, 1.0, r.T4 - r.T3, 1e-13);
  CHECK(std::abs(kappa - r.u_star) <= 1e-9);
  CHECK(r.T3 - r.T2 == doctest::Approx(std::log((r.q2 - r.c_star) / (r.q2 - r.q3))));
}

TEST_CASE("trap chain limits and monotonicity") {
  const auto p = ModelParams::standard(1.0);
  CHECK(trap_chain(p.q() * (1 - 1e-9), 1.0, p).T1 < 1e-9);
  double prev = 0.0;
  for (double m : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0}) {
    const auto r = trap_chain(p.q() / 2, m, p);
    CHECK(r.T4 - r.T3 > prev);
    prev = r.T4 - r.T3;
  }
  CHECK_THROWS_AS(trap_chain(p.q(), 1.0, p), DomainError);
  CHECK_THROWS_AS(trap_chain(p.q() / 2, 0.5, p), DomainError);
  ChainMargins bad;
  bad.q2 = 1.0;
  CHECK_THROWS_AS(trap_chain(p.q() / 2, 1.0, p, bad), DomainError);
}

TEST_CASE("natural region") {
  const auto p = ModelParams::standard(1.0);
  const auto base = trap_chain(p.q() / 2, 1.0, p);
  const double kb = find_kappa_bar(base.q1, p);
  const double u_nat = kb + 0.5 * (base.u_bar - kb);
  const double q_nat = p.q() + 0.5 * (base.q1 - p.q());
  const auto nr = natural_region(1.0, p, q_nat, u_nat, p.q() / 2);
  CHECK(nr.chain.q3 > q_nat);
  CHECK(nr.chain.q2 > nr.chain.q3);
  CHECK(nr.chain.q1 > nr.chain.q2);
  CHECK(nr.chain.kappa_star < u_nat);
  CHECK(nr.chain.u_star < u_nat);
  CHECK(nr.chain.mu_target < u_nat);
  CHECK(nr.T_nat >= nr.chain.T4);
  const auto full = natural_region(1.0, p, p.q(), base.u_bar, p.q() / 2);
  CHECK(full.chain.kappa_star < base.u_bar);
  CHECK_THROWS_AS(natural_region(1.0, p, base.q1, u_nat, p.q() / 2), DomainError);
  CHECK_THROWS_AS(natural_region(1.0, p, q_nat, kb, p.q() / 2), DomainError);
}
