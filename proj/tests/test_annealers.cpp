#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "z2hubo/annealers.hpp"
#include "z2hubo/error.hpp"
#include "z2hubo/graph_map.hpp"
#include "z2hubo/hubo.hpp"
#include "z2hubo/quantum_sim.hpp"

using namespace z2hubo;

namespace {

std::vector<double> random_w(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> w(n);
  for (auto& x : w) x = d(rng);
  return w;
}

GGraph small_instance(std::mt19937_64& rng) {
  return rng() % 2 ? gen_torus_lattice(2) : gen_four_regular_dual(6, rng() % 1000, 6);
}

// Penalty written out directly from the site link lists.
double penalty_oracle(const GGraph& g, const std::vector<double>& w) {
  double p = 0.0;
  for (const auto& s : g.sites()) {
    double prod = 1.0;
    for (auto l : s.links) prod *= std::cos(std::numbers::pi / 2 * std::tanh(w[l]));
    p += (prod - 1.0) * (prod - 1.0);
  }
  return p;
}

}  // namespace

TEST(LqaCost, ZeroParameters) {
  const auto g = gen_torus_lattice(3);
  const std::vector<double> w(g.n_links(), 0.0);
  for (double t : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(lqa_cost(g, w, t, 2.5), -(1.0 - t) * 18.0, 1e-12);
  }
}

TEST(LqaCost, SaturatedLimit) {
  const auto g = gen_torus_lattice(2);
  const std::vector<double> w(8, 100.0);
  EXPECT_NEAR(lqa_cost(g, w, 1.0, 1.0), -4.0, 1e-12);
  EXPECT_NEAR(lqa_cost(g, w, 1.0, 3.0), 3.0 * g.satisfied_energy(), 1e-12);
}

TEST(LqaCost, MatchesDenseStateExpectation) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = rep % 2 ? gen_four_regular_dual(6, rep, 6) : gen_torus_lattice(2);
    const auto w = random_w(rng, g.n_links(), 2.0);
    std::vector<double> theta(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) theta[i] = link_angle(w[i]);
    const auto psi = QuantumState::product(theta);
    const double z = expectation(psi, g, 0.0);
    const double x = z - expectation(psi, g, 1.0);
    const double t = std::uniform_real_distribution<double>(0, 1)(rng);
    const double gamma = 0.7;
    EXPECT_NEAR(lqa_cost(g, w, t, gamma), t * gamma * z - (1 - t) * x, 1e-10);
  }
}

TEST(LqaCost, AngleIdentities) {
  std::mt19937_64 rng(22);
  for (double w : random_w(rng, 1000, 20.0)) {
    const double th = link_angle(w);
    // tanh rounds to exactly 1 beyond |w| ~ 19, so the open bound is only representable below that.
    if (std::abs(w) < 15.0) {
      EXPECT_GT(th, -std::numbers::pi / 2);
      EXPECT_LT(th, std::numbers::pi / 2);
    }
    EXPECT_LE(std::abs(th), std::numbers::pi / 2);
    EXPECT_NEAR(std::sin(th) * std::sin(th) + std::cos(th) * std::cos(th), 1.0, 1e-12);
  }
}

TEST(LqaGrad, ZeroAtOrigin) {
  const auto g = gen_four_regular_dual(10, 3);
  const std::vector<double> w(g.n_links(), 0.0);
  for (double v : lqa_grad(g, w, 0.6, 4.0)) EXPECT_EQ(v, 0.0);
}

TEST(LqaGrad, SingleLinkClosedForm) {
  const GGraph g(1, {{-1.0, {0}}}, {});
  const double w = 0.3, th = link_angle(w), sech = 1.0 / std::cosh(w);
  const auto grad = lqa_grad(g, std::vector<double>{w}, 1.0, 1.0);
  EXPECT_NEAR(grad[0], -std::cos(th) * std::numbers::pi / 2 * sech * sech, 1e-14);
}

TEST(LqaGrad, MatchesCentralDifferences) {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = small_instance(rng);
    auto w = random_w(rng, g.n_links(), 1.5);
    const double t = std::uniform_real_distribution<double>(0, 1)(rng);
    const double gamma = std::uniform_real_distribution<double>(0.1, 5)(rng);
    const auto grad = lqa_grad(g, w, t, gamma);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double w0 = w[i];
      w[i] = w0 + h;
      const double up = lqa_cost(g, w, t, gamma);
      w[i] = w0 - h;
      const double dn = lqa_cost(g, w, t, gamma);
      w[i] = w0;
      const double fd = (up - dn) / (2 * h);
      EXPECT_NEAR(grad[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(LqaCost, DimensionChecks) {
  const auto g = gen_torus_lattice(2);
  const std::vector<double> w(7, 0.0);
  EXPECT_THROW(lqa_cost(g, w, 0.5, 1.0), DimensionError);
  EXPECT_THROW(lqa_grad(g, w, 0.5, 1.0), DimensionError);
  EXPECT_THROW(gauge_step(g, w, 0.1), DimensionError);
}

TEST(GaugeStep, FixedPoints) {
  std::mt19937_64 rng(24);
  const auto g = gen_torus_lattice(3);
  const std::vector<double> zero(g.n_links(), 0.0);
  EXPECT_EQ(gauge_step(g, zero, 0.5), zero);
  const auto w = random_w(rng, g.n_links(), 1.0);
  EXPECT_EQ(gauge_step(g, w, 0.0), w);
}

TEST(GaugeStep, IsHalfPenaltyGradientDescent) {
  std::mt19937_64 rng(25);
  const double h = 1e-6;
  for (int rep = 0; rep < 30; ++rep) {
    const auto g = small_instance(rng);
    auto w = random_w(rng, g.n_links(), 1.0);
    const double B = 0.01;
    const auto stepped = gauge_step(g, w, B);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double w0 = w[i];
      w[i] = w0 + h;
      const double up = penalty_oracle(g, w);
      w[i] = w0 - h;
      const double dn = penalty_oracle(g, w);
      w[i] = w0;
      const double grad = (up - dn) / (2 * h);
      EXPECT_NEAR(stepped[i] - w[i], -0.5 * B * grad, 1e-9);
    }
    EXPECT_NEAR(gauge_penalty(g, w), penalty_oracle(g, w), 1e-12);
  }
}

TEST(GaugeStep, PenaltyDoesNotIncrease) {
  std::mt19937_64 rng(26);
  const auto g = gen_torus_lattice(2);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = random_w(rng, g.n_links(), 1.5);
    EXPECT_LE(gauge_penalty(g, gauge_step(g, w, 0.01)), gauge_penalty(g, w) + 1e-15);
  }
}

TEST(Lqa, ValidatesParams) {
  const auto g = gen_torus_lattice(2);
  AnnealerParams p;
  p.eta = 0.0;
  EXPECT_THROW(lqa_run(g, p), DomainError);
  p = {};
  p.mu = 1.5;
  EXPECT_THROW(lqa_run(g, p), DomainError);
  p = {};
  p.B = -1;
  EXPECT_THROW(glqa_run(g, p), DomainError);
  p = {};
  p.gamma = 0;
  EXPECT_THROW(lqa_run(g, p), DomainError);
  p = {};
  p.init_scale = 0;
  EXPECT_THROW(lqa_run(g, p), DomainError);
}

TEST(Lqa, SolvesSmallestTorus) {
  const auto g = gen_torus_lattice(2);
  EXPECT_EQ(brute_force_minimum(g.to_polynomial()).energy, -4.0);
  AnnealerParams p;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    p.seed = seed;
    EXPECT_EQ(lqa_run(g, p).energy, -4.0) << seed;
    EXPECT_EQ(glqa_run(g, p).energy, -4.0) << seed;
  }
}

TEST(Lqa, ZeroIterationsReturnsInitialSigns) {
  const auto g = gen_torus_lattice(3);
  AnnealerParams p;
  p.n_iter = 0;
  p.seed = 4;
  const auto r = lqa_run(g, p);
  const auto state = lqa_trajectory(g, p, false);
  EXPECT_EQ(r.iterations_run, 0u);
  for (std::size_t i = 0; i < g.n_links(); ++i) EXPECT_EQ(r.spins[i], state.w[i] >= 0 ? 1 : -1);
  EXPECT_EQ(r.energy, g.energy(r.spins));
}

TEST(Lqa, EnergyMatchesReturnedSpins) {
  const auto g = gen_four_regular_dual(20, 1);
  const auto poly = g.to_polynomial();
  AnnealerParams p;
  p.n_iter = 200;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    const auto r = glqa_run(g, p);
    EXPECT_EQ(r.energy, evaluate(poly, r.spins));
  }
}

TEST(Glqa, ZeroStrengthReducesToLqa) {
  const auto g = gen_torus_lattice(4);
  AnnealerParams p;
  p.B = 0.0;
  p.n_iter = 300;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    const auto a = lqa_trajectory(g, p, false);
    const auto b = lqa_trajectory(g, p, true);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.nu, b.nu);
    EXPECT_EQ(lqa_run(g, p).spins, glqa_run(g, p).spins);
  }
}

TEST(Glqa, GaugeStepChangesTrajectory) {
  const auto g = gen_torus_lattice(4);
  AnnealerParams p;
  p.B = 0.05;
  p.n_iter = 50;
  EXPECT_NE(lqa_trajectory(g, p, false).w, lqa_trajectory(g, p, true).w);
}

TEST(Annealers, Deterministic) {
  const auto g = gen_four_regular_dual(30, 2);
  AnnealerParams p;
  p.n_iter = 200;
  p.seed = 99;
  const auto a = glqa_run(g, p), b = glqa_run(g, p);
  EXPECT_EQ(a.spins, b.spins);
  EXPECT_EQ(lqa_trajectory(g, p, true).w, lqa_trajectory(g, p, true).w);
  EXPECT_EQ(sa_run(g, 20, {}, 5).spins, sa_run(g, 20, {}, 5).spins);
}

TEST(Annealers, Divergence) {
  const auto g = gen_torus_lattice(3);
  AnnealerParams p;
  p.gamma = 1e9;
  p.eta = 1e3;
  p.init_scale = 1.0;
  try {
    lqa_run(g, p);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.iteration(), 1u);
  }
}

TEST(Annealers, NeverBelowBruteForce) {
  std::mt19937_64 rng(27);
  AnnealerParams p;
  p.n_iter = 100;
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = gen_four_regular_dual(5 + rep % 4, rep, 6);
    const double floor = brute_force_minimum(g.to_polynomial()).energy;
    p.seed = rng();
    EXPECT_GE(lqa_run(g, p).energy, floor);
    EXPECT_GE(glqa_run(g, p).energy, floor);
    EXPECT_GE(sa_run(g, 10, {}, rng()).energy, floor);
  }
}

TEST(Sa, ScheduleValidation) {
  const auto g = gen_torus_lattice(2);
  EXPECT_THROW(sa_run(g, 0, {}, 1), DomainError);
  EXPECT_THROW(sa_run(g, 10, {2.0, 1.0, BetaSchedule::kGeometric}, 1), DomainError);
  EXPECT_THROW(sa_run(g, 10, {0.0, 1.0, BetaSchedule::kGeometric}, 1), DomainError);
  EXPECT_THROW(sa_run(g, 10, {-1.0, 1.0, BetaSchedule::kLinear}, 1), DomainError);
  EXPECT_NO_THROW(sa_run(g, 1, {0.0, 0.0, BetaSchedule::kLinear}, 1));
}

TEST(Sa, ColdScheduleSolvesSmallestTorus) {
  const auto g = gen_torus_lattice(2);
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    solved += sa_run(g, 100, {1.0, 50.0, BetaSchedule::kGeometric}, seed).energy == -4.0;
  }
  EXPECT_GE(solved, 45);
}

TEST(Sa, InfiniteTemperatureStaysAboveGround) {
  const auto g = gen_torus_lattice(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = sa_run(g, 1, {0.0, 0.0, BetaSchedule::kLinear}, seed);
    EXPECT_GE(r.energy, -16.0);
    EXPECT_EQ(r.energy, g.energy(r.spins));
  }
}
