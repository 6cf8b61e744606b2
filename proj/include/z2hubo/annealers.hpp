#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "z2hubo/graph_map.hpp"
#include "z2hubo/hubo.hpp"

namespace z2hubo {

/// Hyperparameters shared by LQA and gLQA. Defaults come from a grid search on
/// the L=10 torus. With a constant B the gauge step accumulates over the run:
/// once n_iter * B exceeds roughly 40 the parameters get pinned near w = 0,
/// where the quartic terms have no gradient. Lower B for longer schedules.
struct AnnealerParams {
  std::size_t n_iter = 1000;
  double gamma = 300.0;
  double eta = 0.001;
  double mu = 0.5;
  double B = 0.01;
  double init_scale = 0.5;
  std::uint64_t seed = 0;

  /// Throws DomainError if any field is out of range.
  void validate() const;
};

struct AnnealerState {
  std::vector<double> w;
  std::vector<double> nu;
};

struct SampleResult {
  double energy = 0.0;
  SpinConfig spins;
  std::size_t iterations_run = 0;
  double wall_time = 0.0;  // seconds
};

/// theta_i = (pi/2) tanh(w_i).
double link_angle(double w);

/// <theta| t*gamma*Z - (1-t)*sum_l sigma_x^l |theta> for the product state
/// with per-link angles theta_l = (pi/2) tanh(w_l): plaquette products of
/// z_l = sin(theta_l), transverse part x_l = cos(theta_l).
double lqa_cost(const GGraph& g, std::span<const double> w, double t, double gamma);

/// Analytic gradient of lqa_cost with respect to w.
std::vector<double> lqa_grad(const GGraph& g, std::span<const double> w, double t, double gamma);

/// sum over sites of (prod_{l in v} x_l - 1)^2.
double gauge_penalty(const GGraph& g, std::span<const double> w);

/// One synchronous gauge-forcing step, w_i -= B * sum_{v ni i} (X_v - 1) dX_v/dw_i
/// with X_v = prod_{l in v} x_l, all x taken from the incoming w. Equal to
/// -(B/2) grad gauge_penalty.
std::vector<double> gauge_step(const GGraph& g, std::span<const double> w, double B);

/// Momentum gradient descent on lqa_cost over t_j = j/n_iter, spins = sign(w)
/// with sign(0) = +1. Throws DivergenceError on non-finite or |w| > 1e6.
SampleResult lqa_run(const GGraph& g, const AnnealerParams& params);

/// lqa_run with a gauge_step of strength B after every momentum update.
SampleResult glqa_run(const GGraph& g, const AnnealerParams& params);

/// Final (w, nu) of an LQA/gLQA trajectory; used by tests that compare trajectories.
AnnealerState lqa_trajectory(const GGraph& g, const AnnealerParams& params, bool gauge);

enum class BetaSchedule { kGeometric, kLinear };

struct SaSchedule {
  double beta_min = 0.1;
  double beta_max = 10.0;
  BetaSchedule kind = BetaSchedule::kGeometric;

  /// Throws DomainError on negative or inverted bounds, or beta_min = 0 with a
  /// geometric schedule.
  void validate() const;
};

/// Single-spin-flip Metropolis annealing over the plaquette energy. One sweep
/// proposes every link once in a fresh random order. Returns the best
/// configuration seen.
SampleResult sa_run(const GGraph& g, std::size_t sweeps, const SaSchedule& schedule,
                    std::uint64_t seed);

}  // namespace z2hubo
