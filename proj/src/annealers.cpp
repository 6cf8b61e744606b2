#include "z2hubo/annealers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "z2hubo/error.hpp"

namespace z2hubo {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kDivergenceBound = 1e6;

/// Flattened incidence of a GGraph plus per-link trig buffers.
class Kernel {
 public:
  explicit Kernel(const GGraph& g) : n_(g.n_links()) {
    plaq_offsets_.push_back(0);
    for (const auto& p : g.plaquettes()) {
      plaq_links_.insert(plaq_links_.end(), p.links.begin(), p.links.end());
      plaq_offsets_.push_back(plaq_links_.size());
      couplings_.push_back(p.coupling);
    }
    site_offsets_.push_back(0);
    for (const auto& s : g.sites()) {
      site_links_.insert(site_links_.end(), s.links.begin(), s.links.end());
      site_offsets_.push_back(site_links_.size());
    }
    std::size_t widest = 1;
    for (std::size_t k = 0; k + 1 < plaq_offsets_.size(); ++k)
      widest = std::max(widest, plaq_offsets_[k + 1] - plaq_offsets_[k]);
    for (std::size_t k = 0; k + 1 < site_offsets_.size(); ++k)
      widest = std::max(widest, site_offsets_[k + 1] - site_offsets_[k]);
    z_.resize(n_);
    x_.resize(n_);
    dtheta_.resize(n_);
    acc_.resize(n_);
    suffix_.resize(widest + 1);
  }

  std::size_t size() const { return n_; }

  /// z = sin(theta), x = cos(theta), dtheta = d theta / d w.
  void load(std::span<const double> w) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double th = std::tanh(w[i]);
      const double theta = kHalfPi * th;
      z_[i] = std::sin(theta);
      x_[i] = std::cos(theta);
      dtheta_[i] = kHalfPi * (1.0 - th * th);
    }
  }

  double cost(double t, double gamma) const {
    double zsum = 0.0;
    for (std::size_t p = 0; p < couplings_.size(); ++p) {
      double prod = 1.0;
      for (std::size_t k = plaq_offsets_[p]; k < plaq_offsets_[p + 1]; ++k) prod *= z_[plaq_links_[k]];
      zsum += couplings_[p] * prod;
    }
    double xsum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) xsum += x_[i];
    return t * gamma * zsum - (1.0 - t) * xsum;
  }

  /// grad must have size n_. Requires load().
  void gradient(double t, double gamma, std::span<double> grad) {
    std::fill(acc_.begin(), acc_.end(), 0.0);
    for (std::size_t p = 0; p < couplings_.size(); ++p) {
      accumulate_leave_one_out(plaq_offsets_[p], plaq_offsets_[p + 1], plaq_links_, z_,
                               couplings_[p]);
    }
    const double a = t * gamma;
    const double b = 1.0 - t;
    for (std::size_t i = 0; i < n_; ++i) {
      grad[i] = dtheta_[i] * (a * x_[i] * acc_[i] + b * z_[i]);
    }
  }

  double penalty() const {
    double total = 0.0;
    for (std::size_t v = 0; v + 1 < site_offsets_.size(); ++v) {
      double prod = 1.0;
      for (std::size_t k = site_offsets_[v]; k < site_offsets_[v + 1]; ++k) prod *= x_[site_links_[k]];
      total += (prod - 1.0) * (prod - 1.0);
    }
    return total;
  }

  /// In-place w_i -= B * sum_v (X_v - 1) * dX_v/dw_i. Requires load(w).
  void gauge(std::span<double> w, double B) {
    std::fill(acc_.begin(), acc_.end(), 0.0);
    for (std::size_t v = 0; v + 1 < site_offsets_.size(); ++v) {
      double prod = 1.0;
      for (std::size_t k = site_offsets_[v]; k < site_offsets_[v + 1]; ++k) prod *= x_[site_links_[k]];
      accumulate_leave_one_out(site_offsets_[v], site_offsets_[v + 1], site_links_, x_,
                               prod - 1.0);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double dx = -z_[i] * dtheta_[i];
      w[i] -= B * acc_[i] * dx;
    }
  }

  bool has_sites() const { return site_offsets_.size() > 1; }

 private:
  /// acc[l] += factor * prod_{m != l} values[m] over the links of one group.
  /// Prefix/suffix products avoid dividing by a zero entry.
  void accumulate_leave_one_out(std::size_t begin, std::size_t end,
                                const std::vector<std::size_t>& links,
                                const std::vector<double>& values, double factor) {
    if (factor == 0.0) return;
    const std::size_t k = end - begin;
    suffix_[k] = 1.0;
    for (std::size_t j = k; j-- > 0;) suffix_[j] = suffix_[j + 1] * values[links[begin + j]];
    double prefix = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t l = links[begin + j];
      acc_[l] += factor * prefix * suffix_[j + 1];
      prefix *= values[l];
    }
  }

  std::size_t n_;
  std::vector<std::size_t> plaq_offsets_, plaq_links_;
  std::vector<double> couplings_;
  std::vector<std::size_t> site_offsets_, site_links_;
  std::vector<double> z_, x_, dtheta_, acc_, suffix_;
};

void check_length(const GGraph& g, std::span<const double> w) {
  if (w.size() != g.n_links()) {
    throw DimensionError("parameter vector has " + std::to_string(w.size()) +
                         " entries, graph has " + std::to_string(g.n_links()) + " links");
  }
}

SpinConfig signs(std::span<const double> w) {
  SpinConfig s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) s.set(i, w[i] >= 0.0);
  return s;
}

AnnealerState run_momentum(const GGraph& g, const AnnealerParams& params, bool gauge) {
  params.validate();
  const std::size_t n = g.n_links();
  Kernel kernel(g);
  AnnealerState state{std::vector<double>(n), std::vector<double>(n, 0.0)};
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> init(-params.init_scale, params.init_scale);
  for (auto& wi : state.w) wi = init(rng);

  std::vector<double> grad(n);
  const bool apply_gauge = gauge && params.B != 0.0 && kernel.has_sites();
  for (std::size_t j = 1; j <= params.n_iter; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(params.n_iter);
    kernel.load(state.w);
    kernel.gradient(t, params.gamma, grad);
    for (std::size_t i = 0; i < n; ++i) {
      state.nu[i] = params.mu * state.nu[i] - params.eta * grad[i];
      state.w[i] += state.nu[i];
    }
    if (apply_gauge) {
      kernel.load(state.w);
      kernel.gauge(state.w, params.B);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(state.w[i]) || std::abs(state.w[i]) > kDivergenceBound) {
        throw DivergenceError(j, "w[" + std::to_string(i) + "] = " + std::to_string(state.w[i]));
      }
    }
  }
  return state;
}

SampleResult finish(const GGraph& g, const AnnealerState& state, std::size_t iterations,
                    std::chrono::steady_clock::time_point start) {
  SampleResult r;
  r.spins = signs(state.w);
  r.energy = g.energy(r.spins);
  r.iterations_run = iterations;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

void AnnealerParams::validate() const {
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  if (!(eta > 0.0)) throw DomainError("eta must be > 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
  if (!(B >= 0.0)) throw DomainError("B must be >= 0");
  if (!(init_scale > 0.0)) throw DomainError("init_scale must be > 0");
}

double link_angle(double w) { return kHalfPi * std::tanh(w); }

double lqa_cost(const GGraph& g, std::span<const double> w, double t, double gamma) {
  check_length(g, w);
  Kernel k(g);
  k.load(w);
  return k.cost(t, gamma);
}

std::vector<double> lqa_grad(const GGraph& g, std::span<const double> w, double t, double gamma) {
  check_length(g, w);
  Kernel k(g);
  k.load(w);
  std::vector<double> grad(w.size());
  k.gradient(t, gamma, grad);
  return grad;
}

double gauge_penalty(const GGraph& g, std::span<const double> w) {
  check_length(g, w);
  Kernel k(g);
  k.load(w);
  return k.penalty();
}

std::vector<double> gauge_step(const GGraph& g, std::span<const double> w, double B) {
  check_length(g, w);
  std::vector<double> out(w.begin(), w.end());
  if (B == 0.0) return out;
  Kernel k(g);
  k.load(w);
  k.gauge(out, B);
  return out;
}

AnnealerState lqa_trajectory(const GGraph& g, const AnnealerParams& params, bool gauge) {
  return run_momentum(g, params, gauge);
}

SampleResult lqa_run(const GGraph& g, const AnnealerParams& params) {
  const auto start = std::chrono::steady_clock::now();
  auto state = run_momentum(g, params, false);
  return finish(g, state, params.n_iter, start);
}

SampleResult glqa_run(const GGraph& g, const AnnealerParams& params) {
  const auto start = std::chrono::steady_clock::now();
  auto state = run_momentum(g, params, true);
  return finish(g, state, params.n_iter, start);
}

void SaSchedule::validate() const {
  if (!(beta_min >= 0.0) || !(beta_max >= beta_min) || !std::isfinite(beta_max)) {
    throw DomainError("SA schedule needs 0 <= beta_min <= beta_max < inf");
  }
  if (kind == BetaSchedule::kGeometric && beta_min == 0.0) {
    throw DomainError("geometric SA schedule needs beta_min > 0");
  }
}

SampleResult sa_run(const GGraph& g, std::size_t sweeps, const SaSchedule& schedule,
                    std::uint64_t seed) {
  if (sweeps == 0) throw DomainError("SA needs at least one sweep");
  schedule.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = g.n_links();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SpinConfig s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, unit(rng) < 0.5);
  const auto& plaqs = g.plaquettes();
  std::vector<int> psign(plaqs.size());
  double energy = 0.0;
  for (std::size_t p = 0; p < plaqs.size(); ++p) {
    int sign = 1;
    for (Index l : plaqs[p].links) sign *= s[l];
    psign[p] = sign;
    energy += plaqs[p].coupling * sign;
  }
  SpinConfig best = s;
  double best_energy = energy;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    const double frac =
        sweeps == 1 ? 1.0 : static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
    const double beta =
        schedule.kind == BetaSchedule::kGeometric
            ? schedule.beta_min * std::pow(schedule.beta_max / schedule.beta_min, frac)
            : schedule.beta_min + (schedule.beta_max - schedule.beta_min) * frac;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      double local = 0.0;
      for (Index p : g.plaquettes_of(i)) local += plaqs[p].coupling * psign[p];
      const double delta = -2.0 * local;
      if (delta > 0.0 && unit(rng) >= std::exp(-beta * delta)) continue;
      s.flip(i);
      for (Index p : g.plaquettes_of(i)) psign[p] = -psign[p];
      energy += delta;
      if (energy < best_energy) {
        best_energy = energy;
        best = s;
      }
    }
  }
  SampleResult r;
  r.spins = best;
  r.energy = g.energy(best);
  r.iterations_run = sweeps;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace z2hubo
