#include "z2hubo/quantum_sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "z2hubo/error.hpp"
#include "z2hubo/io.hpp"

namespace z2hubo {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr std::size_t kDenseLimit = 10;
constexpr double kDegeneracyTolerance = 1e-9;

void check_size(std::size_t n_links) {
  if (n_links > kMaxSimLinks) {
    throw SizeError("state-vector simulation is limited to " + std::to_string(kMaxSimLinks) +
                    " links, instance has " + std::to_string(n_links));
  }
}

void check_graph(const GGraph& g, const QuantumState& psi) {
  check_size(g.n_links());
  if (psi.n_links() != g.n_links()) {
    throw DimensionError("state has " + std::to_string(psi.n_links()) + " links, graph has " +
                         std::to_string(g.n_links()));
  }
}

std::uint64_t mask_of(const std::vector<Index>& links) {
  std::uint64_t m = 0;
  for (Index l : links) m |= std::uint64_t{1} << l;
  return m;
}

/// y = a*Z*x - b*sum_l X_l x for real vectors.
void real_matvec(const std::vector<double>& diag, std::size_t n_links, double a, double b,
                 const double* x, double* y) {
  const std::size_t dim = diag.size();
  for (std::size_t i = 0; i < dim; ++i) {
    double flips = 0.0;
    for (std::size_t l = 0; l < n_links; ++l) flips += x[i ^ (std::size_t{1} << l)];
    y[i] = a * diag[i] * x[i] - b * flips;
  }
}

GroundSpace diagonal_ground(const std::vector<double>& diag, double a) {
  GroundSpace gs;
  double best = std::numeric_limits<double>::infinity();
  for (double d : diag) best = std::min(best, a * d);
  gs.energy = best;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (a * diag[i] <= best + kDegeneracyTolerance) gs.basis_states.push_back(i);
  }
  gs.degeneracy = gs.basis_states.size();
  return gs;
}

GroundSpace dense_ground(const std::vector<double>& diag, std::size_t n_links, double a, double b) {
  const auto dim = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    H(i, i) = a * diag[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < n_links; ++l) {
      H(i, static_cast<Eigen::Index>(static_cast<std::size_t>(i) ^ (std::size_t{1} << l))) -= b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw ConsistencyError("dense eigensolver failed");
  GroundSpace gs;
  gs.energy = solver.eigenvalues()(0);
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (solver.eigenvalues()(k) > gs.energy + kDegeneracyTolerance) break;
    const auto col = solver.eigenvectors().col(k);
    gs.vectors.emplace_back(col.data(), col.data() + dim);
  }
  gs.degeneracy = gs.vectors.size();
  return gs;
}

/// Lanczos with full reorthogonalization and explicit restarts from the Ritz vector.
GroundSpace lanczos_ground(const std::vector<double>& diag, std::size_t n_links, double a,
                           double b) {
  const std::size_t dim = diag.size();
  const std::size_t max_basis = std::min<std::size_t>(dim, 120);
  constexpr int kRestarts = 40;
  constexpr double kResidualTol = 1e-10;

  // |+>^n lies in the symmetry sector of the ground state when b > 0.
  std::vector<double> start(dim, 1.0);
  if (b < 0.0) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    for (auto& v : start) v = nd(rng);
  }
  double nrm = std::sqrt(std::inner_product(start.begin(), start.end(), start.begin(), 0.0));
  for (auto& v : start) v /= nrm;

  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim);
  double energy = 0.0;
  for (int restart = 0; restart < kRestarts; ++restart) {
    basis.assign(1, start);
    std::vector<double> alpha, beta;
    for (std::size_t k = 0; k < max_basis; ++k) {
      real_matvec(diag, n_links, a, b, basis[k].data(), w.data());
      alpha.push_back(std::inner_product(w.begin(), w.end(), basis[k].begin(), 0.0));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
          const double c = std::inner_product(w.begin(), w.end(), q.begin(), 0.0);
          for (std::size_t i = 0; i < dim; ++i) w[i] -= c * q[i];
        }
      }
      const double bnorm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
      if (bnorm < 1e-13 || k + 1 == max_basis) break;
      beta.push_back(bnorm);
      for (auto& v : w) v /= bnorm;
      basis.push_back(w);
    }
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      T(k, k) = alpha[static_cast<std::size_t>(k)];
      if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
    energy = tri.eigenvalues()(0);
    std::vector<double> ritz(dim, 0.0);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double c = tri.eigenvectors()(k, 0);
      const auto& q = basis[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < dim; ++i) ritz[i] += c * q[i];
    }
    nrm = std::sqrt(std::inner_product(ritz.begin(), ritz.end(), ritz.begin(), 0.0));
    for (auto& v : ritz) v /= nrm;
    real_matvec(diag, n_links, a, b, ritz.data(), w.data());
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) res += (w[i] - energy * ritz[i]) * (w[i] - energy * ritz[i]);
    start = std::move(ritz);
    if (std::sqrt(res) < kResidualTol) break;
  }
  GroundSpace gs;
  gs.energy = energy;
  gs.degeneracy = 1;
  gs.vectors.push_back(std::move(start));
  return gs;
}

/// exp(i phi sum_l X_l) applied in place; the X_l commute so the product is exact.
void rotate_transverse(std::vector<Amplitude>& amps, std::size_t n_links, double phi) {
  const double c = std::cos(phi);
  const Amplitude is(0.0, std::sin(phi));
  for (std::size_t l = 0; l < n_links; ++l) {
    const std::size_t bit = std::size_t{1} << l;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (i & bit) continue;
      const Amplitude a0 = amps[i], a1 = amps[i | bit];
      amps[i] = c * a0 + is * a1;
      amps[i | bit] = is * a0 + c * a1;
    }
  }
}

void phase_diagonal(std::vector<Amplitude>& amps, const std::vector<double>& diag, double angle) {
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] *= std::polar(1.0, -angle * diag[i]);
  }
}

double schedule_energy(const QuantumState& psi, const std::vector<double>& diag, double a,
                       double b) {
  const auto& amps = psi.amplitudes();
  double e = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) e += a * diag[i] * std::norm(amps[i]);
  double flips = 0.0;
  for (std::size_t l = 0; l < psi.n_links(); ++l) {
    const std::size_t bit = std::size_t{1} << l;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      flips += (std::conj(amps[i]) * amps[i ^ bit]).real();
    }
  }
  return e - b * flips;
}

}  // namespace

QuantumState::QuantumState(std::size_t n_links, std::vector<Amplitude> amplitudes)
    : n_links_(n_links), amps_(std::move(amplitudes)) {
  check_size(n_links);
  if (amps_.size() != (std::size_t{1} << n_links)) {
    throw DimensionError("expected 2^" + std::to_string(n_links) + " amplitudes, got " +
                         std::to_string(amps_.size()));
  }
}

QuantumState QuantumState::plus(std::size_t n_links) {
  check_size(n_links);
  const std::size_t dim = std::size_t{1} << n_links;
  return QuantumState(n_links, std::vector<Amplitude>(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
}

QuantumState QuantumState::product(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  check_size(n);
  std::vector<Amplitude> amps(std::size_t{1} << n, 1.0);
  for (std::size_t l = 0; l < n; ++l) {
    const double c = std::cos(thetas[l] / 2.0), s = std::sin(thetas[l] / 2.0);
    const double up = (c + s) / std::sqrt(2.0);  // <0|theta>
    const double dn = (c - s) / std::sqrt(2.0);  // <1|theta>
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= ((i >> l) & 1) ? dn : up;
  }
  return QuantumState(n, std::move(amps));
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void QuantumState::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ConsistencyError("cannot normalize state of norm " + std::to_string(n));
  for (auto& a : amps_) a /= n;
}

Amplitude QuantumState::inner(const QuantumState& other) const {
  if (other.amps_.size() != amps_.size()) throw DimensionError("state dimensions differ");
  Amplitude s = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
  return s;
}

std::vector<double> plaquette_diagonal(const GGraph& g) {
  check_size(g.n_links());
  std::vector<std::uint64_t> masks;
  for (const auto& p : g.plaquettes()) masks.push_back(mask_of(p.links));
  std::vector<double> diag(std::size_t{1} << g.n_links(), 0.0);
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double e = 0.0;
    for (std::size_t k = 0; k < masks.size(); ++k) {
      const double j = g.plaquettes()[k].coupling;
      e += (std::popcount(i & masks[k]) & 1) ? -j : j;
    }
    diag[i] = e;
  }
  return diag;
}

QuantumState apply_hamiltonian(const GGraph& g, double coupling, const QuantumState& psi) {
  check_graph(g, psi);
  const auto diag = plaquette_diagonal(g);
  const auto& in = psi.amplitudes();
  std::vector<Amplitude> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    Amplitude flips = 0.0;
    for (std::size_t l = 0; l < g.n_links(); ++l) flips += in[i ^ (std::size_t{1} << l)];
    out[i] = diag[i] * in[i] - coupling * flips;
  }
  return QuantumState(psi.n_links(), std::move(out));
}

double expectation(const QuantumState& psi, const GGraph& g, double coupling) {
  check_graph(g, psi);
  return schedule_energy(psi, plaquette_diagonal(g), 1.0, coupling);
}

QuantumState apply_gauge(const GGraph& g, std::size_t site, const QuantumState& psi) {
  check_graph(g, psi);
  if (site >= g.sites().size()) throw DimensionError("site index out of range");
  const auto mask = mask_of(g.sites()[site].links);
  const auto& in = psi.amplitudes();
  std::vector<Amplitude> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i ^ mask];
  return QuantumState(psi.n_links(), std::move(out));
}

double gauge_expectation(const GGraph& g, std::size_t site, const QuantumState& psi) {
  return psi.inner(apply_gauge(g, site, psi)).real();
}

GaugeMeasurement gauge_measure(const GGraph& g, std::size_t site, const QuantumState& psi,
                               std::mt19937_64& rng) {
  check_graph(g, psi);
  if (site >= g.sites().size()) throw DimensionError("site index out of range");
  const auto mask = mask_of(g.sites()[site].links);
  const auto& in = psi.amplitudes();
  std::vector<Amplitude> plus(in.size()), minus(in.size());
  double p_plus = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    plus[i] = 0.5 * (in[i] + in[i ^ mask]);
    minus[i] = 0.5 * (in[i] - in[i ^ mask]);
    p_plus += std::norm(plus[i]);
  }
  if (p_plus < -kNormTolerance || p_plus > 1.0 + kNormTolerance || !std::isfinite(p_plus)) {
    throw ConsistencyError("gauge measurement probability " + std::to_string(p_plus) +
                           " outside [0, 1]");
  }
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GaugeMeasurement m;
  m.p_plus = p_plus;
  m.outcome = unit(rng) < p_plus ? 1 : -1;
  m.state = QuantumState(psi.n_links(), m.outcome == 1 ? std::move(plus) : std::move(minus));
  m.state.normalize();
  return m;
}

double GroundSpace::fidelity(const QuantumState& psi) const {
  const auto& amps = psi.amplitudes();
  double f = 0.0;
  for (auto idx : basis_states) f += std::norm(amps[idx]);
  for (const auto& v : vectors) {
    Amplitude o = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) o += v[i] * amps[i];
    f += std::norm(o);
  }
  return std::clamp(f, 0.0, 1.0);
}

GroundSpace ground_space(const GGraph& g, double diagonal_scale, double transverse,
                         EigenMethod method) {
  check_size(g.n_links());
  const auto diag = plaquette_diagonal(g);
  if (transverse == 0.0) return diagonal_ground(diag, diagonal_scale);
  if (method == EigenMethod::kDense ||
      (method == EigenMethod::kAuto && g.n_links() <= kDenseLimit)) {
    return dense_ground(diag, g.n_links(), diagonal_scale, transverse);
  }
  return lanczos_ground(diag, g.n_links(), diagonal_scale, transverse);
}

GroundSpace exact_ground(const GGraph& g, double coupling, EigenMethod method) {
  return ground_space(g, 1.0, coupling, method);
}

AdiabaticSweeper::AdiabaticSweeper(const GGraph& g, double gamma, std::size_t n_steps, double dt)
    : g_(g), gamma_(gamma), n_steps_(n_steps), dt_(dt) {
  check_size(g.n_links());
  if (n_steps == 0) throw DomainError("adiabatic sweep needs n_steps >= 1");
  if (!(dt > 0.0)) throw DomainError("adiabatic sweep needs dt > 0");
  diag_ = plaquette_diagonal(g);
  grounds_.reserve(n_steps);
  for (std::size_t j = 1; j <= n_steps; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n_steps);
    grounds_.push_back(ground_space(g, t * gamma, 1.0 - t));
  }
}

SweepReport AdiabaticSweeper::run(std::size_t measure_every, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  QuantumState psi = QuantumState::plus(g_.n_links());
  SweepReport report;
  report.records.reserve(n_steps_);
  const double n = static_cast<double>(n_steps_);
  for (std::size_t j = 1; j <= n_steps_; ++j) {
    const double mid = (static_cast<double>(j) - 0.5) / n;
    auto& amps = psi.amplitudes();
    phase_diagonal(amps, diag_, 0.5 * dt_ * mid * gamma_);
    rotate_transverse(amps, g_.n_links(), (1.0 - mid) * dt_);
    phase_diagonal(amps, diag_, 0.5 * dt_ * mid * gamma_);

    SweepRecord rec;
    rec.t = static_cast<double>(j) / n;
    if (measure_every != 0 && j % measure_every == 0) {
      for (std::size_t v = 0; v < g_.sites().size(); ++v) {
        auto m = gauge_measure(g_, v, psi, rng);
        if (m.outcome < 0) ++rec.minus_outcomes;
        psi = std::move(m.state);
      }
    }
    const double nrm = psi.norm();
    if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > kNormTolerance) {
      throw ConsistencyError("state norm drifted to " + std::to_string(nrm) + " at step " +
                             std::to_string(j));
    }
    rec.energy = schedule_energy(psi, diag_, rec.t * gamma_, 1.0 - rec.t);
    rec.fidelity = grounds_[j - 1].fidelity(psi);
    for (std::size_t v = 0; v < g_.sites().size(); ++v) {
      rec.min_gauge = std::min(rec.min_gauge, gauge_expectation(g_, v, psi));
    }
    report.minus_outcomes += rec.minus_outcomes;
    report.records.push_back(rec);
  }
  report.final_state = std::move(psi);
  return report;
}

SweepReport adiabatic_sweep(const GGraph& g, const SweepOptions& options) {
  AdiabaticSweeper sweeper(g, options.gamma, options.n_steps, options.dt);
  return sweeper.run(options.measure_every, options.seed);
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "step,t,energy,fidelity,min_gauge,minus_outcomes\n";
  for (std::size_t k = 0; k < report.records.size(); ++k) {
    const auto& r = report.records[k];
    out << (k + 1) << ',' << format_double(r.t) << ',' << format_double(r.energy) << ','
        << format_double(r.fidelity) << ',' << format_double(r.min_gauge) << ','
        << r.minus_outcomes << '\n';
  }
  return out.str();
}

}  // namespace z2hubo
