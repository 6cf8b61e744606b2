#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "z2hubo/graph_map.hpp"

namespace z2hubo {

/// Dense simulation is limited to this many links (2^16 amplitudes).
inline constexpr std::size_t kMaxSimLinks = 16;

using Amplitude = std::complex<double>;

/// State vector over 2^n_links basis states. Bit l of a basis index is link l,
/// with bit value 0 meaning sigma_z = +1.
class QuantumState {
 public:
  QuantumState() = default;
  /// Throws SizeError above kMaxSimLinks.
  QuantumState(std::size_t n_links, std::vector<Amplitude> amplitudes);

  /// |+>^n, the ground state of -sum sigma_x.
  static QuantumState plus(std::size_t n_links);
  /// Product of cos(theta/2)|+> + sin(theta/2)|->, one angle per link.
  static QuantumState product(std::span<const double> thetas);

  std::size_t n_links() const noexcept { return n_links_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }
  std::vector<Amplitude>& amplitudes() noexcept { return amps_; }

  double norm() const;
  void normalize();
  Amplitude inner(const QuantumState& other) const;  // <this|other>

 private:
  std::size_t n_links_ = 0;
  std::vector<Amplitude> amps_;
};

/// Diagonal of Z = sum_p J_p prod_{l in p} sigma_z^l, indexed by basis state.
std::vector<double> plaquette_diagonal(const GGraph& g);

/// H|psi> with H = Z - coupling * sum_l sigma_x^l.
QuantumState apply_hamiltonian(const GGraph& g, double coupling, const QuantumState& psi);
double expectation(const QuantumState& psi, const GGraph& g, double coupling);

/// G_v|psi>, G_v the product of sigma_x over the site's links.
QuantumState apply_gauge(const GGraph& g, std::size_t site, const QuantumState& psi);
double gauge_expectation(const GGraph& g, std::size_t site, const QuantumState& psi);

struct GaugeMeasurement {
  int outcome = 1;
  double p_plus = 1.0;
  QuantumState state;
};

/// Projective measurement of G_v: outcome +1 with probability ||(1+G_v)/2 psi||^2,
/// state projected onto that eigenspace and renormalized.
GaugeMeasurement gauge_measure(const GGraph& g, std::size_t site, const QuantumState& psi,
                               std::mt19937_64& rng);

/// Lowest eigenspace of a*Z - b*sum sigma_x.
///
/// With b = 0 the space is spanned by basis states and stored as indices.
/// Otherwise it is stored as orthonormal real vectors.
struct GroundSpace {
  double energy = 0.0;
  std::size_t degeneracy = 0;
  std::vector<std::uint64_t> basis_states;
  std::vector<std::vector<double>> vectors;

  /// Weight of psi in the space, ||P psi||^2.
  double fidelity(const QuantumState& psi) const;
};

enum class EigenMethod { kAuto, kDense, kLanczos };

/// Dense eigensolver up to 10 links in kAuto, Lanczos above.
GroundSpace ground_space(const GGraph& g, double diagonal_scale, double transverse,
                         EigenMethod method = EigenMethod::kAuto);

/// Ground energy, degeneracy and basis of Z - coupling * sum sigma_x.
GroundSpace exact_ground(const GGraph& g, double coupling, EigenMethod method = EigenMethod::kAuto);

struct SweepRecord {
  double t = 0.0;
  double energy = 0.0;
  double fidelity = 0.0;
  double min_gauge = 1.0;
  std::size_t minus_outcomes = 0;  // -1 gauge outcomes seen in this step
};

struct SweepReport {
  std::vector<SweepRecord> records;
  std::size_t minus_outcomes = 0;
  QuantumState final_state;
};

struct SweepOptions {
  double gamma = 1.0;
  std::size_t n_steps = 100;
  double dt = 0.1;
  /// Measure every site after each `measure_every` steps; 0 disables measurement.
  std::size_t measure_every = 0;
  std::uint64_t seed = 0;
};

/// Adiabatic evolution under H(t) = t*gamma*Z - (1-t)*sum sigma_x from |+>^n.
///
/// Step j (1-based) applies the symmetric split exp(-iA dt/2) exp(-iB dt)
/// exp(-iA dt/2) with A, B evaluated at the interval midpoint (j - 1/2)/n, and
/// records t = j/n with the fidelity to the ground space of H(j/n). A -1
/// gauge outcome keeps the projected state and is counted in the report.
///
/// Ground spaces depend only on the schedule, so repeated runs with other
/// seeds reuse them.
class AdiabaticSweeper {
 public:
  AdiabaticSweeper(const GGraph& g, double gamma, std::size_t n_steps, double dt);

  SweepReport run(std::size_t measure_every, std::uint64_t seed);

 private:
  const GGraph& g_;
  double gamma_;
  std::size_t n_steps_;
  double dt_;
  std::vector<double> diag_;
  std::vector<GroundSpace> grounds_;
};

SweepReport adiabatic_sweep(const GGraph& g, const SweepOptions& options);

/// CSV with header `step,t,energy,fidelity,min_gauge,minus_outcomes`.
std::string sweep_csv(const SweepReport& report);

}  // namespace z2hubo
