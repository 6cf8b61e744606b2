#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace z2hubo {

using Index = std::uint32_t;

/// One monomial J * s_{i1} * ... * s_{ik}.
///
/// `vars` is the canonical (sorted) variable set. `order` holds the same
/// variables in the order they were written; the HUBO-graph uses it as the
/// cyclic order of edges around the term's vertex.
struct Term {
  double coefficient = 0.0;
  std::vector<Index> vars;
  std::vector<Index> order;
};

/// Assignment of +1/-1 to every variable.
class SpinConfig {
 public:
  SpinConfig() = default;
  /// All spins +1.
  explicit SpinConfig(std::size_t n) : spins_(n, 1) {}
  /// Throws DomainError if any entry is not exactly -1 or +1.
  explicit SpinConfig(std::vector<int> spins);

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](std::size_t i) const { return spins_[i]; }
  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  void set(std::size_t i, bool up) { spins_[i] = up ? 1 : -1; }
  std::span<const std::int8_t> values() const noexcept { return spins_; }
  std::vector<int> to_vector() const { return {spins_.begin(), spins_.end()}; }

  bool operator==(const SpinConfig&) const = default;

 private:
  std::vector<std::int8_t> spins_;
};

/// Sparse multilinear polynomial over n_vars Ising spins, kept in canonical form:
/// terms sorted by variable set, duplicate sets merged, zero coefficients dropped.
class HuboPolynomial {
 public:
  HuboPolynomial() = default;
  /// Throws DomainError on an out-of-range, repeated or missing variable index.
  HuboPolynomial(std::size_t n_vars, std::vector<Term> terms);

  std::size_t n_vars() const noexcept { return n_vars_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// Equality of the canonical form; the written order of variables is ignored.
  friend bool operator==(const HuboPolynomial& a, const HuboPolynomial& b);

 private:
  std::size_t n_vars_ = 0;
  std::vector<Term> terms_;
};

/// Sum over terms of coefficient times the product of the term's spins.
double evaluate(const HuboPolynomial& poly, const SpinConfig& s);

/// Energy change of flipping spin i: -2 * (sum of terms containing i at s).
double flip_delta(const HuboPolynomial& poly, const SpinConfig& s, std::size_t i);

/// Reads the instance text format (`vars <n>` header, one
/// `<coefficient> <i1> ... <ik>` line per term, 1-based indices, `#` comments).
HuboPolynomial parse_instance(std::string_view text);
HuboPolynomial read_instance(const std::string& path);

/// Inverse of parse_instance. Coefficients are written in shortest
/// round-trip form and variables in their written order.
std::string serialize_instance(const HuboPolynomial& poly);
void write_instance(const HuboPolynomial& poly, const std::string& path);

inline constexpr std::size_t kBruteForceMaxVars = 24;

struct GroundState {
  double energy;
  SpinConfig spins;
};

/// Exhaustive minimum over all 2^n configurations. Ties go to the lowest
/// encoding, where bit i set means s_i = -1. Throws SizeError above
/// kBruteForceMaxVars.
GroundState brute_force_minimum(const HuboPolynomial& poly);

}  // namespace z2hubo
