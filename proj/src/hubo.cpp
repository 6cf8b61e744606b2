#include "z2hubo/hubo.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>
#include <map>
#include <sstream>

#include "z2hubo/error.hpp"
#include "z2hubo/io.hpp"

namespace z2hubo {

SpinConfig::SpinConfig(std::vector<int> spins) {
  spins_.reserve(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] != 1 && spins[i] != -1) {
      throw DomainError("spin " + std::to_string(i) + " is " + std::to_string(spins[i]) +
                        ", expected -1 or +1");
    }
    spins_.push_back(static_cast<std::int8_t>(spins[i]));
  }
}

HuboPolynomial::HuboPolynomial(std::size_t n_vars, std::vector<Term> terms) : n_vars_(n_vars) {
  std::map<std::vector<Index>, std::size_t> slot;
  for (auto& term : terms) {
    if (term.order.empty()) term.order = term.vars;
    if (term.order.empty()) throw DomainError("term with an empty variable set");
    for (Index v : term.order) {
      if (v >= n_vars) {
        throw DomainError("variable index " + std::to_string(v) + " out of range for " +
                          std::to_string(n_vars) + " variables");
      }
    }
    std::vector<Index> sorted = term.order;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("variable repeated within a term");
    }
    auto [it, inserted] = slot.try_emplace(sorted, terms_.size());
    if (inserted) {
      terms_.push_back(Term{term.coefficient, std::move(sorted), std::move(term.order)});
    } else {
      terms_[it->second].coefficient += term.coefficient;
    }
  }
  std::erase_if(terms_, [](const Term& t) { return t.coefficient == 0.0; });
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.vars < b.vars; });
}

bool operator==(const HuboPolynomial& a, const HuboPolynomial& b) {
  if (a.n_vars_ != b.n_vars_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k) {
    if (a.terms_[k].coefficient != b.terms_[k].coefficient) return false;
    if (a.terms_[k].vars != b.terms_[k].vars) return false;
  }
  return true;
}

double evaluate(const HuboPolynomial& poly, const SpinConfig& s) {
  if (s.size() != poly.n_vars()) {
    throw DimensionError("spin configuration has " + std::to_string(s.size()) +
                         " entries, polynomial has " + std::to_string(poly.n_vars()) +
                         " variables");
  }
  double energy = 0.0;
  for (const auto& term : poly.terms()) {
    int sign = 1;
    for (Index v : term.vars) sign *= s[v];
    energy += term.coefficient * sign;
  }
  return energy;
}

double flip_delta(const HuboPolynomial& poly, const SpinConfig& s, std::size_t i) {
  if (s.size() != poly.n_vars()) throw DimensionError("spin configuration length mismatch");
  double local = 0.0;
  for (const auto& term : poly.terms()) {
    if (!std::binary_search(term.vars.begin(), term.vars.end(), static_cast<Index>(i))) continue;
    int sign = 1;
    for (Index v : term.vars) sign *= s[v];
    local += term.coefficient * sign;
  }
  return -2.0 * local;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

HuboPolynomial parse_instance(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t n_vars = 0;
  bool have_header = false;
  std::vector<Term> terms;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "vars" || !parse_number(toks[1], n_vars)) {
        throw ParseError(line_no, "expected header 'vars <n>'");
      }
      have_header = true;
      continue;
    }
    if (toks[0] == "vars") throw ParseError(line_no, "duplicate 'vars' header");

    Term term;
    if (!parse_number(toks[0], term.coefficient)) {
      throw ParseError(line_no, "bad coefficient '" + std::string(toks[0]) + "'");
    }
    if (toks.size() < 2) throw ParseError(line_no, "term has no variables");
    for (std::size_t k = 1; k < toks.size(); ++k) {
      std::size_t idx = 0;
      if (!parse_number(toks[k], idx) || idx == 0) {
        throw ParseError(line_no, "bad variable index '" + std::string(toks[k]) + "'");
      }
      if (idx > n_vars) {
        throw ParseError(line_no, "variable index " + std::to_string(idx) + " exceeds vars " +
                                      std::to_string(n_vars));
      }
      Index v = static_cast<Index>(idx - 1);
      if (std::find(term.order.begin(), term.order.end(), v) != term.order.end()) {
        throw ParseError(line_no, "variable " + std::to_string(idx) + " repeated in term");
      }
      term.order.push_back(v);
    }
    terms.push_back(std::move(term));
  }
  if (!have_header) throw ParseError(line_no, "missing 'vars <n>' header");
  return HuboPolynomial(n_vars, std::move(terms));
}

HuboPolynomial read_instance(const std::string& path) { return parse_instance(read_text_file(path)); }

std::string serialize_instance(const HuboPolynomial& poly) {
  std::ostringstream out;
  out << "vars " << poly.n_vars() << '\n';
  for (const auto& term : poly.terms()) {
    out << format_double(term.coefficient);
    for (Index v : term.order) out << ' ' << (v + 1);
    out << '\n';
  }
  return out.str();
}

void write_instance(const HuboPolynomial& poly, const std::string& path) {
  write_text_file(path, serialize_instance(poly));
}

GroundState brute_force_minimum(const HuboPolynomial& poly) {
  const std::size_t n = poly.n_vars();
  if (n > kBruteForceMaxVars) {
    throw SizeError("brute force limited to " + std::to_string(kBruteForceMaxVars) +
                    " variables, got " + std::to_string(n));
  }
  std::vector<std::uint32_t> masks;
  std::vector<double> coeffs;
  for (const auto& term : poly.terms()) {
    std::uint32_t m = 0;
    for (Index v : term.vars) m |= 1u << v;
    masks.push_back(m);
    coeffs.push_back(term.coefficient);
  }
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_code = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < count; ++code) {
    const auto c = static_cast<std::uint32_t>(code);
    double e = 0.0;
    for (std::size_t k = 0; k < masks.size(); ++k) {
      e += (std::popcount(c & masks[k]) & 1) ? -coeffs[k] : coeffs[k];
    }
    if (e < best) {
      best = e;
      best_code = c;
    }
  }
  if (masks.empty()) best = 0.0;
  SpinConfig s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, ((best_code >> i) & 1u) == 0);
  return {best, s};
}

}  // namespace z2hubo
