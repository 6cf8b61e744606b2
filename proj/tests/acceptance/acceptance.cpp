// Acceptance checks. Each criterion prints one PASS/FAIL line; detail lines
// are indented underneath. Exit status is nonzero if any selected check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "z2hubo/annealers.hpp"
#include "z2hubo/bench.hpp"
#include "z2hubo/graph_map.hpp"
#include "z2hubo/hubo.hpp"
#include "z2hubo/quantum_sim.hpp"
#include "z2hubo/rng.hpp"

using namespace z2hubo;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void detail(const std::string& line) { std::printf("    %s\n", line.c_str()); }

std::string opt(const std::optional<double>& v) {
  return v ? fmt("%.4g", *v) : std::string("unattainable");
}

// Hyperparameters from grid searches on the L=10 torus and on the 200-vertex
// four-regular dual. gLQA shares the LQA base and adds the gauge step. B is
// tuned per protocol because the gauge push accumulates as n_iter * B.
AnnealerParams torus_params(double B) {
  AnnealerParams p;
  p.gamma = 300.0;
  p.eta = 0.001;
  p.mu = 0.5;
  p.init_scale = 0.5;
  p.B = B;
  p.seed = 2024;
  return p;
}

constexpr double kSweepB = 0.01;    // no collapse through n_iter = 2000
constexpr double kScalingB = 0.03;  // best at n_iter = 1000

AnnealerParams four_regular_params() {
  AnnealerParams p;
  p.gamma = 100.0;
  p.eta = 0.001;
  p.mu = 0.5;
  p.init_scale = 0.5;
  p.B = 0.07;
  p.seed = 4242;
  return p;
}

constexpr std::uint64_t kFourRegularSeed = 1;
constexpr std::size_t kFourRegularKm = 6;

ExperimentConfig experiment(Family family, std::size_t size, Solver solver,
                            const AnnealerParams& params, std::vector<std::size_t> grid,
                            std::size_t n_sam) {
  ExperimentConfig c;
  c.instance.family = family;
  c.instance.size = size;
  c.instance.seed = kFourRegularSeed;
  c.instance.k_m = kFourRegularKm;
  c.solver = solver;
  c.params = params;
  c.n_iter_grid = std::move(grid);
  c.n_sam = n_sam;
  return c;
}

void print_points(const char* name, const ExperimentReport& r) {
  for (const auto& pt : r.points) {
    detail(fmt("%-5s n_iter=%-5zu E_min=%-6g E_med=%-6g p=%.3f t_p=%.3gs TTS=%s", name, pt.n_iter,
               pt.e_min, pt.e_med, pt.p, pt.t_p_mean, opt(pt.tts).c_str()));
  }
}

// 1. Worked example maps to the four known gauge operators.
Outcome worked_example() {
  const auto poly = parse_instance("vars 8\n-1 1 3 5 4\n-1 2 4 6 3\n-1 1 8 5 7\n-1 2 7 6 8\n");
  const auto g = build_dual(build_hubo_graph(poly), 4);
  std::set<std::set<Index>> got;
  for (const auto& s : g.sites()) {
    std::set<Index> one;
    for (auto l : s.links) one.insert(l + 1);
    got.insert(one);
  }
  const std::set<std::set<Index>> want{{4, 6, 8, 5}, {1, 8, 2, 4}, {3, 5, 7, 6}, {1, 2, 3, 7}};
  bool plaquettes_ok = g.plaquettes().size() == 4;
  for (const auto& p : g.plaquettes()) plaquettes_ok = plaquettes_ok && p.links.size() == 4;
  const bool ok = got == want && g.sites().size() == 4 && g.n_links() == 8 && plaquettes_ok;
  return {ok, fmt("links=%zu plaquettes=%zu sites=%zu exact=%s", g.n_links(), g.plaquettes().size(),
                  g.sites().size(), got == want ? "yes" : "no")};
}

// Small instance: torus L=2 or a 4-regular dual on 5..8 vertices, half with
// random +-1 couplings so the all-up state is not always optimal.
GGraph small_instance(std::mt19937_64& rng, std::size_t k) {
  GGraph g = k % 4 == 0 ? gen_torus_lattice(2) : gen_four_regular_dual(5 + rng() % 4, rng(), 6);
  if (k % 2 == 1) {
    auto plaquettes = g.plaquettes();
    for (auto& p : plaquettes) p.coupling = (rng() & 1) ? 1.0 : -1.0;
    g = GGraph(g.n_links(), plaquettes, g.sites());
  }
  return g;
}

// 2. No solver goes below the exhaustive minimum; gLQA finds it in >= 90%.
Outcome oracle_equivalence() {
  constexpr std::size_t kInstances = 120;
  constexpr std::size_t kRestarts = 10;
  std::mt19937_64 rng(99);
  std::size_t below = 0, hit = 0;
  for (std::size_t k = 0; k < kInstances; ++k) {
    const auto g = small_instance(rng, k);
    const double floor = brute_force_minimum(g.to_polynomial()).energy;
    AnnealerParams p;
    double best = INFINITY;
    for (std::size_t r = 0; r < kRestarts; ++r) {
      p.seed = derive_seed(k, r);
      const double eg = glqa_run(g, p).energy;
      const double el = lqa_run(g, p).energy;
      const double es = sa_run(g, 200, {}, p.seed).energy;
      for (double e : {eg, el, es}) below += e < floor - 1e-9;
      best = std::min(best, eg);
    }
    hit += best <= floor + 1e-9;
  }
  const double rate = static_cast<double>(hit) / kInstances;
  return {below == 0 && rate >= 0.9,
          fmt("instances=%zu below_floor=%zu glqa_best_of_%zu_hit_rate=%.3f (need 0 and >= 0.9)",
              kInstances, below, kRestarts, rate)};
}

// 3. Analytic gradient against central differences.
Outcome gradient_check() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const GGraph g = rep % 3 == 0 ? gen_torus_lattice(2 + rng() % 3)
                                  : gen_four_regular_dual(5 + rng() % 20, rng(), 6);
    std::vector<double> w(g.n_links());
    for (auto& x : w) x = 3.0 * (2 * unit(rng) - 1);
    const double t = unit(rng);
    const double gamma = 0.1 + 5 * unit(rng);
    const auto grad = lqa_grad(g, w, t, gamma);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double w0 = w[i];
      w[i] = w0 + h;
      const double up = lqa_cost(g, w, t, gamma);
      w[i] = w0 - h;
      const double dn = lqa_cost(g, w, t, gamma);
      w[i] = w0;
      const double fd = (up - dn) / (2 * h);
      diff += (grad[i] - fd) * (grad[i] - fd);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300));
  }
  return {worst <= 1e-6, fmt("triples=1000 max_relative_error=%.3g (tol 1e-6)", worst)};
}

// Penalty sum_v (prod x_l - 1)^2 evaluated at complex w for complex-step
// differentiation.
std::complex<double> penalty_complex(const GGraph& g, const std::vector<std::complex<double>>& w) {
  std::complex<double> total = 0.0;
  for (const auto& s : g.sites()) {
    std::complex<double> prod = 1.0;
    for (auto l : s.links) prod *= std::cos(std::numbers::pi / 2 * std::tanh(w[l]));
    total += (prod - 1.0) * (prod - 1.0);
  }
  return total;
}

// 4. Gauge step is half-gradient descent on the penalty and never raises it.
Outcome gauge_step_check() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-30;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const GGraph g = rep % 2 ? gen_torus_lattice(2 + rng() % 3) : gen_four_regular_dual(8 + rng() % 20, rng(), 6);
    std::vector<double> w(g.n_links());
    for (auto& x : w) x = 2.0 * (2 * unit(rng) - 1);
    const double B = 0.001 + 0.1 * unit(rng);
    const auto stepped = gauge_step(g, w, B);
    std::vector<std::complex<double>> wc(w.begin(), w.end());
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      wc[i] += std::complex<double>(0.0, h);
      const double want = -0.5 * B * penalty_complex(g, wc).imag() / h;
      wc[i] = w[i];
      const double got = stepped[i] - w[i];
      diff += (got - want) * (got - want);
      norm += want * want;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300));
  }
  std::size_t increases = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const GGraph g = rep % 2 ? gen_torus_lattice(2 + rng() % 4) : gen_four_regular_dual(8 + rng() % 30, rng(), 6);
    std::vector<double> w(g.n_links());
    for (auto& x : w) x = 1.5 * (2 * unit(rng) - 1);
    for (double B : {0.001, 0.005, 0.01}) {
      increases += gauge_penalty(g, gauge_step(g, w, B)) > gauge_penalty(g, w);
    }
  }
  return {worst <= 1e-8 && increases == 0,
          fmt("max_relative_error=%.3g (tol 1e-8) penalty_increases=%zu of 300", worst, increases)};
}

const std::vector<std::size_t> kTorusGrid{100, 200, 500, 1000, 1500, 2000};

// 5. Torus L=10 sweep over n_iter.
Outcome torus_sweep() {
  const auto params = torus_params(kSweepB);
  const auto lqa = run_experiment(experiment(Family::kTorus, 10, Solver::kLqa, params, kTorusGrid, 200));
  const auto glqa = run_experiment(experiment(Family::kTorus, 10, Solver::kGlqa, params, kTorusGrid, 200));
  print_points("lqa", lqa);
  print_points("glqa", glqa);

  auto reaches = [](const ExperimentReport& r) {
    return std::any_of(r.points.begin(), r.points.end(), [](const auto& pt) { return pt.e_min == -100.0; });
  };
  const bool a = reaches(lqa) && reaches(glqa);

  const auto* bl = lqa.best_tts();
  const auto* bg = glqa.best_tts();
  const double ratio = ratio_tts(bg ? bg->tts : std::nullopt, bl ? bl->tts : std::nullopt);
  const bool b = ratio <= 0.5;

  auto saturated = [](const ExperimentReport& r) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& pt : r.points) {
      if (pt.n_iter >= 1000) sum += pt.p, ++n;
    }
    return sum / n;
  };
  const double pl = saturated(lqa), pg = saturated(glqa);
  const bool c = pg >= 2.0 * pl && pg > 0.0;
  return {a && b && c,
          fmt("(a) E_min=-100 reached lqa=%s glqa=%s; (b) best TTS glqa/lqa=%.3f at n_iter %zu/%zu "
              "(need <= 0.5); (c) saturated p glqa=%.3f lqa=%.3f ratio=%.2f (need >= 2)",
              reaches(lqa) ? "yes" : "no", reaches(glqa) ? "yes" : "no", ratio,
              bg ? bg->n_iter : 0, bl ? bl->n_iter : 0, pg, pl, pl > 0 ? pg / pl : INFINITY)};
}

// 6. Scaling over torus sizes at n_iter=1000.
Outcome torus_scaling() {
  auto templ = experiment(Family::kTorus, 10, Solver::kGlqa, torus_params(kScalingB), {1000}, 200);
  const auto s = scaling_sweep(Family::kTorus, {10, 20, 30, 40}, templ);
  bool ok = true;
  for (const auto& row : s.ratios) {
    const bool good = row.r_p >= 2.0 && row.r_tts <= 0.4;
    ok = ok && good;
    detail(fmt("L=%-3zu p_lqa=%.3f p_glqa=%.3f r_p=%.3g r_TTS=%.3g %s", row.size, row.p_lqa, row.p_glqa,
               row.r_p, row.r_tts, good ? "ok" : "short"));
  }
  return {ok, "r_p >= 2 and r_TTS <= 0.4 at L = 10, 20, 30, 40 (n_iter=1000, n_sam=200)"};
}

// 7. Four-regular dual with 400 links.
Outcome four_regular_sweep() {
  const std::vector<std::size_t> grid{100, 200, 300, 500, 800, 1000};
  const auto params = four_regular_params();
  const auto lqa = run_experiment(experiment(Family::kFourRegularDual, 200, Solver::kLqa, params, grid, 500));
  const auto glqa = run_experiment(experiment(Family::kFourRegularDual, 200, Solver::kGlqa, params, grid, 500));
  detail(fmt("instance: 200 vertices, seed %llu, k_m %zu, %zu links",
             static_cast<unsigned long long>(kFourRegularSeed), kFourRegularKm, glqa.n_links));
  print_points("lqa", lqa);
  print_points("glqa", glqa);
  double pg_min = 1.0;
  for (const auto& pt : glqa.points) {
    if (pt.n_iter >= 500) pg_min = std::min(pg_min, pt.p);
  }
  double pl_800 = NAN;
  for (const auto& pt : lqa.points) {
    if (pt.n_iter == 800) pl_800 = pt.p;
  }
  const auto* bl = lqa.best_tts();
  const auto* bg = glqa.best_tts();
  const double ratio = ratio_tts(bg ? bg->tts : std::nullopt, bl ? bl->tts : std::nullopt);
  const bool ok = glqa.n_links == 400 && pg_min >= 0.15 && pl_800 <= 0.10 && ratio <= 0.4;
  return {ok, fmt("min p_glqa(n_iter>=500)=%.3f (need >= 0.15); p_lqa(800)=%.3f (need <= 0.10); "
                  "best TTS ratio=%.3f (need <= 0.4)",
                  pg_min, pl_800, ratio)};
}

// 8. SA with a per-sample time budget equal to gLQA's t_p at its best-TTS
// grid point in the L=10 sweep.
Outcome sa_control() {
  const auto g = gen_torus_lattice(10);
  const auto glqa = run_experiment(experiment(Family::kTorus, 10, Solver::kGlqa, torus_params(kSweepB), kTorusGrid, 200));
  const auto* best = glqa.best_tts();
  if (!best) return {false, "gLQA never solved L=10, no budget to match"};
  const double budget = best->t_p_mean;

  const std::size_t probe = 2000;
  double sa_time = 0.0;
  for (int k = 0; k < 5; ++k) sa_time += sa_run(g, probe, {}, derive_seed(8, k)).wall_time;
  sa_time /= 5;
  const auto sweeps = std::max<std::size_t>(1, std::llround(probe * budget / sa_time));

  std::vector<std::size_t> grid{10, 30, 100, sweeps};
  ExperimentConfig c = experiment(Family::kTorus, 10, Solver::kSa, torus_params(kSweepB), grid, 200);
  c.params.seed = 808;
  const auto r = run_experiment(c);
  print_points("sa", r);
  const auto& pt = r.points.back();
  return {pt.e_min > -100.0,
          fmt("gLQA best-TTS point n_iter=%zu t_p=%.3gs -> %zu SA sweeps (t_p=%.3gs); E_min=%g p=%.3f (need E_min > -100)",
              best->n_iter, budget, sweeps, pt.t_p_mean, pt.e_min, pt.p)};
}

// 9. Zeno protection on the L=2 torus and gauge commutation.
Outcome zeno_check() {
  const auto g = gen_torus_lattice(2);
  const double gamma = 1.0, dt = 0.25;
  std::size_t chosen = 0;
  double unmeasured = 0.0;
  for (std::size_t n = 2; n <= 400; ++n) {
    AdiabaticSweeper s(g, gamma, n, dt);
    const double f = s.run(0, 0).records.back().fidelity;
    if (f >= 0.3 && f <= 0.9) {
      chosen = n;
      unmeasured = f;
      break;
    }
  }
  if (chosen == 0) return {false, "no n_steps with unmeasured fidelity in [0.3, 0.9]"};
  AdiabaticSweeper s(g, gamma, chosen, dt);
  double mean = 0.0;
  std::size_t minus = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = s.run(1, seed);
    mean += r.records.back().fidelity;
    minus += r.minus_outcomes;
  }
  mean /= 100;
  detail(fmt("n_steps=%zu dt=%g unmeasured=%.6f measured_mean=%.6f minus_outcomes=%zu", chosen, dt,
             unmeasured, mean, minus));

  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Amplitude> a(std::size_t{1} << g.n_links());
    for (auto& x : a) x = {normal(rng), normal(rng)};
    QuantumState psi(g.n_links(), a);
    psi.normalize();
    const double coupling = 2.0 * normal(rng);
    for (std::size_t v = 0; v < g.sites().size(); ++v) {
      const auto hg = apply_hamiltonian(g, coupling, apply_gauge(g, v, psi));
      const auto gh = apply_gauge(g, v, apply_hamiltonian(g, coupling, psi));
      double d = 0.0;
      for (std::size_t i = 0; i < hg.dimension(); ++i) d += std::norm(hg.amplitudes()[i] - gh.amplitudes()[i]);
      worst = std::max(worst, std::sqrt(d));
    }
  }
  // Measurement from the symmetric sector may tie with the unmeasured run;
  // 1e-9 absorbs renormalisation round-off only.
  const bool ok = mean >= unmeasured - 1e-9 && worst <= 1e-10;
  return {ok, fmt("measured %.6f >= unmeasured %.6f; max ||[H,G]psi||=%.3g (tol 1e-10)", mean,
                  unmeasured, worst)};
}

// 10. Time-to-solution formula.
Outcome tts_check() {
  bool ok = std::abs(*tts(1.0, 0.5) - 6.6439) <= 1e-3;
  for (double t : {0.1, 1.0, 7.5}) ok = ok && *tts(t, 0.99) == t;
  double last = INFINITY;
  std::size_t violations = 0;
  for (int k = 1; k <= 100; ++k) {
    const double p = k / 100.0;
    const double v = *tts(1.0, p);
    violations += p < 0.99 ? !(v < last) : !(v <= last);
    last = v;
  }
  ok = ok && violations == 0 && !tts(1.0, 0.0);
  return {ok, fmt("tts(1,0.5)=%.5f; tts(t,0.99)=t; monotonicity violations=%zu", *tts(1.0, 0.5),
                  violations)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"worked example mapping", worked_example},
      {"oracle equivalence", oracle_equivalence},
      {"gradient correctness", gradient_check},
      {"gauge step correctness", gauge_step_check},
      {"torus L=10 sweep", torus_sweep},
      {"torus scaling", torus_scaling},
      {"four-regular dual sweep", four_regular_sweep},
      {"SA negative control", sa_control},
      {"Zeno validation", zeno_check},
      {"TTS formula", tts_check},
  };
  bool all = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s: %s  %s [%.1fs]\n", i + 1, checks[i].first, o.pass ? "PASS" : "FAIL",
                o.summary.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
