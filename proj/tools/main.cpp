// z2hubo command-line tool: generate, map, solve, bench, sim.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "z2hubo/annealers.hpp"
#include "z2hubo/bench.hpp"
#include "z2hubo/error.hpp"
#include "z2hubo/graph_map.hpp"
#include "z2hubo/hubo.hpp"
#include "z2hubo/io.hpp"
#include "z2hubo/quantum_sim.hpp"

namespace {

using namespace z2hubo;

constexpr int kExitSolved = 0;
constexpr int kExitError = 1;
constexpr int kExitUnsolved = 2;

CycleSearch parse_search(const std::string& s) {
  if (s == "auto") return CycleSearch::kAuto;
  if (s == "faces") return CycleSearch::kFaces;
  if (s == "shortest") return CycleSearch::kShortest;
  throw DomainError("unknown cycle search '" + s + "'");
}

BetaSchedule parse_schedule(const std::string& s) {
  if (s == "geometric") return BetaSchedule::kGeometric;
  if (s == "linear") return BetaSchedule::kLinear;
  throw DomainError("unknown beta schedule '" + s + "'");
}

void print_counts(const GGraph& g) {
  std::printf("links %zu plaquettes %zu sites %zu\n", g.n_links(), g.plaquettes().size(),
              g.sites().size());
}

// ---- generate ------------------------------------------------------------

struct GenerateArgs {
  std::string family;
  std::size_t size = 0;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t km = kDefaultMaxCycle;
  std::string format = "ggraph";
};

int cmd_generate(const GenerateArgs& a) {
  InstanceSpec spec;
  spec.family = parse_family(a.family);
  if (spec.family == Family::kFile) throw DomainError("generate needs torus or 4rd");
  spec.size = a.size;
  spec.seed = a.seed;
  spec.k_m = a.km;
  std::printf("# generate family=%s size=%zu seed=%llu km=%zu format=%s\n",
              to_string(spec.family).c_str(), spec.size, static_cast<unsigned long long>(spec.seed),
              spec.k_m, a.format.c_str());
  const GGraph g = make_instance(spec);
  if (a.format == "hubo") {
    write_instance(g.to_polynomial(), a.out);
  } else {
    write_ggraph(g, a.out);
  }
  print_counts(g);
  return kExitSolved;
}

// ---- map -----------------------------------------------------------------

struct MapArgs {
  std::string hubo;
  std::string out;
  std::size_t km = kDefaultMaxCycle;
  std::string search = "auto";
};

int cmd_map(const MapArgs& a) {
  std::printf("# map km=%zu search=%s\n", a.km, a.search.c_str());
  const HuboPolynomial poly = read_instance(a.hubo);
  const HuboGraph hg = build_hubo_graph(poly);
  const GGraph g = build_dual(hg, a.km, parse_search(a.search));
  write_ggraph(g, a.out);
  print_counts(g);
  std::printf("gauge operators %zu\n", g.sites().size());
  if (g.sites().empty()) std::fprintf(stderr, "warning: no gauge operators found\n");
  return kExitSolved;
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string ggraph;
  std::string solver = "glqa";
  AnnealerParams params;
  std::size_t sweeps = 1000;
  SaSchedule schedule;
  std::string schedule_kind = "geometric";
  std::string json_out;
};

int cmd_solve(SolveArgs a) {
  const GGraph g = read_ggraph(a.ggraph);
  const Solver solver = parse_solver(a.solver);
  a.schedule.kind = parse_schedule(a.schedule_kind);
  SampleResult r;
  if (solver == Solver::kSa) {
    std::printf("# solve solver=sa sweeps=%zu beta_min=%s beta_max=%s schedule=%s seed=%llu\n",
                a.sweeps, format_double(a.schedule.beta_min).c_str(),
                format_double(a.schedule.beta_max).c_str(), a.schedule_kind.c_str(),
                static_cast<unsigned long long>(a.params.seed));
    r = sa_run(g, a.sweeps, a.schedule, a.params.seed);
  } else {
    const auto& p = a.params;
    std::printf("# solve solver=%s n_iter=%zu gamma=%s eta=%s mu=%s B=%s init_scale=%s seed=%llu\n",
                a.solver.c_str(), p.n_iter, format_double(p.gamma).c_str(),
                format_double(p.eta).c_str(), format_double(p.mu).c_str(),
                format_double(p.B).c_str(), format_double(p.init_scale).c_str(),
                static_cast<unsigned long long>(p.seed));
    r = solver == Solver::kGlqa ? glqa_run(g, p) : lqa_run(g, p);
  }
  const double ref = g.satisfied_energy();
  const bool solved = r.energy == ref;
  std::printf("energy %s\nreference %s\nsolved %s\nwall_time_s %s\n", format_double(r.energy).c_str(),
              format_double(ref).c_str(), solved ? "yes" : "no",
              format_double(r.wall_time).c_str());
  if (!a.json_out.empty()) {
    nlohmann::json j{{"solver", a.solver},
                     {"energy", r.energy},
                     {"reference", ref},
                     {"solved", solved},
                     {"wall_time_s", r.wall_time},
                     {"iterations", r.iterations_run},
                     {"seed", a.params.seed},
                     {"spins", r.spins.to_vector()}};
    write_text_file(a.json_out, j.dump(2) + "\n");
  }
  return solved ? kExitSolved : kExitUnsolved;
}

// ---- bench ---------------------------------------------------------------

struct BenchOverrides {
  CLI::Option* seed = nullptr;
  CLI::Option* km = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* mu = nullptr;
  CLI::Option* B = nullptr;
  CLI::Option* n_iter = nullptr;
  CLI::Option* n_sam = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* out = nullptr;
};

struct BenchArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t km = 0;
  double gamma = 0, eta = 0, mu = 0, B = 0;
  std::vector<std::size_t> n_iter;
  std::size_t n_sam = 0, workers = 0;
  std::string out;
  BenchOverrides given;
};

struct BenchPlan {
  ExperimentConfig base;
  std::vector<Solver> solvers{Solver::kLqa, Solver::kGlqa};
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> sa_sweeps;
  std::string out = "bench";
};

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  if (!CLI::detail::lexical_cast(text, v)) throw DomainError("bad value '" + text + "' for " + key);
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::vector<std::string>& inputs) {
  std::vector<T> out;
  for (const auto& in : inputs) {
    std::istringstream words(in);
    for (std::string w; words >> w;) {
      for (std::size_t pos; (pos = w.find(',')) != std::string::npos;) {
        if (pos > 0) out.push_back(parse_value<T>(key, w.substr(0, pos)));
        w.erase(0, pos + 1);
      }
      if (!w.empty()) out.push_back(parse_value<T>(key, w));
    }
  }
  return out;
}

BenchPlan load_bench_config(const std::string& path) {
  std::istringstream text(read_text_file(path));
  const auto items = CLI::ConfigINI().from_config(text);
  BenchPlan plan;
  auto& c = plan.base;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string section = item.parents.empty() ? "" : item.parents.front();
    const std::string key = section + "." + item.name;
    const std::string one = item.inputs.empty() ? "" : item.inputs.front();
    if (key == "bench.family") c.instance.family = parse_family(one);
    else if (key == "bench.size") c.instance.size = parse_value<std::size_t>(key, one);
    else if (key == "bench.sizes") plan.sizes = parse_list<std::size_t>(key, item.inputs);
    else if (key == "bench.instance_seed") c.instance.seed = parse_value<std::uint64_t>(key, one);
    else if (key == "bench.km") c.instance.k_m = parse_value<std::size_t>(key, one);
    else if (key == "bench.path") c.instance.path = one;
    else if (key == "bench.solvers") {
      plan.solvers.clear();
      for (const auto& s : parse_list<std::string>(key, item.inputs)) plan.solvers.push_back(parse_solver(s));
    }
    else if (key == "bench.n_iter") c.n_iter_grid = parse_list<std::size_t>(key, item.inputs);
    else if (key == "bench.n_sam") c.n_sam = parse_value<std::size_t>(key, one);
    else if (key == "bench.workers") c.workers = parse_value<std::size_t>(key, one);
    else if (key == "bench.seed") c.params.seed = parse_value<std::uint64_t>(key, one);
    else if (key == "bench.reference_energy") c.reference_energy = parse_value<double>(key, one);
    else if (key == "bench.out") plan.out = one;
    else if (key == "annealer.gamma") c.params.gamma = parse_value<double>(key, one);
    else if (key == "annealer.eta") c.params.eta = parse_value<double>(key, one);
    else if (key == "annealer.mu") c.params.mu = parse_value<double>(key, one);
    else if (key == "annealer.B") c.params.B = parse_value<double>(key, one);
    else if (key == "annealer.init_scale") c.params.init_scale = parse_value<double>(key, one);
    else if (key == "sa.beta_min") c.schedule.beta_min = parse_value<double>(key, one);
    else if (key == "sa.beta_max") c.schedule.beta_max = parse_value<double>(key, one);
    else if (key == "sa.schedule") c.schedule.kind = parse_schedule(one);
    else if (key == "sa.sweeps") plan.sa_sweeps = parse_list<std::size_t>(key, item.inputs);
    else throw DomainError("unknown config key '" + key + "' in " + path);
  }
  return plan;
}

void echo_plan(const BenchPlan& plan) {
  const auto& c = plan.base;
  std::printf("# bench family=%s size=%zu instance_seed=%llu km=%zu n_sam=%zu workers=%zu seed=%llu\n",
              to_string(c.instance.family).c_str(), c.instance.size,
              static_cast<unsigned long long>(c.instance.seed), c.instance.k_m, c.n_sam, c.workers,
              static_cast<unsigned long long>(c.params.seed));
  std::printf("# annealer gamma=%s eta=%s mu=%s B=%s init_scale=%s\n",
              format_double(c.params.gamma).c_str(), format_double(c.params.eta).c_str(),
              format_double(c.params.mu).c_str(), format_double(c.params.B).c_str(),
              format_double(c.params.init_scale).c_str());
  std::string grid, solvers, sizes;
  for (auto n : c.n_iter_grid) grid += " " + std::to_string(n);
  for (auto s : plan.solvers) solvers += " " + to_string(s);
  for (auto s : plan.sizes) sizes += " " + std::to_string(s);
  std::printf("# n_iter%s\n# solvers%s\n", grid.c_str(), solvers.c_str());
  if (!sizes.empty()) std::printf("# sizes%s\n", sizes.c_str());
}

void print_best(const ExperimentReport& r) {
  const auto* best = r.best_tts();
  if (best) {
    std::printf("best %s size=%zu n_iter=%zu p=%s TTS_s=%s\n", to_string(r.config.solver).c_str(),
                r.config.instance.size, best->n_iter, format_double(best->p).c_str(),
                format_double(*best->tts).c_str());
  } else {
    std::printf("best %s size=%zu unattainable\n", to_string(r.config.solver).c_str(),
                r.config.instance.size);
  }
}

int cmd_bench(const BenchArgs& a) {
  BenchPlan plan = load_bench_config(a.config);
  auto& c = plan.base;
  const auto& g = a.given;
  if (g.seed->count()) c.params.seed = a.seed;
  if (g.km->count()) c.instance.k_m = a.km;
  if (g.gamma->count()) c.params.gamma = a.gamma;
  if (g.eta->count()) c.params.eta = a.eta;
  if (g.mu->count()) c.params.mu = a.mu;
  if (g.B->count()) c.params.B = a.B;
  if (g.n_iter->count()) c.n_iter_grid = a.n_iter;
  if (g.n_sam->count()) c.n_sam = a.n_sam;
  if (g.workers->count()) c.workers = a.workers;
  if (g.out->count()) plan.out = a.out;

  // Validate every run before any compute.
  if (plan.solvers.empty()) throw DomainError("no solvers configured");
  for (auto s : plan.solvers) {
    ExperimentConfig probe = c;
    probe.solver = s;
    if (s == Solver::kSa && !plan.sa_sweeps.empty()) probe.n_iter_grid = plan.sa_sweeps;
    probe.validate();
  }
  if (!plan.sizes.empty() && !std::is_sorted(plan.sizes.begin(), plan.sizes.end())) {
    throw DomainError("sizes must be ascending");
  }
  echo_plan(plan);

  std::vector<ExperimentReport> reports;
  if (!plan.sizes.empty()) {
    const auto scaling = scaling_sweep(c.instance.family, plan.sizes, c);
    for (std::size_t k = 0; k < scaling.lqa.size(); ++k) {
      reports.push_back(scaling.lqa[k]);
      reports.push_back(scaling.glqa[k]);
    }
    write_text_file(plan.out + "_ratios.csv", ratio_csv(scaling));
    std::fputs(ratio_csv(scaling).c_str(), stdout);
  } else {
    const GGraph graph = make_instance(c.instance);
    for (auto s : plan.solvers) {
      ExperimentConfig cfg = c;
      cfg.solver = s;
      if (s == Solver::kSa && !plan.sa_sweeps.empty()) cfg.n_iter_grid = plan.sa_sweeps;
      reports.push_back(run_experiment(graph, cfg));
    }
  }
  write_text_file(plan.out + ".csv", report_csv(reports));
  write_text_file(plan.out + ".json", report_json(reports));
  for (const auto& r : reports) print_best(r);
  std::printf("wrote %s.csv %s.json\n", plan.out.c_str(), plan.out.c_str());
  return kExitSolved;
}

// ---- sim -----------------------------------------------------------------

struct SimArgs {
  std::string ggraph;
  SweepOptions options;
  std::string out;
};

int cmd_sim(const SimArgs& a) {
  const GGraph g = read_ggraph(a.ggraph);
  if (g.n_links() > kMaxSimLinks) {
    throw SizeError("sim supports at most " + std::to_string(kMaxSimLinks) + " links, instance has " +
                    std::to_string(g.n_links()));
  }
  const auto& o = a.options;
  std::printf("# sim gamma=%s n_steps=%zu dt=%s measure_every=%zu seed=%llu\n",
              format_double(o.gamma).c_str(), o.n_steps, format_double(o.dt).c_str(),
              o.measure_every, static_cast<unsigned long long>(o.seed));
  const SweepReport report = adiabatic_sweep(g, o);
  const std::string csv = sweep_csv(report);
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_text_file(a.out, csv);
  }
  const auto& last = report.records.back();
  std::printf("final fidelity %s energy %s minus_outcomes %zu\n", format_double(last.fidelity).c_str(),
              format_double(last.energy).c_str(), report.minus_outcomes);
  return kExitSolved;
}

void add_annealer_flags(CLI::App* cmd, AnnealerParams& p) {
  cmd->add_option("--seed", p.seed, "Master RNG seed")->capture_default_str();
  cmd->add_option("--n-iter", p.n_iter, "Gradient iterations")->capture_default_str();
  cmd->add_option("--gamma", p.gamma, "Plaquette scale gamma")->capture_default_str();
  cmd->add_option("--eta", p.eta, "Learning rate")->capture_default_str();
  cmd->add_option("--mu", p.mu, "Momentum")->capture_default_str();
  cmd->add_option("--B", p.B, "Gauge step strength (glqa)")->capture_default_str();
  cmd->add_option("--init-scale", p.init_scale, "Initial |w| bound")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Z2 gauge mapping and annealing for HUBO problems"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with one [section] per command");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a torus or four-regular-dual instance");
  generate->add_option("family", gen.family, "torus | 4rd")->required();
  generate->add_option("size", gen.size, "L for torus, vertex count for 4rd")->required();
  generate->add_option("out", gen.out, "Output path")->required();
  generate->add_option("--seed", gen.seed, "Graph seed")->capture_default_str();
  generate->add_option("--km", gen.km, "Maximum gauge cycle length")->capture_default_str();
  generate->add_option("--format", gen.format, "ggraph | hubo")
      ->check(CLI::IsMember({"ggraph", "hubo"}))
      ->capture_default_str();

  MapArgs map;
  auto* map_cmd = app.add_subcommand("map", "Map a HUBO file to its G-graph");
  map_cmd->add_option("hubo", map.hubo, "HUBO instance")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("out", map.out, "Output G-graph path")->required();
  map_cmd->add_option("--km", map.km, "Maximum gauge cycle length")->capture_default_str();
  map_cmd->add_option("--search", map.search, "auto | faces | shortest")
      ->check(CLI::IsMember({"auto", "faces", "shortest"}))
      ->capture_default_str();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver sample on a G-graph");
  solve_cmd->add_option("ggraph", solve.ggraph, "G-graph file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--solver", solve.solver, "lqa | glqa | sa")
      ->check(CLI::IsMember({"lqa", "glqa", "sa"}))
      ->capture_default_str();
  add_annealer_flags(solve_cmd, solve.params);
  solve_cmd->add_option("--sweeps", solve.sweeps, "SA sweeps")->capture_default_str();
  solve_cmd->add_option("--beta-min", solve.schedule.beta_min, "SA initial beta")->capture_default_str();
  solve_cmd->add_option("--beta-max", solve.schedule.beta_max, "SA final beta")->capture_default_str();
  solve_cmd->add_option("--schedule", solve.schedule_kind, "geometric | linear")
      ->check(CLI::IsMember({"geometric", "linear"}))
      ->capture_default_str();
  solve_cmd->add_option("--json", solve.json_out, "Also write the result as JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark described by an INI file");
  bench_cmd->add_option("config", bench.config, "Benchmark INI")->required()->check(CLI::ExistingFile);
  bench.given.seed = bench_cmd->add_option("--seed", bench.seed, "Master seed override");
  bench.given.km = bench_cmd->add_option("--km", bench.km, "k_m override");
  bench.given.gamma = bench_cmd->add_option("--gamma", bench.gamma, "gamma override");
  bench.given.eta = bench_cmd->add_option("--eta", bench.eta, "eta override");
  bench.given.mu = bench_cmd->add_option("--mu", bench.mu, "mu override");
  bench.given.B = bench_cmd->add_option("--B", bench.B, "B override");
  bench.given.n_iter = bench_cmd->add_option("--n-iter", bench.n_iter, "n_iter grid override");
  bench.given.n_sam = bench_cmd->add_option("--n-sam", bench.n_sam, "n_sam override");
  bench.given.workers = bench_cmd->add_option("--workers", bench.workers, "Worker threads");
  bench.given.out = bench_cmd->add_option("--out", bench.out, "Output prefix");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Adiabatic state-vector sweep (<= 16 links)");
  sim_cmd->add_option("ggraph", sim.ggraph, "G-graph file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--gamma", sim.options.gamma, "Plaquette scale")->capture_default_str();
  sim_cmd->add_option("--n-steps", sim.options.n_steps, "Trotter steps")->capture_default_str();
  sim_cmd->add_option("--dt", sim.options.dt, "Time per step")->capture_default_str();
  sim_cmd->add_option("--measure-every", sim.options.measure_every, "Gauge measurement period, 0 = never")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.options.seed, "Measurement seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "CSV path (stdout if empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*map_cmd) return cmd_map(map);
    if (*solve_cmd) return cmd_solve(solve);
    if (*bench_cmd) return cmd_bench(bench);
    if (*sim_cmd) return cmd_sim(sim);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return kExitError;
}
