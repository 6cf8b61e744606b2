#include "z2hubo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "z2hubo/error.hpp"
#include "z2hubo/io.hpp"
#include "z2hubo/rng.hpp"

namespace z2hubo {

namespace {

struct Sample {
  double energy = std::numeric_limits<double>::infinity();
  double wall_time = 0.0;
  bool failed = false;
};

Sample run_sample(const GGraph& g, const ExperimentConfig& cfg, std::size_t n_iter,
                  std::uint64_t seed) {
  Sample s;
  const auto start = std::chrono::steady_clock::now();
  try {
    SampleResult r;
    if (cfg.solver == Solver::kSa) {
      r = sa_run(g, n_iter, cfg.schedule, seed);
    } else {
      AnnealerParams p = cfg.params;
      p.n_iter = n_iter;
      p.seed = seed;
      r = cfg.solver == Solver::kGlqa ? glqa_run(g, p) : lqa_run(g, p);
    }
    s.energy = r.energy;
  } catch (const DivergenceError&) {
    s.failed = true;
  }
  s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

bool matches(double energy, double reference) {
  return std::abs(energy - reference) <= 1e-9 * std::max(1.0, std::abs(reference));
}

double lower_median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::string machine_note() {
  std::ostringstream out;
  out << "hardware_concurrency=" << std::thread::hardware_concurrency();
#if defined(__VERSION__)
  out << " compiler=" << __VERSION__;
#endif
  return out.str();
}

std::string number_or(double v, const char* marker) {
  if (std::isnan(v)) return marker;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::optional<double> tts(double t_p, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("success probability must lie in [0, 1]");
  if (!(t_p >= 0.0)) throw DomainError("t_p must be >= 0");
  if (p == 0.0) return std::nullopt;
  if (p >= 0.99) return t_p;
  return t_p * std::log(0.01) / std::log1p(-p);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::kTorus: return "torus";
    case Family::kFourRegularDual: return "4rd";
    case Family::kFile: return "file";
  }
  return "?";
}

std::string to_string(Solver solver) {
  switch (solver) {
    case Solver::kLqa: return "lqa";
    case Solver::kGlqa: return "glqa";
    case Solver::kSa: return "sa";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "torus") return Family::kTorus;
  if (name == "4rd" || name == "four-regular-dual") return Family::kFourRegularDual;
  if (name == "file") return Family::kFile;
  throw DomainError("unknown instance family '" + std::string(name) + "'");
}

Solver parse_solver(std::string_view name) {
  if (name == "lqa") return Solver::kLqa;
  if (name == "glqa") return Solver::kGlqa;
  if (name == "sa") return Solver::kSa;
  throw DomainError("unknown solver '" + std::string(name) + "'");
}

GGraph make_instance(const InstanceSpec& spec) {
  switch (spec.family) {
    case Family::kTorus: return gen_torus_lattice(spec.size);
    case Family::kFourRegularDual: return gen_four_regular_dual(spec.size, spec.seed, spec.k_m);
    case Family::kFile: return read_ggraph(spec.path);
  }
  throw DomainError("unknown instance family");
}

void ExperimentConfig::validate() const {
  if (n_iter_grid.empty()) throw DomainError("n_iter grid is empty");
  for (auto n : n_iter_grid) {
    if (n == 0) throw DomainError("n_iter grid entries must be >= 1");
  }
  if (n_sam == 0) throw DomainError("n_sam must be >= 1");
  if (workers == 0) throw DomainError("workers must be >= 1");
  if (instance.family == Family::kFile && instance.path.empty()) {
    throw DomainError("file instance needs a path");
  }
  if (solver == Solver::kSa) {
    schedule.validate();
  } else {
    params.validate();
  }
}

const GridPoint* ExperimentReport::best_tts() const {
  const GridPoint* best = nullptr;
  for (const auto& pt : points) {
    if (pt.tts && (!best || *pt.tts < *best->tts)) best = &pt;
  }
  return best;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(make_instance(cfg.instance), cfg);
}

ExperimentReport run_experiment(const GGraph& g, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  report.n_links = g.n_links();
  report.reference_energy = cfg.reference_energy.value_or(g.satisfied_energy());
  report.machine_note = machine_note();
  report.sample_seeds.resize(cfg.n_sam);
  for (std::size_t i = 0; i < cfg.n_sam; ++i) report.sample_seeds[i] = derive_seed(cfg.params.seed, i);

  std::vector<Sample> samples(cfg.n_sam);
  for (std::size_t n_iter : cfg.n_iter_grid) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < cfg.n_sam; i = next++) {
        samples[i] = run_sample(g, cfg, n_iter, report.sample_seeds[i]);
      }
    };
    const std::size_t n_threads = std::min(cfg.workers, cfg.n_sam);
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(work);
    }

    GridPoint pt;
    pt.n_iter = n_iter;
    pt.n_sam = cfg.n_sam;
    std::vector<double> energies, times;
    for (const auto& s : samples) {
      times.push_back(s.wall_time);
      if (s.failed) {
        ++pt.n_failed;
        continue;
      }
      energies.push_back(s.energy);
      if (matches(s.energy, report.reference_energy)) ++pt.n_sol;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    pt.e_min = energies.empty() ? nan : *std::min_element(energies.begin(), energies.end());
    pt.e_med = energies.empty() ? nan : lower_median(energies);
    pt.p = static_cast<double>(pt.n_sol) / static_cast<double>(pt.n_sam);
    pt.t_p_mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    pt.t_p_median = lower_median(times);
    pt.tts = tts(pt.t_p_mean, pt.p);
    report.points.push_back(pt);
  }
  return report;
}

double ratio_p(double p_glqa, double p_lqa) {
  if (p_lqa == 0.0) {
    return p_glqa == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::numeric_limits<double>::infinity();
  }
  return p_glqa / p_lqa;
}

double ratio_tts(const std::optional<double>& tts_glqa, const std::optional<double>& tts_lqa) {
  if (!tts_glqa && !tts_lqa) return std::numeric_limits<double>::quiet_NaN();
  if (!tts_glqa) return std::numeric_limits<double>::infinity();
  if (!tts_lqa) return 0.0;
  return *tts_glqa / *tts_lqa;
}

ScalingReport scaling_sweep(Family family, const std::vector<std::size_t>& sizes,
                            const ExperimentConfig& templ) {
  if (sizes.empty()) throw DomainError("scaling sweep needs at least one size");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw DomainError("sizes must be ascending");
  ScalingReport out;
  for (std::size_t size : sizes) {
    ExperimentConfig cfg = templ;
    cfg.instance.family = family;
    cfg.instance.size = size;
    const GGraph g = make_instance(cfg.instance);
    cfg.solver = Solver::kLqa;
    out.lqa.push_back(run_experiment(g, cfg));
    cfg.solver = Solver::kGlqa;
    out.glqa.push_back(run_experiment(g, cfg));
    const auto& a = out.lqa.back().points;
    const auto& b = out.glqa.back().points;
    for (std::size_t k = 0; k < a.size(); ++k) {
      out.ratios.push_back({size, a[k].n_iter, a[k].p, b[k].p, ratio_p(b[k].p, a[k].p),
                            ratio_tts(b[k].tts, a[k].tts)});
    }
  }
  return out;
}

std::string report_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "family,size,solver,n_iter,n_sam,E_min,E_med,p,t_p_mean_s,TTS_s\n";
  for (const auto& r : reports) {
    for (const auto& pt : r.points) {
      out << to_string(r.config.instance.family) << ',' << r.config.instance.size << ','
          << to_string(r.config.solver) << ',' << pt.n_iter << ',' << pt.n_sam << ','
          << number_or(pt.e_min, "nan") << ',' << number_or(pt.e_med, "nan") << ','
          << format_double(pt.p) << ',' << format_double(pt.t_p_mean) << ','
          << (pt.tts ? format_double(*pt.tts) : "unattainable") << '\n';
    }
  }
  return out.str();
}

std::string report_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) {
    const auto& c = r.config;
    nlohmann::json j;
    j["config"] = {
        {"family", to_string(c.instance.family)},
        {"size", c.instance.size},
        {"instance_seed", c.instance.seed},
        {"k_m", c.instance.k_m},
        {"path", c.instance.path},
        {"solver", to_string(c.solver)},
        {"n_iter_grid", c.n_iter_grid},
        {"n_sam", c.n_sam},
        {"workers", c.workers},
        {"master_seed", c.params.seed},
        {"gamma", c.params.gamma},
        {"eta", c.params.eta},
        {"mu", c.params.mu},
        {"B", c.params.B},
        {"init_scale", c.params.init_scale},
        {"beta_min", c.schedule.beta_min},
        {"beta_max", c.schedule.beta_max},
        {"beta_schedule", c.schedule.kind == BetaSchedule::kGeometric ? "geometric" : "linear"},
    };
    j["n_links"] = r.n_links;
    j["reference_energy"] = r.reference_energy;
    j["seed_rule"] = "sample i uses derive_seed(master_seed, i) at every grid point";
    j["sample_seeds"] = r.sample_seeds;
    j["machine_note"] = r.machine_note;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : r.points) {
      pts.push_back({{"n_iter", pt.n_iter},
                     {"n_sam", pt.n_sam},
                     {"n_sol", pt.n_sol},
                     {"n_failed", pt.n_failed},
                     {"E_min", json_number(pt.e_min)},
                     {"E_med", json_number(pt.e_med)},
                     {"p", pt.p},
                     {"t_p_mean_s", pt.t_p_mean},
                     {"t_p_median_s", pt.t_p_median},
                     {"TTS_s", pt.tts ? nlohmann::json(*pt.tts) : nlohmann::json("unattainable")}});
    }
    j["points"] = std::move(pts);
    all.push_back(std::move(j));
  }
  return all.dump(2) + "\n";
}

std::string ratio_csv(const ScalingReport& report) {
  std::ostringstream out;
  out << "size,n_iter,p_lqa,p_glqa,r_p,r_TTS\n";
  for (const auto& row : report.ratios) {
    out << row.size << ',' << row.n_iter << ',' << format_double(row.p_lqa) << ','
        << format_double(row.p_glqa) << ',' << number_or(row.r_p, "nan") << ','
        << number_or(row.r_tts, "nan") << '\n';
  }
  return out.str();
}

}  // namespace z2hubo
