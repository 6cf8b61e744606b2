#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "z2hubo/annealers.hpp"
#include "z2hubo/graph_map.hpp"

namespace z2hubo {

/// Time-to-solution at 99% confidence. nullopt means unattainable (p = 0).
/// Throws DomainError for p outside [0, 1] or negative t_p.
std::optional<double> tts(double t_p, double p);

enum class Family { kTorus, kFourRegularDual, kFile };
enum class Solver { kLqa, kGlqa, kSa };

std::string to_string(Family family);
std::string to_string(Solver solver);
/// Accepts torus, 4rd, four-regular-dual, file. Throws DomainError otherwise.
Family parse_family(std::string_view name);
/// Accepts lqa, glqa, sa. Throws DomainError otherwise.
Solver parse_solver(std::string_view name);

/// size is L for the torus and the vertex count of the four-regular graph
/// (2*size links) for its dual. kFile reads `path` and ignores size.
struct InstanceSpec {
  Family family = Family::kTorus;
  std::size_t size = 10;
  std::uint64_t seed = 0;
  std::size_t k_m = kDefaultMaxCycle;
  std::string path;
};

GGraph make_instance(const InstanceSpec& spec);

struct ExperimentConfig {
  InstanceSpec instance;
  Solver solver = Solver::kGlqa;
  AnnealerParams params;  // params.seed is the master seed
  SaSchedule schedule;
  /// Iterations for LQA/gLQA, sweeps for SA.
  std::vector<std::size_t> n_iter_grid{1000};
  std::size_t n_sam = 200;
  /// Energy counted as a solution; the satisfied energy -sum|J_p| when unset.
  std::optional<double> reference_energy;
  std::size_t workers = 1;

  /// Throws DomainError on an empty grid, n_sam = 0, workers = 0, or bad solver params.
  void validate() const;
};

struct GridPoint {
  std::size_t n_iter = 0;
  std::size_t n_sam = 0;
  std::size_t n_sol = 0;
  std::size_t n_failed = 0;
  double e_min = 0.0;
  double e_med = 0.0;  // lower-middle element for even n_sam
  double p = 0.0;
  double t_p_mean = 0.0;
  double t_p_median = 0.0;
  std::optional<double> tts;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t n_links = 0;
  double reference_energy = 0.0;
  std::vector<std::uint64_t> sample_seeds;
  std::vector<GridPoint> points;
  std::string machine_note;

  /// Grid point with the smallest attainable TTS, or nullptr.
  const GridPoint* best_tts() const;
};

/// Runs n_sam independent samples per grid point. Sample i uses
/// derive_seed(master, i) at every grid point, so solvers sharing a master
/// seed see the same initial states. Diverged samples count as failures.
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const GGraph& g, const ExperimentConfig& cfg);

struct RatioRow {
  std::size_t size = 0;
  std::size_t n_iter = 0;
  double p_lqa = 0.0;
  double p_glqa = 0.0;
  /// inf when p_lqa = 0 < p_glqa, NaN when both are zero.
  double r_p = 0.0;
  /// 0 when only LQA is unattainable, inf when only gLQA is, NaN when both.
  double r_tts = 0.0;
};

struct ScalingReport {
  std::vector<ExperimentReport> lqa;
  std::vector<ExperimentReport> glqa;
  std::vector<RatioRow> ratios;
};

double ratio_p(double p_glqa, double p_lqa);
double ratio_tts(const std::optional<double>& tts_glqa, const std::optional<double>& tts_lqa);

/// Runs the template as LQA and as gLQA for every size (ascending) and
/// tabulates r_p and r_TTS per size and grid point.
ScalingReport scaling_sweep(Family family, const std::vector<std::size_t>& sizes,
                            const ExperimentConfig& templ);

/// One row per grid point:
/// family,size,solver,n_iter,n_sam,E_min,E_med,p,t_p_mean_s,TTS_s
std::string report_csv(const std::vector<ExperimentReport>& reports);
std::string report_json(const std::vector<ExperimentReport>& reports);
std::string ratio_csv(const ScalingReport& report);

}  // namespace z2hubo
