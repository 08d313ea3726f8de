#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polymerlab/disorder.hpp"
#include "polymerlab/limits.hpp"
#include "polymerlab/stats.hpp"

namespace polymerlab {

struct BetaSchedule {
  enum class Kind { FixedGamma, QuarterRoot, HeavyScale };
  Kind kind = Kind::QuarterRoot;
  double beta = 1.0;
  double gamma = 0.0;  // FixedGamma only

  static BetaSchedule fixed_gamma(double beta, double gamma) { return {Kind::FixedGamma, beta, gamma}; }
  static BetaSchedule quarter_root(double beta) { return {Kind::QuarterRoot, beta, 0.0}; }
  static BetaSchedule heavy_scale(double beta) { return {Kind::HeavyScale, beta, 0.0}; }
};

std::string schedule_name(BetaSchedule::Kind k);
BetaSchedule::Kind parse_schedule(const std::string& s);

// FixedGamma: beta n^-gamma; QuarterRoot: beta n^-1/4; HeavyScale: beta / m(n^1.5).
double beta_n(const BetaSchedule& sched, const TailSpec& spec, long n);

// -log(beta_n / beta) / log n, evaluated with beta = 1 so that beta = 0 runs
// still report the schedule's exponent.
double gamma_effective(const BetaSchedule& sched, const TailSpec& spec, long n);

enum class Region { R1, R2, R3, R4, R5, R6, R7, Unclassified, Ambiguous };

std::string region_name(Region r);

// Membership in each region exactly as the defining inequalities read.
// Ambiguous: more than one matches (happens only for alpha < 1/2, where R1
// and R7 overlap).
Region classify_region(double gamma, double alpha);
std::vector<Region> matching_regions(double gamma, double alpha);

// xi on the level curves:
//   alpha <= (5-2g)/(1-g): (1 + alpha(1-g)) / (2 alpha - 1)
//   otherwise:             2(1-g)/3
// gamma in [0,1), alpha > 1/2.
double level_xi(double gamma, double alpha);

// xi for a point of the phase diagram: 1/2 in R1, 1 in R7, level_xi in
// R2..R6; nullopt when unclassified or ambiguous.
std::optional<double> expected_xi(double gamma, double alpha);

struct ExperimentConfig {
  TailSpec tail = TailSpec::gaussian();
  BetaSchedule schedule;
  Theorem theorem = Theorem::TGAUSS;
  std::optional<double> eta;  // cutoff exponent; default_eta(alpha) if unset
  std::vector<int> n_list;
  int replicas = 1;
  std::uint64_t base_seed = 0;
  std::string outputs = "out";
  double eps = 1e-3;  // W-sampler window (THEAVY summaries)
  double cap_k = 8.0;
  int workers = 1;
  int w_draws = 0;  // 0: no W reference sample in the summary
  double posi_est_eps = 0.1;

  CutoffSpec cutoff() const;
  // Throws DomainError on violated invariants.
  void validate() const;
};

// A grid: cross product of alpha x c_minus x beta x gamma lists over a base
// config. Empty lists mean "use the base value".
struct ExperimentGrid {
  ExperimentConfig base;
  std::vector<double> alphas, c_minuses, betas, gammas;
  std::vector<ExperimentConfig> points() const;
  bool empty_grid = false;  // some list was given explicitly as []
};

struct SweepRow {
  double alpha = 0.0;
  double gamma_effective = 0.0;
  double beta = 0.0;  // beta_n
  int n = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  double log_Z_raw = 0.0;
  double log_Z_truncated = 0.0;
  double centering = 0.0;
  double centered_scaled_statistic = 0.0;
  double mean_abs_endpoint = 0.0;
  double truncation_gap = 0.0;
  double runtime_ms = 0.0;
};

std::uint64_t replica_seed(std::uint64_t base_seed, int n, int replica);

// Per-n quantities shared by every replica of a point.
struct PointPlan {
  int n = 0;
  double beta_n = 0.0;
  double k = 0.0;  // +inf when beta_n = 0
  double centering = 0.0;
  double scale = 1.0;  // statistic = scale * (log_Z_raw - centering)
  double lambda = 0.0;  // log E e^{beta_n w~}
  double gamma_effective = 0.0;
};
PointPlan plan_point(const ExperimentConfig& cfg, int n);

// Rows sorted by (n, replica); identical for any worker count.
std::vector<SweepRow> run_replicas(const ExperimentConfig& cfg);

// Effective worker count: POLYMERLAB_WORKERS if set, else cfg.workers.
int effective_workers(const ExperimentConfig& cfg);

struct NSummary {
  int n = 0;
  double beta_n = 0.0, k = 0.0, centering = 0.0, lambda = 0.0;
  ScaleEstimates statistic, log_Z;
  double statistic_mean = 0.0;
  std::optional<double> ks_limit;  // vs the theorem's limit law, when available
  double mean_abs_endpoint = 0.0;
  double gap_q95_sqrt_n = 0.0;  // 95th percentile of sqrt(n) * truncation_gap
  double posi_est_frequency = 0.0;
};

struct PointSummary {
  ExperimentConfig config;
  std::vector<NSummary> per_n;
  std::optional<SlopeFit> chi_fit;  // IQR of log Z across replicas vs n
  std::optional<SlopeFit> xi_fit;   // mean |endpoint| vs n
};

PointSummary summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<PointSummary> summaries;
};

// Runs every grid point; writes <outputs>/rows.csv and <outputs>/summary.json.
SweepResult sweep(const ExperimentGrid& grid, bool write = true);

// persistence
extern const std::vector<std::string> kCsvColumns;
void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows, bool with_runtime = true);
std::vector<SweepRow> read_rows_csv(const std::string& path);
std::string rows_to_csv(const std::vector<SweepRow>& rows, bool with_runtime = true);
std::string summaries_to_json(const std::vector<PointSummary>& s);
void write_summary_json(const std::string& path, const std::vector<PointSummary>& s);

ExperimentGrid parse_config(const std::string& json_text);
ExperimentGrid load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace polymerlab
