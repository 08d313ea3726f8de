#include "polymerlab/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>

#include "polymerlab/chaos.hpp"
#include "polymerlab/errors.hpp"
#include "polymerlab/polymer.hpp"

namespace polymerlab {

std::string schedule_name(BetaSchedule::Kind k) {
  switch (k) {
    case BetaSchedule::Kind::FixedGamma: return "fixed_gamma";
    case BetaSchedule::Kind::QuarterRoot: return "quarter_root";
    case BetaSchedule::Kind::HeavyScale: return "heavy_scale";
  }
  return "?";
}

BetaSchedule::Kind parse_schedule(const std::string& s) {
  if (s == "fixed_gamma") return BetaSchedule::Kind::FixedGamma;
  if (s == "quarter_root") return BetaSchedule::Kind::QuarterRoot;
  if (s == "heavy_scale") return BetaSchedule::Kind::HeavyScale;
  throw DomainError("unknown schedule '" + s + "' (expected fixed_gamma, quarter_root or heavy_scale)");
}

double beta_n(const BetaSchedule& sched, const TailSpec& spec, long n) {
  if (n < 1) throw DomainError("beta_n: n must be at least 1");
  if (!(sched.beta >= 0)) throw DomainError("beta_n: beta must be nonnegative");
  const double nn = static_cast<double>(n);
  switch (sched.kind) {
    case BetaSchedule::Kind::FixedGamma:
      if (!(sched.gamma >= 0)) throw DomainError("beta_n: gamma must be nonnegative");
      return sched.beta * std::pow(nn, -sched.gamma);
    case BetaSchedule::Kind::QuarterRoot:
      return sched.beta * std::pow(nn, -0.25);
    case BetaSchedule::Kind::HeavyScale: {
      if (!spec.heavy() || !std::isfinite(spec.alpha))
        throw DomainError("beta_n: HeavyScale needs a heavy-tailed law with finite alpha");
      if (n < 2) throw DomainError("beta_n: HeavyScale needs n >= 2");
      const double m = m_of_t(spec, std::pow(nn, 1.5));
      if (!(m > 0)) throw DomainError("beta_n: m(n^1.5) is not positive for this n");
      return sched.beta / m;
    }
  }
  return 0.0;
}

double gamma_effective(const BetaSchedule& sched, const TailSpec& spec, long n) {
  if (n < 2) throw DomainError("gamma_effective: n must be at least 2");
  BetaSchedule unit = sched;
  unit.beta = 1.0;
  return -std::log(beta_n(unit, spec, n)) / std::log(static_cast<double>(n));
}

std::string region_name(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
    case Region::R6: return "R6";
    case Region::R7: return "R7";
    case Region::Unclassified: return "unclassified";
    case Region::Ambiguous: return "ambiguous";
  }
  return "?";
}

std::vector<Region> matching_regions(double g, double a) {
  if (!(g >= 0) || !(a > 0)) throw DomainError("classify_region: need gamma >= 0 and alpha > 0");
  std::vector<Region> out;
  if (g > 0.25 && g >= 3.0 / (2.0 * a)) out.push_back(Region::R1);
  if (g == 0.25 && a >= 6.0) out.push_back(Region::R2);
  if (g > 0 && g < 0.25 && a >= (5.0 - 2.0 * g) / (1.0 - g)) out.push_back(Region::R3);
  if (g == 0 && a > 5.0) out.push_back(Region::R4);
  if (a > 0.5) {
    const double lower = std::max({0.0, 2.0 / a - 1.0, (a - 5.0) / (a - 2.0)});
    if (lower < g && g < 3.0 / (2.0 * a)) out.push_back(Region::R5);
  }
  if (a < 2.0 && g == 2.0 / a - 1.0) out.push_back(Region::R6);
  if (a < 2.0 && g < 2.0 / a - 1.0) out.push_back(Region::R7);
  return out;
}

Region classify_region(double g, double a) {
  auto m = matching_regions(g, a);
  if (m.empty()) return Region::Unclassified;
  if (m.size() > 1) return Region::Ambiguous;
  return m.front();
}

double level_xi(double g, double a) {
  if (!(g >= 0 && g < 1) || !(a > 0.5))
    throw DomainError("level_xi: need gamma in [0,1) and alpha > 1/2");
  if (a <= (5.0 - 2.0 * g) / (1.0 - g)) return (1.0 + a * (1.0 - g)) / (2.0 * a - 1.0);
  return 2.0 * (1.0 - g) / 3.0;
}

std::optional<double> expected_xi(double g, double a) {
  switch (classify_region(g, a)) {
    case Region::R1: return 0.5;
    case Region::R7: return 1.0;
    case Region::Unclassified:
    case Region::Ambiguous: return std::nullopt;
    default: return level_xi(g, a);
  }
}

CutoffSpec ExperimentConfig::cutoff() const {
  return eta ? CutoffSpec::for_alpha(tail.alpha, *eta) : CutoffSpec::for_alpha(tail.alpha);
}

void ExperimentConfig::validate() const {
  if (replicas < 1) throw DomainError("config: replicas must be at least 1");
  if (n_list.empty()) throw DomainError("config: n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw DomainError("config: every n must be at least 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("config: n_list must be strictly ascending");
  }
  if (workers < 1) throw DomainError("config: workers must be at least 1");
  if (!(eps > 0) || !(cap_k > 0)) throw DomainError("config: eps and cap_k must be positive");
  if (w_draws < 0) throw DomainError("config: w_draws must be nonnegative");
  if (!(posi_est_eps > 0 && posi_est_eps < 1)) throw DomainError("config: posi_est_eps must lie in (0,1)");
  if (!(schedule.beta >= 0)) throw DomainError("config: beta must be nonnegative");
  if (!(schedule.gamma >= 0)) throw DomainError("config: gamma must be nonnegative");
  cutoff();
}

std::vector<ExperimentConfig> ExperimentGrid::points() const {
  std::vector<ExperimentConfig> out;
  if (empty_grid) return out;
  auto or_base = [](const std::vector<double>& v, double b) { return v.empty() ? std::vector<double>{b} : v; };
  const auto A = or_base(alphas, base.tail.alpha), C = or_base(c_minuses, base.tail.c_minus),
             B = or_base(betas, base.schedule.beta), G = or_base(gammas, base.schedule.gamma);
  for (double a : A)
    for (double c : C)
      for (double b : B)
        for (double g : G) {
          ExperimentConfig cfg = base;
          switch (base.tail.family) {
            case Family::StandardizedTwoSidedLomax: cfg.tail = TailSpec::lomax(a, c, base.tail.scale); break;
            case Family::ParetoOneSided: cfg.tail = TailSpec::pareto(a); break;
            case Family::GaussianReference: cfg.tail = TailSpec::gaussian(); break;
          }
          cfg.schedule.beta = b;
          cfg.schedule.gamma = g;
          out.push_back(cfg);
        }
  return out;
}

std::uint64_t replica_seed(std::uint64_t base_seed, int n, int replica) {
  return hash64({base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replica)});
}

PointPlan plan_point(const ExperimentConfig& cfg, int n) {
  PointPlan p;
  p.n = n;
  p.beta_n = beta_n(cfg.schedule, cfg.tail, n);
  p.gamma_effective = gamma_effective(cfg.schedule, cfg.tail, n);
  const double nn = static_cast<double>(n);
  p.centering = centering_constant(cfg.tail, p.beta_n, n, CenteringSpec::make(cfg.theorem, cfg.tail.alpha));
  if (p.beta_n > 0) {
    p.k = cutoff_k(cfg.tail, p.beta_n, n, cfg.cutoff());
    p.lambda = chaos_lambda(cfg.tail, p.beta_n, p.k);
    switch (cfg.theorem) {
      case Theorem::T14: p.scale = 1.0; break;
      case Theorem::TGAUSS: p.scale = 1.0 / (p.beta_n * std::pow(nn, 0.25)); break;
      case Theorem::THEAVY:
        p.scale = std::sqrt(nn) / (p.beta_n * m_of_t(cfg.tail, std::pow(nn, 1.5)));
        break;
    }
  } else {
    p.k = std::numeric_limits<double>::infinity();
  }
  return p;
}

int effective_workers(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("POLYMERLAB_WORKERS")) {
    char* end = nullptr;
    long w = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || w < 1) throw DomainError("POLYMERLAB_WORKERS must be a positive integer");
    return static_cast<int>(w);
  }
  return cfg.workers;
}

std::vector<SweepRow> run_replicas(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<PointPlan> plans;
  for (int n : cfg.n_list) plans.push_back(plan_point(cfg, n));
  const long R = cfg.replicas;
  const long tasks = static_cast<long>(plans.size()) * R;
  std::vector<SweepRow> rows(static_cast<std::size_t>(tasks));
  std::exception_ptr err;
  std::mutex err_mu;
  const int workers = effective_workers(cfg);
  // largest n first for load balance; every task writes only its own slot
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long t = tasks - 1; t >= 0; --t) {
    try {
      const PointPlan& p = plans[static_cast<std::size_t>(t / R)];
      const int r = static_cast<int>(t % R);
      auto t0 = std::chrono::steady_clock::now();
      SweepRow row;
      row.alpha = cfg.tail.alpha;
      row.gamma_effective = p.gamma_effective;
      row.beta = p.beta_n;
      row.n = p.n;
      row.replica = r;
      row.seed = replica_seed(cfg.base_seed, p.n, r);
      StreamedRun run = run_streaming(cfg.tail, p.n, row.seed, p.beta_n, p.k);
      row.log_Z_raw = run.log_Z;
      row.log_Z_truncated = run.log_Z_truncated;
      row.centering = p.centering;
      row.centered_scaled_statistic = p.scale * (run.log_Z - p.centering);
      row.mean_abs_endpoint = run.mean_abs_endpoint;
      row.truncation_gap = log_gap(run.log_Z, run.log_Z_truncated);
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rows[static_cast<std::size_t>(t)] = row;
    } catch (...) {
      std::lock_guard lk(err_mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return rows;
}

namespace {

constexpr std::uint64_t kWSampleTag = 0x5773616d706c65;  // "Wsample"

std::vector<double> column(const std::vector<SweepRow>& rows, double SweepRow::*field) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.*field);
  return v;
}

}  // namespace

PointSummary summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  PointSummary out;
  out.config = cfg;
  std::map<int, std::vector<SweepRow>> by_n;
  for (const auto& r : rows) by_n[r.n].push_back(r);

  std::optional<EmpiricalSample> w_ref;
  if (cfg.theorem == Theorem::THEAVY && cfg.w_draws > 0) {
    Stream rng(hash64({cfg.base_seed, kWSampleTag}));
    std::vector<double> w(static_cast<std::size_t>(cfg.w_draws));
    for (double& x : w)
      x = 2.0 * sample_W(cfg.tail.alpha, cfg.tail.c_minus, cfg.schedule.beta, cfg.eps, cfg.cap_k, rng);
    w_ref.emplace(std::move(w));
  }

  std::vector<std::pair<double, double>> chi_pts, xi_pts;
  bool chi_ok = true;
  for (const auto& [n, rs] : by_n) {
    PointPlan p = plan_point(cfg, n);
    NSummary s;
    s.n = n;
    s.beta_n = p.beta_n;
    s.k = p.k;
    s.centering = p.centering;
    s.lambda = p.lambda;
    EmpiricalSample stat(column(rs, &SweepRow::centered_scaled_statistic));
    EmpiricalSample logz(column(rs, &SweepRow::log_Z_raw));
    s.statistic = scale_estimates(stat);
    s.statistic_mean = sample_mean(stat);
    s.log_Z = scale_estimates(logz);
    if (cfg.theorem == Theorem::TGAUSS) s.ks_limit = ks_one_sample(stat, gaussian_limit_cdf);
    if (w_ref) s.ks_limit = ks_two_sample(stat, *w_ref);
    s.mean_abs_endpoint = sample_mean(EmpiricalSample(column(rs, &SweepRow::mean_abs_endpoint)));
    std::vector<double> gaps = column(rs, &SweepRow::truncation_gap);
    for (double& g : gaps) g *= std::sqrt(static_cast<double>(n));
    s.gap_q95_sqrt_n = sample_quantile(EmpiricalSample(std::move(gaps)), 0.95);
    const double log_eps = std::log(cfg.posi_est_eps);
    long hits = 0;
    for (const auto& r : rs) hits += (r.log_Z_truncated - n * p.lambda < log_eps);
    s.posi_est_frequency = static_cast<double>(hits) / static_cast<double>(rs.size());
    if (s.log_Z.iqr > 0) chi_pts.emplace_back(n, s.log_Z.iqr);
    else chi_ok = false;
    xi_pts.emplace_back(n, s.mean_abs_endpoint);
    out.per_n.push_back(s);
  }
  if (chi_ok && chi_pts.size() >= 3) out.chi_fit = loglog_slope(chi_pts);
  if (xi_pts.size() >= 3) out.xi_fit = loglog_slope(xi_pts);
  return out;
}

SweepResult sweep(const ExperimentGrid& grid, bool write) {
  SweepResult res;
  for (const auto& cfg : grid.points()) {
    auto rows = run_replicas(cfg);
    res.summaries.push_back(summarize(cfg, rows));
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  if (write) {
    const std::filesystem::path dir(grid.base.outputs);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    write_rows_csv((dir / "rows.csv").string(), res.rows);
    write_summary_json((dir / "summary.json").string(), res.summaries);
  }
  return res;
}

}  // namespace polymerlab
