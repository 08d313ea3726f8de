#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "polymerlab/chaos.hpp"
#include "polymerlab/errors.hpp"
#include "polymerlab/experiment.hpp"
#include "polymerlab/limits.hpp"
#include "polymerlab/polymer.hpp"

using namespace polymerlab;

namespace {

const char* kConfigKeys =
    "config keys (flat JSON object):\n"
    "  family        lomax | pareto | gaussian            (default gaussian)\n"
    "  alpha         tail index; number or list           (heavy families)\n"
    "  c_minus       left/right tail ratio; number or list (default 1)\n"
    "  scale         Lomax scale b                        (default 1)\n"
    "  schedule      fixed_gamma | quarter_root | heavy_scale\n"
    "  beta          limit constant; number or list       (default 1)\n"
    "  gamma         FixedGamma exponent; number or list  (default 0)\n"
    "  theorem       T14 | TGAUSS | THEAVY                (default TGAUSS)\n"
    "  eta           cutoff exponent                      (default min((1/2+alpha)/2, 5.5))\n"
    "  n_list        strictly ascending list, n >= 2\n"
    "  replicas      per n                                (default 1)\n"
    "  base_seed     unsigned 64-bit                      (default 0)\n"
    "  outputs       output directory                     (default out)\n"
    "  eps, cap_k    W-sampler window                     (default 1e-3, 8)\n"
    "  w_draws       W reference draws for THEAVY KS      (default 0)\n"
    "  workers       threads; POLYMERLAB_WORKERS overrides (default 1)\n"
    "  posi_est_eps  threshold of the P(Z~ < eps E Z~) diagnostic (default 0.1)\n";

std::string csv_schema() {
  std::string s = "rows.csv columns, in order:\n ";
  for (const auto& c : kCsvColumns) s += " " + c;
  s += "\n  (beta holds beta_n; runtime_ms is excluded from determinism checks)\n";
  return s;
}

// "a:b:k" (k points inclusive) or "a,b,c".
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a, b;
    int k;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &k) != 3 || k < 1)
      throw DomainError("bad grid '" + spec + "' (expected start:stop:count)");
    for (int i = 0; i < k; ++i) out.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int run_config(const std::string& path, bool single) {
  ExperimentGrid grid = load_config(path);
  if (single && grid.points().size() != 1)
    throw DomainError("simulate takes one parameter point; use sweep for lists");
  SweepResult r = sweep(grid, true);
  std::cout << "wrote " << r.rows.size() << " rows to " << grid.base.outputs << "/rows.csv and "
            << r.summaries.size() << " summaries to " << grid.base.outputs << "/summary.json\n";
  return 0;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Check {
  int passed = 0, failed = 0;
  void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    (ok ? passed : failed)++;
  }
};

int run_verify(std::uint64_t seed) {
  Check chk;
  std::mt19937_64 pick(seed);
  const double alphas[] = {1.5, 4.0, 8.0};
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    int n = 8 + static_cast<int>(pick() % 7);
    double a = alphas[pick() % 3];
    double beta = 2.0 * Stream::to_open_unit(pick());
    Environment env = generate_env(TailSpec::lomax(a, 1.0), n, pick());
    worst = std::max(worst, std::abs(log_partition(env, beta).log_Z - brute_force_log_partition(env, beta)));
  }
  chk.report("path enumeration", worst < 1e-10, "max |diff| = " + sci(worst));

  double worst_rel = 0.0;
  for (int c = 0; c < 30; ++c) {
    int n = 6 + 2 * static_cast<int>(pick() % 3);
    double beta = 0.2 + Stream::to_open_unit(pick());
    Environment env = generate_env(TailSpec::lomax(4.0, 1.0), n, pick());
    double k = 1.5 / beta;
    ZetaField z = zeta_field(env, beta, k);
    double lhs = multilinear_sum(z, n);
    double rhs = std::exp(log_partition(truncated_env(env, k), beta).log_Z - n * z.lambda);
    worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / std::abs(rhs));
  }
  chk.report("chaos identity", worst_rel < 1e-9, "max rel diff = " + sci(worst_rel));

  bool feller_ok = true, bound_ok = true;
  for (int n = 1; n <= 16; ++n) {
    for (int r = 1; r <= n; ++r) {
      // count paths whose running maximum reaches r
      boost::multiprecision::cpp_int count = 0;
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        int s = 0, m = 0;
        for (int i = 0; i < n; ++i) {
          s += (bits >> i & 1u) ? 1 : -1;
          m = std::max(m, s);
        }
        if (m >= r) ++count;
      }
      feller_ok = feller_ok && count == feller_max_count(n, r);
      bound_ok = bound_ok && feller_max_probability(n, r) <= 4.0 * std::exp(-double(r) * r / (2.0 * n));
    }
  }
  chk.report("feller count", feller_ok, "n <= 16, 1 <= r <= n");
  chk.report("feller bound", bound_ok, "P <= 4 exp(-r^2/2n)");
  std::printf("%d passed, %d failed\n", chk.passed, chk.failed);
  return chk.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed polymers in heavy-tailed random environments"};
  app.require_subcommand(1);
  app.footer(csv_schema());

  std::string cfg_path;
  auto* sim = app.add_subcommand("simulate", "run one parameter point from a config file");
  sim->add_option("--config", cfg_path, "config file")->required()->check(CLI::ExistingFile);
  sim->footer(kConfigKeys);
  auto* swp = app.add_subcommand("sweep", "run the full grid of a config file");
  swp->add_option("--config", cfg_path, "config file")->required()->check(CLI::ExistingFile);
  swp->footer(kConfigKeys);

  auto* lim = app.add_subcommand("limits", "limit-law samplers");
  lim->require_subcommand(1);
  double alpha = 1.5, beta = 1.0, cm = 1.0, eps = 1e-3, K = 8.0;
  long count = 1000;
  std::uint64_t seed = 1;
  bool no_drift = false;
  auto* sw = lim->add_subcommand("sample-w", "draw W_beta^(alpha) to CSV on stdout");
  sw->add_option("--alpha", alpha)->required();
  sw->add_option("--beta", beta)->required();
  sw->add_option("--c-minus", cm)->required();
  sw->add_option("--eps", eps, "jump cutoff")->capture_default_str();
  sw->add_option("--cap-k", K, "space window")->capture_default_str();
  sw->add_option("--count", count)->capture_default_str();
  sw->add_option("--seed", seed)->capture_default_str();
  sw->add_flag("--no-drift", no_drift, "alpha < 1: drop the small-jump drift correction");
  double y_min = -3, y_max = 3;
  int steps = 61;
  auto* cf = lim->add_subcommand("stable-cf", "tabulate psi_alpha and exp(psi_alpha)");
  cf->add_option("--alpha", alpha)->required();
  cf->add_option("--c-minus", cm)->required();
  cf->add_option("--y-min", y_min)->capture_default_str();
  cf->add_option("--y-max", y_max)->capture_default_str();
  cf->add_option("--steps", steps)->capture_default_str();

  std::string ggrid = "0:1:21", agrid = "0.6:10:48";
  auto* reg = app.add_subcommand("regions", "phase-diagram table: region and xi per (gamma, alpha)");
  reg->add_option("--gamma-grid", ggrid, "start:stop:count or a,b,c")->capture_default_str();
  reg->add_option("--alpha-grid", agrid, "start:stop:count or a,b,c")->capture_default_str();

  std::uint64_t vseed = 2024;
  auto* ver = app.add_subcommand("verify", "exact-oracle checks: enumeration, chaos identity, Feller");
  ver->add_option("--seed", vseed)->capture_default_str();

  auto* sch = app.add_subcommand("schema", "print the CSV columns and config keys");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return run_config(cfg_path, true);
    if (*swp) return run_config(cfg_path, false);
    if (*sw) {
      Stream rng(seed);
      WOptions opt;
      opt.small_jump_drift = !no_drift;
      std::printf("draw,W\n");
      for (long i = 0; i < count; ++i) std::printf("%ld,%.17g\n", i, sample_W(alpha, cm, beta, eps, K, rng, opt));
      return 0;
    }
    if (*cf) {
      if (steps < 1) throw DomainError("--steps must be positive");
      std::printf("y,re_psi,im_psi,re_cf,im_cf\n");
      for (int i = 0; i < steps; ++i) {
        double y = steps == 1 ? y_min : y_min + (y_max - y_min) * i / (steps - 1);
        auto psi = stable_exponent(alpha, cm, y);
        auto phi = std::exp(psi);
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g\n", y, psi.real(), psi.imag(), phi.real(), phi.imag());
      }
      return 0;
    }
    if (*reg) {
      std::printf("gamma,alpha,region,xi\n");
      for (double g : parse_grid(ggrid))
        for (double a : parse_grid(agrid)) {
          auto xi = expected_xi(g, a);
          std::printf("%.17g,%.17g,%s,", g, a, region_name(classify_region(g, a)).c_str());
          if (xi) std::printf("%.17g", *xi);
          std::printf("\n");
        }
      return 0;
    }
    if (*ver) return run_verify(vseed);
    if (*sch) {
      std::cout << csv_schema() << "\n" << kConfigKeys;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
