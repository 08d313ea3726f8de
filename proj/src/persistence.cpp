#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polymerlab/errors.hpp"
#include "polymerlab/experiment.hpp"

namespace polymerlab {

using nlohmann::json;

const std::vector<std::string> kCsvColumns = {
    "alpha", "gamma_effective", "beta", "n", "replica", "seed", "log_Z_raw", "log_Z_truncated",
    "centering", "centered_scaled_statistic", "mean_abs_endpoint", "truncation_gap", "runtime_ms"};

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json scale_json(const ScaleEstimates& e) { return {{"variance", e.variance}, {"iqr", e.iqr}, {"mad", e.mad}}; }

json fit_json(const std::optional<SlopeFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"stderr", f->stderr_}, {"r_squared", f->r_squared}};
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["family"] = family_name(c.tail.family);
  j["alpha"] = finite_or_null(c.tail.alpha);
  j["c_minus"] = c.tail.c_minus;
  j["scale"] = c.tail.scale;
  j["schedule"] = schedule_name(c.schedule.kind);
  j["beta"] = c.schedule.beta;
  j["gamma"] = c.schedule.gamma;
  j["theorem"] = theorem_name(c.theorem);
  j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
  j["n_list"] = c.n_list;
  j["replicas"] = c.replicas;
  j["base_seed"] = c.base_seed;
  j["outputs"] = c.outputs;
  j["eps"] = c.eps;
  j["cap_k"] = c.cap_k;
  j["workers"] = c.workers;
  j["w_draws"] = c.w_draws;
  j["posi_est_eps"] = c.posi_est_eps;
  return j;
}

}  // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows, bool with_runtime) {
  std::ostringstream os;
  const std::size_t ncol = with_runtime ? kCsvColumns.size() : kCsvColumns.size() - 1;
  for (std::size_t i = 0; i < ncol; ++i) os << (i ? "," : "") << kCsvColumns[i];
  os << '\n';
  for (const auto& r : rows) {
    os << fmt_double(r.alpha) << ',' << fmt_double(r.gamma_effective) << ',' << fmt_double(r.beta) << ','
       << r.n << ',' << r.replica << ',' << r.seed << ',' << fmt_double(r.log_Z_raw) << ','
       << fmt_double(r.log_Z_truncated) << ',' << fmt_double(r.centering) << ','
       << fmt_double(r.centered_scaled_statistic) << ',' << fmt_double(r.mean_abs_endpoint) << ','
       << fmt_double(r.truncation_gap);
    if (with_runtime) os << ',' << fmt_double(r.runtime_ms);
    os << '\n';
  }
  return os.str();
}

void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows, bool with_runtime) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << rows_to_csv(rows, with_runtime);
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<SweepRow> read_rows_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path + ": missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) header.push_back(f);
  }
  const bool full = header == kCsvColumns;
  const bool short_ = header == std::vector<std::string>(kCsvColumns.begin(), kCsvColumns.end() - 1);
  if (!full && !short_) throw std::runtime_error(path + ": unexpected header");
  std::vector<SweepRow> rows;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong number of fields");
    try {
      SweepRow r;
      r.alpha = parse_double(f[0]);
      r.gamma_effective = parse_double(f[1]);
      r.beta = parse_double(f[2]);
      r.n = std::stoi(f[3]);
      r.replica = std::stoi(f[4]);
      r.seed = std::stoull(f[5]);
      r.log_Z_raw = parse_double(f[6]);
      r.log_Z_truncated = parse_double(f[7]);
      r.centering = parse_double(f[8]);
      r.centered_scaled_statistic = parse_double(f[9]);
      r.mean_abs_endpoint = parse_double(f[10]);
      r.truncation_gap = parse_double(f[11]);
      if (full) r.runtime_ms = parse_double(f[12]);
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::string summaries_to_json(const std::vector<PointSummary>& summaries) {
  json arr = json::array();
  for (const auto& s : summaries) {
    json j;
    j["config"] = config_json(s.config);
    json per = json::array();
    for (const auto& p : s.per_n) {
      json q;
      q["n"] = p.n;
      q["beta_n"] = p.beta_n;
      q["k"] = finite_or_null(p.k);
      q["centering"] = p.centering;
      q["lambda"] = p.lambda;
      q["statistic_mean"] = p.statistic_mean;
      q["statistic"] = scale_json(p.statistic);
      q["log_Z"] = scale_json(p.log_Z);
      q["ks_limit"] = p.ks_limit ? json(*p.ks_limit) : json(nullptr);
      q["mean_abs_endpoint"] = p.mean_abs_endpoint;
      q["gap_q95_sqrt_n"] = p.gap_q95_sqrt_n;
      q["posi_est_frequency"] = p.posi_est_frequency;
      per.push_back(q);
    }
    j["per_n"] = per;
    j["chi_fit"] = fit_json(s.chi_fit);
    j["xi_fit"] = fit_json(s.xi_fit);
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const std::vector<PointSummary>& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << summaries_to_json(s);
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentGrid parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config: top level must be an object");
  static const std::set<std::string> known = {"family", "alpha", "c_minus", "scale", "schedule", "beta",
                                              "gamma", "theorem", "eta", "n_list", "replicas", "base_seed",
                                              "outputs", "eps", "cap_k", "workers", "w_draws", "posi_est_eps"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw DomainError("config: unknown key '" + it.key() + "'");

  ExperimentGrid g;
  auto list = [&](const char* key, std::vector<double>& out) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const json& v = j[key];
    if (v.is_number()) return v.get<double>();
    if (!v.is_array()) throw DomainError(std::string("config: '") + key + "' must be a number or a list");
    for (const auto& x : v) {
      if (!x.is_number()) throw DomainError(std::string("config: '") + key + "' entries must be numbers");
      out.push_back(x.get<double>());
    }
    if (out.empty()) g.empty_grid = true;
    return std::nullopt;
  };
  try {
    ExperimentConfig& c = g.base;
    const Family fam = parse_family(j.value("family", std::string("gaussian")));
    auto alpha = list("alpha", g.alphas);
    auto cm = list("c_minus", g.c_minuses);
    auto beta = list("beta", g.betas);
    auto gamma = list("gamma", g.gammas);
    const double scale = j.value("scale", 1.0);
    if (fam == Family::GaussianReference) {
      if (alpha || !g.alphas.empty()) throw DomainError("config: the gaussian family takes no alpha");
      c.tail = TailSpec::gaussian();
    } else {
      if (!alpha && g.alphas.empty() && !g.empty_grid) throw DomainError("config: alpha is required");
      const double a = alpha ? *alpha : (g.alphas.empty() ? 4.0 : g.alphas.front());
      const double cmv = cm ? *cm : (g.c_minuses.empty() ? 1.0 : g.c_minuses.front());
      c.tail = fam == Family::ParetoOneSided ? TailSpec::pareto(a) : TailSpec::lomax(a, cmv, scale);
    }
    c.schedule.kind = parse_schedule(j.value("schedule", std::string("quarter_root")));
    c.schedule.beta = beta ? *beta : (g.betas.empty() ? 1.0 : g.betas.front());
    c.schedule.gamma = gamma ? *gamma : (g.gammas.empty() ? 0.0 : g.gammas.front());
    c.theorem = parse_theorem(j.value("theorem", std::string("TGAUSS")));
    if (j.contains("eta") && !j["eta"].is_null()) c.eta = j["eta"].get<double>();
    if (!j.contains("n_list")) throw DomainError("config: n_list is required");
    c.n_list = j["n_list"].get<std::vector<int>>();
    c.replicas = j.value("replicas", 1);
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.outputs = j.value("outputs", std::string("out"));
    c.eps = j.value("eps", 1e-3);
    c.cap_k = j.value("cap_k", 8.0);
    c.workers = j.value("workers", 1);
    c.w_draws = j.value("w_draws", 0);
    c.posi_est_eps = j.value("posi_est_eps", 0.1);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  if (!g.empty_grid)
    for (const auto& p : g.points()) p.validate();
  return g;
}

ExperimentGrid load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace polymerlab
