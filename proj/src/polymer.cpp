#include "polymerlab/polymer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "polymerlab/errors.hpp"
#include "polymerlab/kernels.hpp"

namespace polymerlab {

namespace {

int floor_div2(int a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }

// Live index range of row i under |x| < h (h = 0: whole row).
std::pair<int, int> live_range(int i, int h) {
  if (h == 0) return {0, i};
  int lo = std::max(0, floor_div2(i - h) + 1);
  int hi = std::min(i, floor_div2(i + h - 1));
  return {lo, hi};
}

// Neumaier-compensated log-sum-exp.
double log_sum_exp(std::span<const double> v) {
  double m = kLogZero;
  for (double x : v) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    double e = std::exp(x - m);
    double t = sum + e;
    comp += std::abs(sum) >= e ? (sum - t) + e : (e - t) + sum;
    sum = t;
  }
  return m + std::log(sum + comp);
}

}  // namespace

EnvRowStream::EnvRowStream(const TailSpec& spec, std::uint64_t seed)
    : spec_(spec), rng_(hash64({seed, kEnvStreamTag})) {}

void EnvRowStream::next_row(std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(rows_) + 2)
    throw DomainError("EnvRowStream: row " + std::to_string(rows_ + 1) + " has " +
                      std::to_string(rows_ + 2) + " sites");
  sample_into(spec_, rng_, out);
  ++rows_;
}

Environment generate_env(const TailSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("generate_env: n must be at least 1");
  Environment env;
  env.n = n;
  env.seed = seed;
  env.spec = spec;
  env.omega.resize(Environment::cone_size(n));
  EnvRowStream rows(spec, seed);
  for (int i = 1; i <= n; ++i) rows.next_row(env.row(i));
  return env;
}

Environment truncated_env(const Environment& env, double k) {
  if (!(k > 0)) throw DomainError("truncated_env: k must be positive");
  Environment out = env;
  for (double& w : out.omega) w = truncate(w, k);
  out.truncation = k;
  return out;
}

double excess_weight(const Environment& env, double k, int h) {
  if (!(k > 0) || h < 1) throw DomainError("excess_weight: need k > 0 and h >= 1");
  double sum = 0.0;
  for (int i = 1; i <= env.n; ++i) {
    auto [lo, hi] = live_range(i, h);
    auto row = env.row(i);
    for (int j = lo; j <= hi; ++j)
      if (row[j] > k) sum += row[j];
  }
  return sum;
}

double log_gap(double a, double b) {
  if (a == kLogZero || b == kLogZero)
    throw DomainError("log_gap: difference with an empty path set is undefined");
  return a - b;
}

double PartitionResult::endpoint_log_weight(int x) const {
  if (std::abs(x) > n || (x + n) % 2 != 0) return kLogZero;
  return endpoint_log_weights[(x + n) / 2];
}

TransferMatrix::TransferMatrix(int n_max, double beta, int h, Kernel kernel)
    : n_max_(n_max), beta_(beta), h_(h), kernel_(kernel) {
  if (n_max < 1) throw DomainError("TransferMatrix: n_max must be at least 1");
  if (!(beta >= 0)) throw DomainError("TransferMatrix: beta must be nonnegative");
  if (h < 0) throw DomainError("TransferMatrix: h must be positive (0 = unrestricted)");
  cur_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  nxt_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
}

void TransferMatrix::advance(std::span<const double> omega_row) {
  const int i = steps_ + 1;
  if (i > n_max_) throw DomainError("TransferMatrix: advanced past n_max");
  if (omega_row.size() != static_cast<std::size_t>(i) + 1)
    throw DomainError("TransferMatrix: row " + std::to_string(i) + " needs " + std::to_string(i + 1) +
                      " weights");
  steps_ = i;
  if (empty_) return;
  auto [lo, hi] = live_range(i, h_);
  if (lo > 0 || hi < i) clipped_ = true;
  if (lo > hi) {
    empty_ = true;
    return;
  }
  double mx;
  if (kernel_ == Kernel::Fast) {
    mx = kernels::fast::row_step(cur_.data(), lo_, hi_, nxt_.data(), omega_row.data(), beta_, lo, hi);
    kernels::fast::shift(nxt_.data(), lo, hi, mx);
  } else {
    mx = kernels::ref::row_step(cur_.data(), i, nxt_.data(), omega_row.data(), beta_, lo, hi);
    for (int j = 0; j <= i; ++j) nxt_[j] -= mx;
  }
  log_scale_ += mx;
  std::swap(cur_, nxt_);
  lo_ = lo;
  hi_ = hi;
}

double TransferMatrix::log_Z() const {
  if (empty_) return kLogZero;
  if (beta_ == 0.0 && !clipped_) return 0.0;
  return log_scale_ + log_sum_exp(std::span<const double>(cur_.data() + lo_, hi_ - lo_ + 1));
}

std::vector<double> TransferMatrix::endpoint_log_weights() const {
  std::vector<double> out(static_cast<std::size_t>(steps_) + 1, kLogZero);
  if (empty_) return out;
  for (int j = lo_; j <= hi_; ++j) out[j] = cur_[j] + log_scale_;
  return out;
}

double TransferMatrix::mean_abs_endpoint() const {
  if (empty_) throw DomainError("mean_abs_endpoint: empty path set");
  double z = 0.0, s = 0.0;
  for (int j = lo_; j <= hi_; ++j) {
    double p = std::exp(cur_[j]);
    z += p;
    s += p * std::abs(2 * j - steps_);
  }
  return s / z;
}

namespace {
PartitionResult run_tm(const Environment& env, double beta, int h, Kernel kernel) {
  TransferMatrix tm(env.n, beta, h, kernel);
  for (int i = 1; i <= env.n; ++i) tm.advance(env.row(i));
  PartitionResult r;
  r.n = env.n;
  r.beta = beta;
  if (h > 0) r.restricted_h = h;
  r.log_Z = tm.log_Z();
  r.endpoint_log_weights = tm.endpoint_log_weights();
  return r;
}
}  // namespace

PartitionResult log_partition(const Environment& env, double beta, Kernel kernel) {
  if (!(beta >= 0)) throw DomainError("log_partition: beta must be nonnegative");
  return run_tm(env, beta, 0, kernel);
}

PartitionResult log_partition_restricted(const Environment& env, double beta, int h, Kernel kernel) {
  if (h <= 0) throw DomainError("log_partition_restricted: h must be positive");
  if (!(beta >= 0)) throw DomainError("log_partition_restricted: beta must be nonnegative");
  // past the cone every site is admissible; identical to the plain run
  PartitionResult r = run_tm(env, beta, h > env.n ? 0 : h, kernel);
  r.restricted_h = h;
  return r;
}

double EndpointLaw::at(int x) const {
  if (std::abs(x) > n || (x + n) % 2 != 0) return 0.0;
  return prob[(x + n) / 2];
}

double EndpointLaw::mean_abs() const {
  double s = 0.0;
  for (std::size_t j = 0; j < prob.size(); ++j) s += prob[j] * std::abs(2 * static_cast<int>(j) - n);
  return s;
}

EndpointLaw endpoint_law(const Environment& env, double beta) {
  PartitionResult r = log_partition(env, beta);
  double lz = log_sum_exp(r.endpoint_log_weights);
  EndpointLaw law;
  law.n = env.n;
  law.prob.resize(r.endpoint_log_weights.size());
  for (std::size_t j = 0; j < law.prob.size(); ++j) law.prob[j] = std::exp(r.endpoint_log_weights[j] - lz);
  return law;
}

double mean_abs_endpoint(const Environment& env, double beta) { return endpoint_law(env, beta).mean_abs(); }

double brute_force_log_partition(const Environment& env, double beta, std::optional<int> h) {
  if (env.n > 20) throw CostGuard("brute_force_log_partition: n > 20 refused (2^n paths)");
  if (h && *h < 1) throw DomainError("brute_force_log_partition: h must be positive");
  const int n = env.n;
  const int bound = h ? *h : n + 1;
  std::vector<double> energies;
  energies.reserve(std::size_t{1} << n);
  // depth-first over steps; x is the current position
  auto walk = [&](auto&& self, int i, int x, double H) -> void {
    if (i == n) {
      energies.push_back(beta * H);
      return;
    }
    for (int dx : {-1, 1}) {
      int y = x + dx;
      if (std::abs(y) >= bound) continue;
      self(self, i + 1, y, H + env.at(i + 1, y));
    }
  };
  walk(walk, 0, 0, 0.0);
  if (energies.empty()) return kLogZero;
  return log_sum_exp(energies) - n * std::numbers::ln2;
}

boost::multiprecision::cpp_int feller_max_count(int n, int r) {
  using boost::multiprecision::cpp_int;
  if (n < 1 || r < 1) throw DomainError("feller: need n >= 1 and r >= 1");
  // s_n = 2k - n with k up-steps
  cpp_int at_least = 0, exactly = 0, c = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) c = c * (n - k + 1) / k;
    int s = 2 * k - n;
    if (s >= r) at_least += c;
    if (s == r) exactly = c;
  }
  return 2 * at_least - exactly;
}

double feller_max_probability(int n, int r) {
  using boost::multiprecision::cpp_bin_float_100;
  cpp_bin_float_100 num(feller_max_count(n, r));
  cpp_bin_float_100 den = boost::multiprecision::ldexp(cpp_bin_float_100(1), n);
  return static_cast<double>(num / den);
}

StreamedRun run_streaming(const TailSpec& spec, int n, std::uint64_t seed, double beta, double k) {
  if (n < 1) throw DomainError("run_streaming: n must be at least 1");
  const bool trunc = std::isfinite(k);
  EnvRowStream rows(spec, seed);
  TransferMatrix raw(n, beta);
  std::optional<TransferMatrix> cut;
  if (trunc) cut.emplace(n, beta);
  std::vector<double> w(static_cast<std::size_t>(n) + 1), wt(w.size());
  for (int i = 1; i <= n; ++i) {
    std::span<double> row(w.data(), static_cast<std::size_t>(i) + 1);
    rows.next_row(row);
    raw.advance(row);
    if (trunc) {
      for (int j = 0; j <= i; ++j) wt[j] = truncate(w[j], k);
      cut->advance(std::span<const double>(wt.data(), static_cast<std::size_t>(i) + 1));
    }
  }
  StreamedRun out;
  out.log_Z = raw.log_Z();
  out.log_Z_truncated = trunc ? cut->log_Z() : out.log_Z;
  out.mean_abs_endpoint = raw.mean_abs_endpoint();
  return out;
}

namespace {
template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "dump format assumes little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("read_env: truncated file");
  return v;
}
constexpr char kMagic[9] = "PLENV001";
}  // namespace

void write_env(const std::string& path, const Environment& env) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_env: cannot open " + path);
  os.write(kMagic, 8);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(env.n));
  put<std::uint64_t>(os, env.seed);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(env.spec.family));
  put<double>(os, env.spec.alpha);
  put<double>(os, env.spec.c_minus);
  put<double>(os, env.spec.scale);
  put<double>(os, env.truncation.value_or(std::nan("")));
  os.write(reinterpret_cast<const char*>(env.omega.data()),
           static_cast<std::streamsize>(env.omega.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_env: write failed for " + path);
}

Environment read_env(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_env: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("read_env: bad magic in " + path);
  Environment env;
  env.n = static_cast<int>(get<std::uint32_t>(is));
  env.seed = get<std::uint64_t>(is);
  auto fam = static_cast<Family>(get<std::uint32_t>(is));
  double alpha = get<double>(is), c = get<double>(is), b = get<double>(is), k = get<double>(is);
  switch (fam) {
    case Family::StandardizedTwoSidedLomax: env.spec = TailSpec::lomax(alpha, c, b); break;
    case Family::ParetoOneSided: env.spec = TailSpec::pareto(alpha); break;
    case Family::GaussianReference: env.spec = TailSpec::gaussian(); break;
    default: throw std::runtime_error("read_env: unknown family tag");
  }
  if (!std::isnan(k)) env.truncation = k;
  env.omega.resize(Environment::cone_size(env.n));
  is.read(reinterpret_cast<char*>(env.omega.data()), static_cast<std::streamsize>(env.omega.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_env: truncated file " + path);
  return env;
}

}  // namespace polymerlab
