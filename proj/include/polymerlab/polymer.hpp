#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polymerlab/disorder.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

// Site weights on the parity cone {(i,x): 1 <= i <= n, |x| <= i, i+x even},
// stored row by row; row i holds x = -i, -i+2, ..., i at index j = (x+i)/2.
struct Environment {
  int n = 0;
  std::uint64_t seed = 0;
  TailSpec spec;
  std::optional<double> truncation;  // set by truncated_env
  std::vector<double> omega;

  static std::size_t row_offset(int i) { return static_cast<std::size_t>(i - 1) * (i + 2) / 2; }
  static std::size_t cone_size(int n) { return row_offset(n + 1); }

  std::span<const double> row(int i) const { return {omega.data() + row_offset(i), static_cast<std::size_t>(i) + 1}; }
  std::span<double> row(int i) { return {omega.data() + row_offset(i), static_cast<std::size_t>(i) + 1}; }
  double at(int i, int x) const { return omega[row_offset(i) + (x + i) / 2]; }
  double& at(int i, int x) { return omega[row_offset(i) + (x + i) / 2]; }
};

// Produces the rows of an environment in order. The stream for seed s is
// Stream(hash64({s, kEnvStreamTag})); each row draws i+1 uniforms and maps
// them through the inverse CDF. Dense and streamed environments are
// therefore bit-identical.
class EnvRowStream {
 public:
  static constexpr std::uint64_t kEnvStreamTag = 0x656e7669726f6e;  // "environ"

  EnvRowStream(const TailSpec& spec, std::uint64_t seed);
  // Fills the next row; out.size() must be i+1 for row i.
  void next_row(std::span<double> out);
  int rows_done() const { return rows_; }

 private:
  TailSpec spec_;
  Stream rng_;
  int rows_ = 0;
};

Environment generate_env(const TailSpec& spec, int n, std::uint64_t seed);
Environment truncated_env(const Environment& env, double k);

// Sum of omega 1{omega > k} over cone sites with |x| < h.
double excess_weight(const Environment& env, double k, int h);

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// a - b for two log partition values; the log-zero value has no difference.
double log_gap(double a, double b);

struct PartitionResult {
  int n = 0;
  double beta = 0.0;
  std::optional<int> restricted_h;
  double log_Z = 0.0;
  std::vector<double> endpoint_log_weights;  // index j <-> x = 2j - n

  double endpoint_log_weight(int x) const;
};

enum class Kernel { Reference, Fast };

// Forward recursion Z_i(x) = e^{beta w(i,x)} (Z_{i-1}(x-1) + Z_{i-1}(x+1)) / 2
// in log domain, renormalised by the row maximum after every row. h > 0
// keeps only sites with |x| < h.
class TransferMatrix {
 public:
  TransferMatrix(int n_max, double beta, int h = 0, Kernel kernel = Kernel::Fast);

  void advance(std::span<const double> omega_row);

  int steps() const { return steps_; }
  bool empty() const { return empty_; }
  double log_Z() const;
  std::vector<double> endpoint_log_weights() const;
  double mean_abs_endpoint() const;

 private:
  int n_max_;
  double beta_;
  int h_;
  Kernel kernel_;
  int steps_ = 0;
  int lo_ = 0, hi_ = 0;
  bool empty_ = false;
  bool clipped_ = false;
  double log_scale_ = 0.0;
  std::vector<double> cur_, nxt_;
};

PartitionResult log_partition(const Environment& env, double beta, Kernel kernel = Kernel::Fast);
PartitionResult log_partition_restricted(const Environment& env, double beta, int h,
                                         Kernel kernel = Kernel::Fast);

struct EndpointLaw {
  int n = 0;
  std::vector<double> prob;  // index j <-> x = 2j - n

  double at(int x) const;
  double mean_abs() const;
};

EndpointLaw endpoint_law(const Environment& env, double beta);
double mean_abs_endpoint(const Environment& env, double beta);

// Exact average of e^{beta H} over all 2^n paths, optionally only those with
// max |s_i| < h. n <= 20.
double brute_force_log_partition(const Environment& env, double beta, std::optional<int> h = {});

// P(max_{i<=n} s_i >= r) = 2 P(s_n >= r) - P(s_n = r), r >= 1.
double feller_max_probability(int n, int r);
// The same as an exact path count out of 2^n.
boost::multiprecision::cpp_int feller_max_count(int n, int r);

// Raw and truncated partition functions computed while generating rows, so
// memory stays O(n). k = +inf skips the truncated pass.
struct StreamedRun {
  double log_Z = 0.0;
  double log_Z_truncated = 0.0;
  double mean_abs_endpoint = 0.0;
};
StreamedRun run_streaming(const TailSpec& spec, int n, std::uint64_t seed, double beta,
                          double k = std::numeric_limits<double>::infinity());

// Debug dump: "PLENV001", n (u32), seed (u64), family (u32), alpha, c_minus,
// scale, truncation k (nan if none), then the cone row-major, all
// little-endian.
void write_env(const std::string& path, const Environment& env);
Environment read_env(const std::string& path);

}  // namespace polymerlab
