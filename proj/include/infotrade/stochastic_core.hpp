#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace infotrade {

// Uniform grid on [0, T] with n_steps + 1 instants; times.front() == 0 and
// times.back() == T exactly.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double maturity, std::size_t n_steps);

  double maturity() const { return maturity_; }
  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  double time(std::size_t i) const { return times_[i]; }
  std::span<const double> times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  // Nearest grid index to t.
  std::size_t nearest_index(double t) const;

 private:
  double maturity_ = 0.0;
  std::size_t n_steps_ = 0;
  double dt_ = 0.0;
  std::vector<double> times_;
};

TimeGrid make_time_grid(double maturity, std::size_t n_steps);

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream (master, a, b). Deterministic, platform independent.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t a,
                                 std::uint64_t b = 0);

// Single-owner random source. Equal (master_seed, stream_index) pairs yield
// identical sequences.
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  double normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Stream index for (session, slot). Slot 0 draws the payoff, slot i + 1
// drives the bridge of information source i.
std::uint64_t session_stream(std::uint64_t session_index, std::uint64_t slot);

struct BridgePath {
  const TimeGrid* grid = nullptr;
  std::vector<double> values;
};

// Precomputed coefficients of the exact forward recursion
//   beta_{i+1} | beta_i ~ N(beta_i * a_i, s_i^2),
//   a_i = (T - t_{i+1}) / (T - t_i),  s_i^2 = (t_{i+1} - t_i) * a_i.
class BridgeSampler {
 public:
  explicit BridgeSampler(const TimeGrid& grid);

  const TimeGrid& grid() const { return *grid_; }

  // beta at index i + 1 given beta at index i. The final step returns 0
  // without consuming a draw.
  double advance(std::size_t i, double beta, SeededRng& rng) const {
    if (i + 1 == grid_->n_steps()) return 0.0;
    return beta * decay_[i] + scale_[i] * rng.normal();
  }

  BridgePath sample(SeededRng& rng) const;

 private:
  const TimeGrid* grid_;
  std::vector<double> decay_;
  std::vector<double> scale_;
};

BridgePath sample_bridge_path(const TimeGrid& grid, SeededRng& rng);

// A priori law of the terminal cash flow: finitely many nonnegative atoms.
class PayoffMeasure {
 public:
  enum class Kind { Discrete, Gridded };

  struct Atom {
    double value;
    double prob;
  };

  PayoffMeasure() = default;

  // Probabilities in (0, 1], summing to 1 within 1e-12.
  static PayoffMeasure discrete(std::vector<Atom> atoms);
  // Increasing nonnegative nodes with nonnegative weights summing to 1.
  static PayoffMeasure gridded(std::vector<double> nodes,
                               std::vector<double> weights);
  // Trapezoid discretization of a density sampled on the nodes; weights are
  // normalized to sum to one.
  static PayoffMeasure from_density(std::vector<double> nodes,
                                    std::span<const double> density);
  // X = 1 with probability p, 0 otherwise.
  static PayoffMeasure binary(double p);

  Kind kind() const { return kind_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> log_probs() const { return log_probs_; }
  std::size_t size() const { return values_.size(); }

  double mean() const;
  double min_value() const { return min_; }
  double max_value() const { return max_; }

  // Inverse-CDF lookup for a uniform draw in [0, 1).
  double quantile(double u) const;

 private:
  void finalize();

  Kind kind_ = Kind::Discrete;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
  std::vector<double> cdf_;
  double min_ = 0.0;
  double max_ = 0.0;
};

double sample_payoff(const PayoffMeasure& measure, SeededRng& rng);

struct InformationPath {
  const TimeGrid* grid = nullptr;
  double flow_rate = 0.0;
  std::vector<double> values;
};

// xi_t = sigma * t * x + beta_t on the bridge's grid.
InformationPath make_information_path(double x, double sigma,
                                      const BridgePath& bridge);

// sqrt(sum sigma_i^2)
double effective_flow_rate(std::span<const double> sigmas);

// (1 / sigma_eff) * sum sigma_i xi^i_t, pointwise.
InformationPath effective_information(std::span<const InformationPath> paths,
                                      std::span<const double> sigmas);

}  // namespace infotrade
