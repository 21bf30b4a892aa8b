#pragma once

#include <cstdint>
#include <vector>

#include "infotrade/stochastic_core.hpp"
#include "infotrade/trading_engine.hpp"

namespace infotrade {

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
};

struct BatchStats {
  std::uint64_t n_sessions = 0;
  std::uint64_t n_traded_sessions = 0;
  std::uint64_t n_trades = 0;
  std::uint64_t n_ties = 0;
  double mean_H_A_0 = 0.0;
  double se_H_A_0 = 0.0;
  // Ratio estimator sum(H_A_0) / sum(trades); the standard error accounts
  // for trades clustering within sessions.
  double mean_per_trade_profit = 0.0;
  double se_per_trade = 0.0;
  double mean_trade_count = 0.0;
  double mean_max_abs_inventory = 0.0;
  double se_max_abs_inventory = 0.0;
  Histogram trade_time_histogram;
};

struct SimulatedPaths {
  double x = 0.0;
  std::vector<double> price_a;
  std::vector<double> price_b;
};

// Per-configuration tables shared by all sessions of a batch. Session i
// draws its payoff from stream session_stream(i, 0) and the bridge of
// source j from session_stream(i, j + 1), so results do not depend on which
// worker runs the session.
class SessionSimulator {
 public:
  explicit SessionSimulator(const ScenarioConfig& config);

  const ScenarioConfig& config() const { return *config_; }

  // Streams the session and stops as soon as no further trade is possible.
  SessionResult simulate(std::uint64_t session_index, std::uint64_t master_seed) const;

  // Full price paths of both traders for the same randomness.
  SimulatedPaths paths(std::uint64_t session_index, std::uint64_t master_seed) const;

 private:
  double draw_payoff(std::uint64_t session_index, std::uint64_t master_seed) const;

  template <typename Visitor>
  void walk(std::uint64_t session_index, std::uint64_t master_seed, double x,
            Visitor&& visit) const;

  const ScenarioConfig* config_;
  BridgeSampler bridge_;
  std::vector<double> discount_to_maturity_;
  double flow_a_ = 0.0;
  double flow_b_ = 0.0;
};

// One SessionResult per session, in session-index order. `workers` is an
// execution hint; outputs are identical for any value.
std::vector<SessionResult> run_sessions(const ScenarioConfig& config, std::uint64_t n_sessions,
                                        std::uint64_t master_seed, unsigned workers = 1);

BatchStats summarize(const ScenarioConfig& config, const std::vector<SessionResult>& sessions,
                     std::size_t n_bins = 50);

BatchStats run_batch(const ScenarioConfig& config, std::uint64_t n_sessions,
                     std::uint64_t master_seed, unsigned workers = 1, std::size_t n_bins = 50);

// Bins partition [0, T]; counts cover every executed trade.
Histogram make_trade_time_histogram(const std::vector<SessionResult>& sessions,
                                    double maturity, std::size_t n_bins);

Histogram trade_time_histogram(const ScenarioConfig& config, std::size_t n_bins,
                               std::uint64_t n_sessions, std::uint64_t master_seed,
                               unsigned workers = 1);

struct SweepResult {
  std::vector<double> phi_values;
  std::vector<double> sigma_values;
  std::vector<std::vector<BatchStats>> cells;  // [phi][sigma]
};

// Config for one sweep cell: spread phi, sigma_B = sigma_b and
// sigma_A = sigma_ratio * sigma_b, realized as sources
// B = [sigma_b], A = [sigma_b, sigma_b * sqrt(ratio^2 - 1)].
ScenarioConfig sweep_cell_config(const ScenarioConfig& base, double phi, double sigma_b,
                                 double sigma_ratio);

// Every cell reuses the same master seed, hence the same session outcomes.
SweepResult sweep(const ScenarioConfig& base_config, const std::vector<double>& phi_values,
                  const std::vector<double>& sigma_b_values, double sigma_ratio,
                  std::uint64_t n_sessions, std::uint64_t master_seed, unsigned workers = 1);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

// Monte Carlo estimate of the fixed-time lower-bound expression for the
// binary bond against an uninformed counterparty: draws X, then xi_t, and
// evaluates both traders' quotes directly.
McEstimate estimate_scenario2_bound_mc(double phi, double p, double sigma, double t,
                                       double maturity, std::uint64_t n_draws,
                                       std::uint64_t master_seed,
                                       const DiscountCurve& curve = {});

// Sample mean and standard error.
McEstimate mean_and_se(const std::vector<double>& xs);

}  // namespace infotrade
