#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "infotrade/pricing.hpp"
#include "infotrade/stochastic_core.hpp"

namespace infotrade {

// Standard normal distribution function.
double normal_cdf(double x);

enum class Side : int { Buy = 1, Sell = -1 };

inline int sign(Side s) { return static_cast<int>(s); }

struct ScenarioConfig {
  int scenario_id = 3;
  double phi = 1.02;
  double psi_a = 1.0;
  double psi_b = 1.0;
  std::size_t max_trades = 1;
  // Scenarios 1 and 2 only; T / 2 when unset.
  std::optional<double> fixed_trade_time;
  PayoffMeasure measure = PayoffMeasure::binary(0.8);
  std::vector<double> sigma_sources_a{1.0, 1.0};
  std::vector<double> sigma_sources_b{1.0};
  DiscountCurve curve;
  TimeGrid grid = TimeGrid(1.0, 5000);
  // Whether a crossing at the last instant before T executes.
  bool trade_at_last_instant = true;

  // Throws std::invalid_argument naming the offending parameter.
  void validate() const;

  TraderSpec trader_a() const { return {sigma_sources_a, psi_a, "A"}; }
  TraderSpec trader_b() const { return {sigma_sources_b, psi_b, "B"}; }

  // Grid index of the fixed trade time (scenarios 1 and 2).
  std::size_t fixed_trade_index() const;
  // Last grid index at which a trade may execute.
  std::size_t last_trade_index() const;
};

// Trade caps: 1 for scenarios 1-3, 2 for scenarios 4-5, 10 for scenario 6.
std::size_t default_max_trades(int scenario_id);

// Defaults for a scenario: binary bond p = 0.8, r = 0, T = 1,
// phi = 1.02, sigma_B = 1, sigma_A = sqrt(2) (two unit sources).
ScenarioConfig make_default_config(int scenario_id, std::size_t n_steps = 5000);

struct TradeEvent {
  std::size_t k = 0;             // 1-based ordinal
  std::size_t time_index = 0;
  double time = 0.0;
  Side side = Side::Buy;         // from A's point of view
  double exec_price = 0.0;
  int inventory_after = 0;
  bool tie = false;              // both sides crossed at this index
  // Quoted mids immediately after the trade.
  double a_mid_after = 0.0;
  double b_mid_after = 0.0;
  // B's side of the book at execution (offer when A buys, bid when A sells).
  double counterparty_price = 0.0;
};

struct SessionResult {
  double realized_x = 0.0;
  std::vector<TradeEvent> trades;
  double h_a_t = 0.0;
  double h_a_0 = 0.0;
  bool no_trade = true;
  int max_abs_inventory = 0;

  double h_b_t() const { return -h_a_t; }
};

struct Crossing {
  std::size_t index = 0;
  Side side = Side::Buy;
  bool tie = false;
};

// Crossing test at one instant: A buys when bid_A >= offer_B, sells when
// offer_A <= bid_B. Simultaneous crossings resolve to Buy with tie = true.
std::optional<Crossing> crossing_at(const Quote& a, const Quote& b, std::size_t index);

// First index in [start, last] where the books cross. `last` defaults to
// the final interior instant (size - 2).
std::optional<Crossing> detect_first_crossing(std::span<const Quote> quotes_a,
                                              std::span<const Quote> quotes_b,
                                              std::size_t start_index,
                                              std::optional<std::size_t> last_index = {});

// Fixed-time trade at the geometric mean of the mids.
SessionResult run_scenario1(double s_a, double s_b, double phi, double x, double t,
                            double maturity, const DiscountCurve& curve);

// Incremental game master. Feed grid instants in order via observe();
// it stops accepting trades once the cap or the last tradable index is hit.
class TradingSession {
 public:
  TradingSession(const ScenarioConfig& config, double x);

  // Returns true while further trades are possible.
  bool observe(std::size_t index, double s_a, double s_b);

  // Executes a trade at `index` on the given side. Used by array-based
  // drivers that locate the crossing themselves.
  void execute(std::size_t index, double s_a, double s_b, Side side, bool tie);

  bool finished() const { return finished_; }
  int inventory() const { return inventory_; }
  double skew_a() const { return skew_a_; }
  double skew_b() const { return skew_b_; }
  Quote quote_a(double s_a) const { return make_quote(s_a, config_->phi, skew_a_); }
  Quote quote_b(double s_b) const { return make_quote(s_b, config_->phi, skew_b_); }

  SessionResult result() const;

 private:
  void update_skews();

  const ScenarioConfig* config_;
  double x_;
  double discount_0t_;
  std::size_t fixed_index_ = 0;
  std::size_t last_index_ = 0;
  int inventory_ = 0;
  int max_abs_inventory_ = 0;
  double skew_a_ = 1.0;
  double skew_b_ = 1.0;
  double h_a_t_ = 0.0;
  bool finished_ = false;
  std::vector<TradeEvent> trades_;
};

// Runs one session over precomputed price paths (one entry per grid instant).
SessionResult run_session(const ScenarioConfig& config, std::span<const double> price_path_a,
                          std::span<const double> price_path_b, double x);

struct Scenario2Thresholds {
  double sell_threshold = 0.0;
  std::optional<double> buy_threshold;  // present iff phi^2 p < 1
};

Scenario2Thresholds scenario2_thresholds(double phi, double p, double sigma, double t,
                                         double maturity);

// Closed-form lower bound on A's value for the binary bond against an
// uninformed counterparty; the buy term vanishes when phi^2 p >= 1.
double scenario2_lower_bound(double phi, double p, double sigma, double t, double maturity,
                             double discount_0t_maturity);

// sum_k e_k (1 - phi^-Q_k psi^-Q_{k-1}), Q_k = e_1 + ... + e_k.
double lemma3_sum(std::span<const int> epsilons, double phi, double psi);

struct Lemma3ScanResult {
  double min_value = 0.0;
  std::vector<int> argmin;
  std::uint64_t sequences = 0;
};

// Callback receives (code, sequence, value). The code is the integer whose
// binary digits are 1 followed by (e_k + 1) / 2.
using Lemma3Visitor =
    std::function<void(std::uint64_t code, std::span<const int> sequence, double value)>;

constexpr std::size_t kLemma3MaxLength = 25;

// Exhaustive scan over all +-1 sequences of length 1..max_len.
Lemma3ScanResult lemma3_scan(std::size_t max_len, double phi, double psi,
                             const Lemma3Visitor& visit = {});

}  // namespace infotrade
