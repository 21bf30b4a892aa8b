#include "infotrade/trading_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace infotrade {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

std::size_t default_max_trades(int scenario_id) {
  switch (scenario_id) {
    case 1:
    case 2:
    case 3:
      return 1;
    case 4:
    case 5:
      return 2;
    case 6:
      return 10;
    default:
      throw std::invalid_argument("scenario must be in 1..6, got " + std::to_string(scenario_id));
  }
}

ScenarioConfig make_default_config(int scenario_id, std::size_t n_steps) {
  ScenarioConfig c;
  c.scenario_id = scenario_id;
  c.max_trades = default_max_trades(scenario_id);
  c.grid = TimeGrid(1.0, n_steps);
  if (scenario_id == 2) {
    c.sigma_sources_a = {1.0};
    c.sigma_sources_b = {};
  }
  return c;
}

void ScenarioConfig::validate() const {
  const std::size_t cap = default_max_trades(scenario_id);
  check_spread_and_aversion(phi, psi_a, "psi_a");
  check_spread_and_aversion(phi, psi_b, "psi_b");
  if (scenario_id <= 4 && (psi_a != 1.0 || psi_b != 1.0)) {
    throw std::invalid_argument("psi_a/psi_b: inventory aversion applies to scenarios 5 and 6 only");
  }
  if (max_trades == 0) throw std::invalid_argument("max_trades must be at least 1");
  if (scenario_id != 6 && max_trades != cap) {
    std::ostringstream os;
    os << "max_trades=" << max_trades << " but scenario " << scenario_id << " allows exactly "
       << cap;
    throw std::invalid_argument(os.str());
  }
  if (grid.n_steps() < 2) throw std::invalid_argument("n_steps must be at least 2");
  if (measure.size() == 0) throw std::invalid_argument("measure: no atoms");
  if (!std::isfinite(curve.short_rate)) throw std::invalid_argument("r must be finite");
  check_nested(trader_a(), trader_b());
  if (scenario_id == 2 && trader_b().flow_rate() != 0.0) {
    throw std::invalid_argument("sigma_b: scenario 2 requires an uninformed counterparty");
  }
  if (fixed_trade_time) {
    if (scenario_id > 2) {
      throw std::invalid_argument("fixed_time applies to scenarios 1 and 2 only");
    }
    const double t = *fixed_trade_time;
    if (!(t > 0.0 && t < grid.maturity())) {
      throw std::invalid_argument("fixed_time must lie in (0, T)");
    }
  }
  if (scenario_id <= 2) {
    const std::size_t i = fixed_trade_index();
    if (i == 0 || i >= grid.n_steps()) {
      throw std::invalid_argument("fixed_time does not map to an interior grid instant");
    }
  }
}

std::size_t ScenarioConfig::fixed_trade_index() const {
  return grid.nearest_index(fixed_trade_time.value_or(0.5 * grid.maturity()));
}

std::size_t ScenarioConfig::last_trade_index() const {
  const std::size_t n = grid.n_steps();
  return trade_at_last_instant ? n - 1 : n - 2;
}

std::optional<Crossing> crossing_at(const Quote& a, const Quote& b, std::size_t index) {
  const bool buy = a.bid >= b.offer;
  const bool sell = a.offer <= b.bid;
  if (buy) return Crossing{index, Side::Buy, sell};
  if (sell) return Crossing{index, Side::Sell, false};
  return std::nullopt;
}

std::optional<Crossing> detect_first_crossing(std::span<const Quote> quotes_a,
                                              std::span<const Quote> quotes_b,
                                              std::size_t start_index,
                                              std::optional<std::size_t> last_index) {
  if (quotes_a.size() != quotes_b.size()) {
    throw std::invalid_argument("crossing: quote arrays are not aligned");
  }
  if (quotes_a.size() < 2) return std::nullopt;
  const std::size_t final_interior = quotes_a.size() - 2;
  const std::size_t last = std::min(last_index.value_or(final_interior), final_interior);
  for (std::size_t i = start_index; i <= last; ++i) {
    if (auto c = crossing_at(quotes_a[i], quotes_b[i], i)) return c;
  }
  return std::nullopt;
}

namespace {

// Geometric-mean execution at a fixed instant. Returns the trade (if any)
// and A's future-valued profit.
std::optional<TradeEvent> fixed_time_trade(double s_a, double s_b, double phi, double x,
                                           double t, std::size_t index, double discount_t_T,
                                           double& h_a_t) {
  const Quote qa = make_quote(s_a, phi, 1.0);
  const Quote qb = make_quote(s_b, phi, 1.0);
  const auto c = crossing_at(qa, qb, index);
  if (!c) return std::nullopt;
  TradeEvent e;
  e.k = 1;
  e.time_index = index;
  e.time = t;
  e.side = c->side;
  e.tie = c->tie;
  e.exec_price = std::sqrt(s_a * s_b);
  e.inventory_after = sign(c->side);
  e.a_mid_after = e.exec_price;
  e.b_mid_after = e.exec_price;
  e.counterparty_price = c->side == Side::Buy ? qb.offer : qb.bid;
  h_a_t = sign(c->side) * (x - e.exec_price / discount_t_T);
  return e;
}

}  // namespace

SessionResult run_scenario1(double s_a, double s_b, double phi, double x, double t,
                            double maturity, const DiscountCurve& curve) {
  if (!(phi > 1.0)) throw std::invalid_argument("phi must be greater than 1");
  if (!(s_a >= 0.0 && s_b >= 0.0)) throw std::invalid_argument("prices must be nonnegative");
  if (!(t >= 0.0 && t < maturity)) throw std::invalid_argument("trade time must lie in [0, T)");
  SessionResult r;
  r.realized_x = x;
  double h = 0.0;
  if (auto e = fixed_time_trade(s_a, s_b, phi, x, t, 0, discount_factor(curve, t, maturity), h)) {
    r.trades.push_back(*e);
    r.no_trade = false;
    r.max_abs_inventory = 1;
  }
  r.h_a_t = h;
  r.h_a_0 = discount_factor(curve, 0.0, maturity) * h;
  return r;
}

TradingSession::TradingSession(const ScenarioConfig& config, double x)
    : config_(&config),
      x_(x),
      discount_0t_(discount_factor(config.curve, 0.0, config.grid.maturity())),
      fixed_index_(config.scenario_id <= 2 ? config.fixed_trade_index() : 0),
      last_index_(config.last_trade_index()) {}

void TradingSession::update_skews() {
  const double phi = config_->phi;
  if (inventory_ == 0) {
    skew_a_ = skew_b_ = 1.0;
    return;
  }
  skew_a_ = std::pow(phi * config_->psi_a, -inventory_);
  skew_b_ = std::pow(phi * config_->psi_b, inventory_);
}

bool TradingSession::observe(std::size_t index, double s_a, double s_b) {
  if (finished_) return false;
  const auto& grid = config_->grid;
  if (config_->scenario_id <= 2) {
    if (index < fixed_index_) return true;
    if (index == fixed_index_) {
      const double t = grid.time(index);
      double h = 0.0;
      auto e = fixed_time_trade(s_a, s_b, config_->phi, x_, t, index,
                                discount_factor(config_->curve, t, grid.maturity()), h);
      if (e) {
        inventory_ = e->inventory_after;
        max_abs_inventory_ = 1;
        trades_.push_back(*e);
        h_a_t_ = h;
      }
    }
    finished_ = true;
    return false;
  }
  if (index > last_index_) {
    finished_ = true;
    return false;
  }
  if (auto c = crossing_at(quote_a(s_a), quote_b(s_b), index)) {
    execute(index, s_a, s_b, c->side, c->tie);
  }
  return !finished_;
}

void TradingSession::execute(std::size_t index, double s_a, double s_b, Side side, bool tie) {
  if (finished_) throw std::logic_error("trading session already finished");
  if (!trades_.empty() && index <= trades_.back().time_index) {
    throw std::invalid_argument("trade indices must be strictly increasing");
  }
  const auto& grid = config_->grid;
  const double t = grid.time(index);
  const int eps = sign(side);
  const Quote qa = quote_a(s_a);
  const Quote qb = quote_b(s_b);

  TradeEvent e;
  e.k = trades_.size() + 1;
  e.time_index = index;
  e.time = t;
  e.side = side;
  e.tie = tie;
  e.exec_price = side == Side::Buy ? qa.bid : qa.offer;
  e.counterparty_price = side == Side::Buy ? qb.offer : qb.bid;
  h_a_t_ += eps * (x_ - e.exec_price / discount_factor(config_->curve, t, grid.maturity()));

  inventory_ += eps;
  max_abs_inventory_ = std::max(max_abs_inventory_, std::abs(inventory_));
  update_skews();
  e.inventory_after = inventory_;
  e.a_mid_after = s_a * skew_a_;
  e.b_mid_after = s_b * skew_b_;
  trades_.push_back(e);
  if (trades_.size() >= config_->max_trades) finished_ = true;
}

SessionResult TradingSession::result() const {
  SessionResult r;
  r.realized_x = x_;
  r.trades = trades_;
  r.h_a_t = h_a_t_;
  r.h_a_0 = discount_0t_ * h_a_t_;
  r.no_trade = trades_.empty();
  r.max_abs_inventory = max_abs_inventory_;
  return r;
}

SessionResult run_session(const ScenarioConfig& config, std::span<const double> price_path_a,
                          std::span<const double> price_path_b, double x) {
  config.validate();
  const std::size_t n = config.grid.size();
  if (price_path_a.size() != n || price_path_b.size() != n) {
    throw std::invalid_argument("run_session: price paths must have one entry per grid instant");
  }
  TradingSession session(config, x);
  if (config.scenario_id <= 2) {
    const std::size_t i = config.fixed_trade_index();
    session.observe(i, price_path_a[i], price_path_b[i]);
    return session.result();
  }
  std::vector<Quote> qa(n), qb(n);
  std::size_t start = 0;
  while (!session.finished() && start < n) {
    for (std::size_t i = start; i < n; ++i) {
      qa[i] = session.quote_a(price_path_a[i]);
      qb[i] = session.quote_b(price_path_b[i]);
    }
    const auto c = detect_first_crossing(qa, qb, start, config.last_trade_index());
    if (!c) break;
    session.execute(c->index, price_path_a[c->index], price_path_b[c->index], c->side, c->tie);
    start = c->index + 1;
  }
  return session.result();
}

namespace {

void check_scenario2_domain(double phi, double p, double sigma, double t, double maturity) {
  if (!(phi > 1.0)) throw std::invalid_argument("phi must be greater than 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(t > 0.0 && t < maturity)) throw std::invalid_argument("t must lie in (0, T)");
}

}  // namespace

Scenario2Thresholds scenario2_thresholds(double phi, double p, double sigma, double t,
                                         double maturity) {
  check_scenario2_domain(phi, p, sigma, t, maturity);
  const double phi2 = phi * phi;
  const double scale = (maturity - t) / (sigma * maturity);
  const double drift = 0.5 * sigma * t;
  Scenario2Thresholds out;
  out.sell_threshold = scale * std::log((1.0 - p) / (phi2 - p)) + drift;
  if (phi2 * p < 1.0) {
    out.buy_threshold = scale * std::log(phi2 * (1.0 - p) / (1.0 - phi2 * p)) + drift;
  }
  return out;
}

double scenario2_lower_bound(double phi, double p, double sigma, double t, double maturity,
                             double discount_0t_maturity) {
  check_scenario2_domain(phi, p, sigma, t, maturity);
  const double phi2 = phi * phi;
  const double c = std::sqrt((maturity - t) / (t * maturity)) / sigma;
  const double d = 0.5 * sigma * std::sqrt(t * maturity / (maturity - t));
  const double scale = p * discount_0t_maturity;
  double bound = scale * (phi - 1.0) * normal_cdf(c * std::log((1.0 - p) / (phi2 - p)) - d);
  if (phi2 * p < 1.0) {
    bound += scale * (1.0 - 1.0 / phi) *
             normal_cdf(c * std::log((1.0 - phi2 * p) / (phi2 * (1.0 - p))) + d);
  }
  return bound;
}

double lemma3_sum(std::span<const int> epsilons, double phi, double psi) {
  if (epsilons.empty()) throw std::invalid_argument("lemma3: empty sequence");
  check_spread_and_aversion(phi, psi);
  int q_prev = 0;
  double total = 0.0;
  for (int e : epsilons) {
    if (e != 1 && e != -1) throw std::invalid_argument("lemma3: entries must be +1 or -1");
    const int q = q_prev + e;
    total += e * (1.0 - std::pow(phi, -q) * std::pow(psi, -q_prev));
    q_prev = q;
  }
  return total;
}

namespace {

struct Lemma3Walker {
  std::size_t max_len;
  const std::vector<double>& phi_pow;  // phi^-q at offset q + max_len
  const std::vector<double>& psi_pow;
  const Lemma3Visitor& visit;
  Lemma3ScanResult& out;
  std::vector<int> seq;

  void descend(int q_prev, double total, std::uint64_t code) {
    if (seq.size() == max_len) return;
    for (int e : {-1, 1}) {
      const int q = q_prev + e;
      const auto off = static_cast<std::ptrdiff_t>(max_len);
      const double term =
          e * (1.0 - phi_pow[static_cast<std::size_t>(q + off)] *
                         psi_pow[static_cast<std::size_t>(q_prev + off)]);
      const double value = total + term;
      const std::uint64_t next = (code << 1) | (e > 0 ? 1u : 0u);
      seq.push_back(e);
      ++out.sequences;
      if (visit) visit(next, seq, value);
      if (out.argmin.empty() || value < out.min_value) {
        out.min_value = value;
        out.argmin = seq;
      }
      descend(q, value, next);
      seq.pop_back();
    }
  }
};

}  // namespace

Lemma3ScanResult lemma3_scan(std::size_t max_len, double phi, double psi,
                             const Lemma3Visitor& visit) {
  if (max_len == 0) throw std::invalid_argument("lemma3 scan: max_len must be at least 1");
  if (max_len > kLemma3MaxLength) {
    throw std::invalid_argument("lemma3 scan: max_len " + std::to_string(max_len) +
                                " exceeds the limit of " + std::to_string(kLemma3MaxLength));
  }
  check_spread_and_aversion(phi, psi);
  // Same arithmetic as lemma3_sum, tabulated.
  std::vector<double> phi_pow(2 * max_len + 1), psi_pow(2 * max_len + 1);
  for (std::size_t i = 0; i < phi_pow.size(); ++i) {
    const int q = static_cast<int>(i) - static_cast<int>(max_len);
    phi_pow[i] = std::pow(phi, -q);
    psi_pow[i] = std::pow(psi, -q);
  }
  Lemma3ScanResult out;
  Lemma3Walker walker{max_len, phi_pow, psi_pow, visit, out, {}};
  walker.seq.reserve(max_len);
  walker.descend(0, 0.0, 1);
  return out;
}

}  // namespace infotrade
