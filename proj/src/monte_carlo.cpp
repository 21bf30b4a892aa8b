#include "infotrade/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace infotrade {

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

SessionSimulator::SessionSimulator(const ScenarioConfig& config)
    : config_(&config), bridge_(config.grid) {
  config.validate();
  const auto& grid = config.grid;
  discount_to_maturity_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    discount_to_maturity_[i] = discount_factor(config.curve, grid.time(i), grid.maturity());
  }
  flow_a_ = effective_flow_rate(config.sigma_sources_a);
  flow_b_ = config.sigma_sources_b.empty() ? 0.0 : effective_flow_rate(config.sigma_sources_b);
}

double SessionSimulator::draw_payoff(std::uint64_t session_index,
                                     std::uint64_t master_seed) const {
  SeededRng rng(master_seed, session_stream(session_index, 0));
  return sample_payoff(config_->measure, rng);
}

template <typename Visitor>
void SessionSimulator::walk(std::uint64_t session_index, std::uint64_t master_seed, double x,
                            Visitor&& visit) const {
  const auto& cfg = *config_;
  const auto& grid = cfg.grid;
  const double T = grid.maturity();
  const std::size_t n_sources = cfg.sigma_sources_a.size();
  const std::size_t n_b = cfg.sigma_sources_b.size();

  std::vector<SeededRng> rngs;
  rngs.reserve(n_sources);
  for (std::size_t j = 0; j < n_sources; ++j) {
    rngs.emplace_back(master_seed, session_stream(session_index, j + 1));
  }
  std::vector<double> beta(n_sources, 0.0);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    // Weighted bridge sums over A's sources and over B's prefix.
    double noise_b = 0.0;
    for (std::size_t j = 0; j < n_b; ++j) noise_b += cfg.sigma_sources_a[j] * beta[j];
    double noise_a = noise_b;
    for (std::size_t j = n_b; j < n_sources; ++j) noise_a += cfg.sigma_sources_a[j] * beta[j];

    double s_a = 0.0;
    double s_b = 0.0;
    if (i < grid.n_steps()) {
      const double P = discount_to_maturity_[i];
      const double xi_a = flow_a_ > 0.0 ? flow_a_ * t * x + noise_a / flow_a_ : 0.0;
      const double xi_b = flow_b_ > 0.0 ? flow_b_ * t * x + noise_b / flow_b_ : 0.0;
      s_a = information_price_discounted(xi_a, t, flow_a_, T, cfg.measure, P);
      s_b = information_price_discounted(xi_b, t, flow_b_, T, cfg.measure, P);
    }
    if (!visit(i, s_a, s_b)) break;
    if (i < grid.n_steps()) {
      for (std::size_t j = 0; j < n_sources; ++j) beta[j] = bridge_.advance(i, beta[j], rngs[j]);
    }
  }
}

SessionResult SessionSimulator::simulate(std::uint64_t session_index,
                                         std::uint64_t master_seed) const {
  const double x = draw_payoff(session_index, master_seed);
  TradingSession session(*config_, x);
  walk(session_index, master_seed, x, [&](std::size_t i, double s_a, double s_b) {
    return session.observe(i, s_a, s_b);
  });
  return session.result();
}

SimulatedPaths SessionSimulator::paths(std::uint64_t session_index,
                                       std::uint64_t master_seed) const {
  SimulatedPaths out;
  out.price_a.resize(config_->grid.size());
  out.price_b.resize(config_->grid.size());
  out.x = draw_payoff(session_index, master_seed);
  walk(session_index, master_seed, out.x, [&](std::size_t i, double s_a, double s_b) {
    out.price_a[i] = s_a;
    out.price_b[i] = s_b;
    return true;
  });
  return out;
}

std::vector<SessionResult> run_sessions(const ScenarioConfig& config, std::uint64_t n_sessions,
                                        std::uint64_t master_seed, unsigned workers) {
  if (n_sessions == 0) throw std::invalid_argument("n_sessions must be at least 1");
  const SessionSimulator sim(config);
  std::vector<SessionResult> out(n_sessions);
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::uint64_t s = 0; s < n_sessions; ++s) out[s] = sim.simulate(s, master_seed);
    return out;
  }
  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= n_sessions) return;
      const std::uint64_t end = std::min(n_sessions, begin + kChunk);
      for (std::uint64_t s = begin; s < end; ++s) out[s] = sim.simulate(s, master_seed);
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return out;
}

McEstimate mean_and_se(const std::vector<double>& xs) {
  McEstimate r;
  if (xs.empty()) return r;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double v : xs) sum += v;
  r.estimate = sum / n;
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double v : xs) ss += (v - r.estimate) * (v - r.estimate);
  r.se = std::sqrt(ss / (n - 1.0) / n);
  return r;
}

Histogram make_trade_time_histogram(const std::vector<SessionResult>& sessions,
                                    double maturity, std::size_t n_bins) {
  if (n_bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b) {
    h.bin_edges[b] = maturity * static_cast<double>(b) / static_cast<double>(n_bins);
  }
  h.bin_edges.back() = maturity;
  h.counts.assign(n_bins, 0);
  for (const auto& s : sessions) {
    for (const auto& e : s.trades) {
      auto b = static_cast<std::size_t>(e.time / maturity * static_cast<double>(n_bins));
      b = std::min(b, n_bins - 1);
      ++h.counts[b];
    }
  }
  return h;
}

BatchStats summarize(const ScenarioConfig& config, const std::vector<SessionResult>& sessions,
                     std::size_t n_bins) {
  BatchStats st;
  st.n_sessions = sessions.size();
  if (sessions.empty()) return st;
  std::vector<double> h(sessions.size()), inv(sessions.size());
  double trades_total = 0.0;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const auto& r = sessions[s];
    h[s] = r.h_a_0;
    inv[s] = r.max_abs_inventory;
    if (!r.no_trade) ++st.n_traded_sessions;
    st.n_trades += r.trades.size();
    for (const auto& e : r.trades) st.n_ties += e.tie ? 1 : 0;
    trades_total += static_cast<double>(r.trades.size());
  }
  const auto hs = mean_and_se(h);
  st.mean_H_A_0 = hs.estimate;
  st.se_H_A_0 = hs.se;
  const auto is = mean_and_se(inv);
  st.mean_max_abs_inventory = is.estimate;
  st.se_max_abs_inventory = is.se;
  const double n = static_cast<double>(sessions.size());
  st.mean_trade_count = trades_total / n;
  if (st.n_trades > 0) {
    const double mean_count = st.mean_trade_count;
    const double ratio = hs.estimate / mean_count;
    st.mean_per_trade_profit = ratio;
    std::vector<double> z(sessions.size());
    for (std::size_t s = 0; s < sessions.size(); ++s) {
      z[s] = h[s] - ratio * static_cast<double>(sessions[s].trades.size());
    }
    st.se_per_trade = mean_and_se(z).se / mean_count;
  }
  st.trade_time_histogram = make_trade_time_histogram(sessions, config.grid.maturity(), n_bins);
  return st;
}

BatchStats run_batch(const ScenarioConfig& config, std::uint64_t n_sessions,
                     std::uint64_t master_seed, unsigned workers, std::size_t n_bins) {
  return summarize(config, run_sessions(config, n_sessions, master_seed, workers), n_bins);
}

Histogram trade_time_histogram(const ScenarioConfig& config, std::size_t n_bins,
                               std::uint64_t n_sessions, std::uint64_t master_seed,
                               unsigned workers) {
  if (n_bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  return make_trade_time_histogram(run_sessions(config, n_sessions, master_seed, workers),
                                   config.grid.maturity(), n_bins);
}

ScenarioConfig sweep_cell_config(const ScenarioConfig& base, double phi, double sigma_b,
                                 double sigma_ratio) {
  if (!(sigma_ratio > 1.0)) throw std::invalid_argument("sigma_ratio must exceed 1");
  if (!(sigma_b > 0.0)) throw std::invalid_argument("sigma_b values must be positive");
  ScenarioConfig c = base;
  c.phi = phi;
  c.sigma_sources_b = {sigma_b};
  c.sigma_sources_a = {sigma_b, sigma_b * std::sqrt(sigma_ratio * sigma_ratio - 1.0)};
  c.validate();
  return c;
}

SweepResult sweep(const ScenarioConfig& base_config, const std::vector<double>& phi_values,
                  const std::vector<double>& sigma_b_values, double sigma_ratio,
                  std::uint64_t n_sessions, std::uint64_t master_seed, unsigned workers) {
  if (phi_values.empty() || sigma_b_values.empty()) {
    throw std::invalid_argument("sweep: value lists must be nonempty");
  }
  SweepResult out{phi_values, sigma_b_values, {}};
  out.cells.resize(phi_values.size());
  for (std::size_t i = 0; i < phi_values.size(); ++i) {
    for (double sb : sigma_b_values) {
      const ScenarioConfig cell = sweep_cell_config(base_config, phi_values[i], sb, sigma_ratio);
      out.cells[i].push_back(run_batch(cell, n_sessions, master_seed, workers));
    }
  }
  return out;
}

McEstimate estimate_scenario2_bound_mc(double phi, double p, double sigma, double t,
                                       double maturity, std::uint64_t n_draws,
                                       std::uint64_t master_seed, const DiscountCurve& curve) {
  if (n_draws < 10000) throw std::invalid_argument("n_draws must be at least 10^4");
  if (!(phi > 1.0)) throw std::invalid_argument("phi must be greater than 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  if (!(t > 0.0 && t < maturity)) throw std::invalid_argument("t must lie in (0, T)");
  const double P_0t = discount_factor(curve, 0.0, t);
  const double s_b = discount_factor(curve, t, maturity) * p;
  const double sd = std::sqrt(t * (maturity - t) / maturity);
  SeededRng rng(master_seed, 0);
  std::vector<double> samples(n_draws);
  for (std::uint64_t k = 0; k < n_draws; ++k) {
    const double x = rng.uniform() < p ? 1.0 : 0.0;
    const double xi = sigma * t * x + sd * rng.normal();
    const double s_a = binary_bond_mid(xi, t, sigma, maturity, p, curve);
    double v = 0.0;
    if (phi * s_a <= s_b / phi) v += (phi - 1.0) * s_a;
    if (s_a / phi >= phi * s_b) v += (1.0 - 1.0 / phi) * s_a;
    samples[k] = P_0t * v;
  }
  return mean_and_se(samples);
}

}  // namespace infotrade
