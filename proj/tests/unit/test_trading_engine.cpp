#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "infotrade/trading_engine.hpp"

using namespace infotrade;

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-13));
  CHECK(normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
  CHECK(normal_cdf(9.0) == 1.0);
}

TEST_CASE("crossing detection") {
  const double phi = 1.02;
  std::vector<Quote> a(8), b(8);
  for (std::size_t i = 0; i < 8; ++i) a[i] = b[i] = make_quote(0.8, phi, 1.0);
  CHECK_FALSE(detect_first_crossing(a, b, 0));

  // A's mid reaches phi^2 times B's at index 4 and stays there.
  for (std::size_t i = 4; i < 8; ++i) a[i] = make_quote(0.8 * phi * phi, phi, 1.0);
  auto c = detect_first_crossing(a, b, 0);
  REQUIRE(c);
  CHECK(c->index == 4);
  CHECK(c->side == Side::Buy);
  CHECK_FALSE(c->tie);
  CHECK(detect_first_crossing(a, b, 5)->index == 5);
  CHECK_FALSE(detect_first_crossing(a, b, 0, 3));

  // Crossing only at the final instant (T) never counts.
  std::vector<Quote> a2(a.size(), make_quote(0.8, phi, 1.0));
  a2.back() = make_quote(5.0, phi, 1.0);
  CHECK_FALSE(detect_first_crossing(a2, b, 0));

  // Sell side.
  std::vector<Quote> a3(a.size(), make_quote(0.8, phi, 1.0));
  a3[2] = make_quote(0.8 / (phi * phi) * 0.999, phi, 1.0);
  c = detect_first_crossing(a3, b, 0);
  REQUIRE(c);
  CHECK(c->index == 2);
  CHECK(c->side == Side::Sell);

  std::vector<Quote> short_b(3);
  CHECK_THROWS_AS(detect_first_crossing(a, short_b, 0), std::invalid_argument);
}

TEST_CASE("simultaneous crossing resolves to buy and is flagged") {
  const Quote a{1.0, 1.0, 2.0, 0.5};  // overshot book: bid above offer
  const Quote b{1.0, 1.0, 1.0, 1.0};
  const auto c = crossing_at(a, b, 3);
  REQUIRE(c);
  CHECK(c->side == Side::Buy);
  CHECK(c->tie);
}

TEST_CASE("fixed-time trade at the geometric mean") {
  const double phi = 1.02;
  auto r = run_scenario1(0.7, 0.7, phi, 1.0, 0.5, 1.0, {});
  CHECK(r.no_trade);
  CHECK(r.h_a_t == 0.0);

  const double sb = 0.6;
  r = run_scenario1(phi * phi * sb, sb, phi, 0.0, 0.5, 1.0, {});
  REQUIRE(r.trades.size() == 1);
  CHECK(r.trades[0].side == Side::Buy);

  r = run_scenario1(sb / (phi * phi), sb, phi, 0.0, 0.5, 1.0, {});
  REQUIRE(r.trades.size() == 1);
  CHECK(r.trades[0].side == Side::Sell);
  CHECK(r.trades[0].exec_price == doctest::Approx(sb / phi).epsilon(1e-15));
  CHECK(r.h_a_t == doctest::Approx(sb / phi).epsilon(1e-15));

  const double sa = 0.5;
  r = run_scenario1(sa, phi * phi * sa, phi, 1.0, 0.5, 1.0, {});
  REQUIRE(r.trades.size() == 1);
  CHECK(r.trades[0].side == Side::Sell);
  CHECK(r.trades[0].exec_price == doctest::Approx(phi * sa).epsilon(1e-15));
  CHECK(r.h_a_t == doctest::Approx(phi * sa - 1.0).epsilon(1e-14));

  r = run_scenario1(phi * phi * sa, sa, phi, 1.0, 0.5, 1.0, {});
  REQUIRE(r.trades.size() == 1);
  CHECK(r.trades[0].side == Side::Buy);
  CHECK(r.trades[0].exec_price == doctest::Approx(phi * sa).epsilon(1e-15));
  CHECK(r.h_a_t == doctest::Approx(1.0 - phi * sa).epsilon(1e-14));
  CHECK(r.h_b_t() == -r.h_a_t);
}

TEST_CASE("fixed-time profit dominates the one-sided bound pathwise") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DiscountCurve c{0.03};
  for (int k = 0; k < 20000; ++k) {
    const double phi = 1.0 + 0.2 * u(gen) + 1e-6;
    const double sa = u(gen), sb = u(gen), x = u(gen) < 0.5 ? 0.0 : 1.0;
    const double t = 0.05 + 0.9 * u(gen);
    const auto r = run_scenario1(sa, sb, phi, x, t, 1.0, c);
    const double P = discount_factor(c, t, 1.0);
    double rhs = 0.0;
    if (phi * sa <= sb / phi) rhs += phi * sa / P - x;
    if (sa / phi >= phi * sb) rhs += x - sa / (phi * P);
    CHECK(r.h_a_t >= rhs - 1e-12);
  }
}

TEST_CASE("config validation") {
  auto c = make_default_config(5, 100);
  CHECK_NOTHROW(c.validate());
  c.psi_a = 1.03;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("psi_a") != std::string::npos);
  }
  c = make_default_config(3, 100);
  c.psi_a = 1.01;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_default_config(4, 100);
  c.max_trades = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_default_config(6, 100);
  c.max_trades = 40;
  CHECK_NOTHROW(c.validate());
  c.sigma_sources_b = {2.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_default_config(2, 100);
  CHECK_NOTHROW(c.validate());
  c.sigma_sources_b = {1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_default_config(1, 100);
  c.fixed_trade_time = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.fixed_trade_time = 0.25;
  CHECK_NOTHROW(c.validate());
  CHECK(c.fixed_trade_index() == 25);
  c = make_default_config(3, 100);
  c.fixed_trade_time = 0.25;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_default_config(7), std::invalid_argument);
}

namespace {

// Scenario 6 fixture with a constant A mid and B's mid chosen so that the
// books cross exactly on the requested sides at the requested indices.
struct Fixture {
  ScenarioConfig cfg;
  std::vector<double> path_a, path_b;
};

Fixture scripted(const std::vector<int>& eps, double phi, double psi, double sa, double bump) {
  Fixture f;
  f.cfg = make_default_config(6, 4 * eps.size() + 4);
  f.cfg.phi = phi;
  f.cfg.psi_a = f.cfg.psi_b = psi;
  f.cfg.max_trades = eps.size();
  const std::size_t n = f.cfg.grid.size();
  f.path_a.assign(n, sa);
  f.path_a.back() = 0.0;
  f.path_b.assign(n, 0.0);
  int q = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Equal quoted mids: B's info mid offsets the two skews.
    const double equal = sa * std::pow(phi * psi, -2.0 * q);
    if (i % 4 == 3 && next < eps.size()) {
      const int e = eps[next++];
      f.path_b[i] = equal * std::pow(phi, -2.0 * e) * (e > 0 ? 1.0 - bump : 1.0 + bump);
      q += e;
    } else {
      f.path_b[i] = equal;
    }
  }
  return f;
}

}  // namespace

TEST_CASE("scripted multi-trade session reproduces the trade-sequence sum") {
  const double phi = 1.02, psi = 1.01;
  const std::vector<int> eps{1, 1, 1, -1, -1, 1};
  const auto f = scripted(eps, phi, psi, 1.0, 1e-9);
  const auto r = run_session(f.cfg, f.path_a, f.path_b, 1.0);
  REQUIRE(r.trades.size() == eps.size());
  int q = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    q += eps[k];
    CHECK(sign(r.trades[k].side) == eps[k]);
    CHECK(r.trades[k].inventory_after == q);
    CHECK(r.trades[k].time_index == 4 * k + 3);
    CHECK(r.trades[k].k == k + 1);
  }
  const double expected = (1 - 1 / phi) + (1 - std::pow(phi, -2) / psi) +
                          (1 - std::pow(phi, -3) * std::pow(psi, -2)) -
                          (1 - std::pow(phi, -2) * std::pow(psi, -3)) -
                          (1 - std::pow(phi, -1) * std::pow(psi, -2)) +
                          (1 - std::pow(phi, -2) / psi);
  CHECK(r.h_a_t == doctest::Approx(expected).epsilon(1e-13));
  CHECK(lemma3_sum(eps, phi, psi) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(r.max_abs_inventory == 3);
  CHECK(r.h_b_t() == -r.h_a_t);
}

TEST_CASE("re-equalization after each trade") {
  const double phi = 1.05;
  const std::vector<int> eps{1, -1, -1, 1, 1};
  for (double psi : {1.0, 1.02}) {
    const auto f = scripted(eps, phi, psi, 0.9, 1e-12);
    const auto r = run_session(f.cfg, f.path_a, f.path_b, 0.0);
    REQUIRE(r.trades.size() == eps.size());
    for (const auto& e : r.trades) {
      const int s = sign(e.side);
      CHECK(e.a_mid_after == doctest::Approx(e.exec_price * std::pow(psi, -s)).epsilon(1e-12));
      CHECK(e.b_mid_after ==
            doctest::Approx(e.counterparty_price * std::pow(psi, s)).epsilon(1e-12));
      // At an exact boundary hit both sides of the trade print one price.
      CHECK(e.exec_price == doctest::Approx(e.counterparty_price).epsilon(1e-10));
      if (psi == 1.0) CHECK(e.a_mid_after == doctest::Approx(e.b_mid_after).epsilon(1e-10));
    }
  }
}

TEST_CASE("single-trade session accounting") {
  auto cfg = make_default_config(3, 10);
  cfg.curve.short_rate = 0.05;
  const double phi = cfg.phi;
  std::vector<double> a(11, 0.5), b(11, 0.5);
  a.back() = b.back() = 0.0;
  for (std::size_t i = 6; i < 10; ++i) a[i] = 0.5 * phi * phi * 1.001;
  const auto r = run_session(cfg, a, b, 1.0);
  REQUIRE(r.trades.size() == 1);
  const auto& e = r.trades[0];
  CHECK(e.time_index == 6);
  CHECK(e.side == Side::Buy);
  CHECK(e.exec_price == doctest::Approx(a[6] / phi).epsilon(1e-15));
  const double t = cfg.grid.time(6);
  CHECK(r.h_a_t == doctest::Approx(1.0 - std::exp(0.05 * (1.0 - t)) * a[6] / phi).epsilon(1e-13));
  CHECK(r.h_a_0 == doctest::Approx(std::exp(-0.05) * r.h_a_t).epsilon(1e-14));

  // Equal paths never trade.
  const auto none = run_session(cfg, b, b, 1.0);
  CHECK(none.no_trade);
  CHECK(none.trades.empty());
  CHECK(none.h_a_t == 0.0);

  // A crossing at the last interior instant trades unless excluded.
  std::vector<double> late = b;
  late[9] = 0.5 * phi * phi * 1.001;
  CHECK(run_session(cfg, late, b, 1.0).trades.size() == 1);
  cfg.trade_at_last_instant = false;
  CHECK(run_session(cfg, late, b, 1.0).trades.empty());

  CHECK_THROWS_AS(run_session(cfg, std::vector<double>(5, 0.5), b, 1.0), std::invalid_argument);
}

TEST_CASE("trading session rejects out-of-order execution") {
  auto cfg = make_default_config(6, 10);
  TradingSession s(cfg, 1.0);
  s.execute(4, 0.5, 0.5, Side::Buy, false);
  CHECK_THROWS_AS(s.execute(4, 0.5, 0.5, Side::Buy, false), std::invalid_argument);
  CHECK_THROWS_AS(s.execute(2, 0.5, 0.5, Side::Sell, false), std::invalid_argument);
}

TEST_CASE("fixed-time thresholds") {
  const auto th = scenario2_thresholds(1.02, 0.8, 1.0, 0.5, 1.0);
  CHECK(th.sell_threshold == doctest::Approx(0.5 * std::log(0.2 / 0.2404) + 0.25).epsilon(1e-14));
  REQUIRE(th.buy_threshold);
  CHECK_FALSE(scenario2_thresholds(1.2, 0.8, 1.0, 0.5, 1.0).buy_threshold);
  CHECK_THROWS_AS(scenario2_thresholds(1.02, 0.8, 0.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scenario2_thresholds(1.02, 0.8, 1.0, 0.0, 1.0), std::invalid_argument);

  // At each threshold the corresponding books touch exactly.
  const double phi = 1.02, p = 0.8, sb = 0.8;
  const double a_sell = binary_bond_mid(th.sell_threshold, 0.5, 1.0, 1.0, p, {});
  CHECK(phi * a_sell == doctest::Approx(sb / phi).epsilon(1e-12));
  const double a_buy = binary_bond_mid(*th.buy_threshold, 0.5, 1.0, 1.0, p, {});
  CHECK(a_buy / phi == doctest::Approx(phi * sb).epsilon(1e-12));
}

TEST_CASE("fixed-time lower bound is positive") {
  for (double phi : {1.001, 1.05, 1.1, 1.2}) {
    for (double p : {0.06, 0.3, 0.5, 0.8, 0.94}) {
      for (double sigma : {0.26, 1.0, 3.9}) {
        for (double t : {0.1, 0.5, 0.9}) {
          CHECK(scenario2_lower_bound(phi, p, sigma, t, 1.0, 1.0) > 0.0);
        }
      }
    }
  }
  CHECK(scenario2_lower_bound(1.02, 0.8, 1.0, 0.5, 1.0, 0.5) ==
        doctest::Approx(0.5 * scenario2_lower_bound(1.02, 0.8, 1.0, 0.5, 1.0, 1.0)));
}

TEST_CASE("trade-sequence sums") {
  const std::vector<int> up{1};
  CHECK(lemma3_sum(up, 1.02, 1.0) == doctest::Approx(1 - 1 / 1.02).epsilon(1e-15));
  CHECK(lemma3_sum(up, 1.02, 1.0) == doctest::Approx(0.0196078431372549));
  const std::vector<int> down{-1};
  CHECK(lemma3_sum(down, 1.02, 1.0) == doctest::Approx(1.02 - 1).epsilon(1e-13));
  const std::vector<int> round{1, -1};
  for (double psi : {1.0, 1.005, 1.019}) {
    CHECK(lemma3_sum(round, 1.02, psi) == doctest::Approx(1 / psi - 1 / 1.02).epsilon(1e-12));
  }
  const std::vector<int> bad{1, 0};
  CHECK_THROWS_AS(lemma3_sum(bad, 1.02, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lemma3_sum(std::vector<int>{}, 1.02, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lemma3_sum(up, 1.02, 1.02), std::invalid_argument);
}

TEST_CASE("exhaustive scan") {
  auto r = lemma3_scan(10, 1.02, 1.01);
  CHECK(r.sequences == 2046);
  CHECK(r.min_value > 0.0);

  r = lemma3_scan(1, 1.02, 1.0);
  CHECK(r.sequences == 2);
  CHECK(r.min_value == doctest::Approx(1 - 1 / 1.02).epsilon(1e-15));
  CHECK(r.argmin == std::vector<int>{1});

  // Brute force over the 14 sequences of length <= 3.
  double brute = 1e300;
  std::size_t count = 0;
  for (int len = 1; len <= 3; ++len) {
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<int> s;
      for (int k = len - 1; k >= 0; --k) s.push_back((mask >> k) & 1 ? 1 : -1);
      brute = std::min(brute, lemma3_sum(s, 1.1, 1.0));
      ++count;
    }
  }
  std::size_t visited = 0;
  std::vector<std::uint64_t> codes;
  r = lemma3_scan(3, 1.1, 1.0, [&](std::uint64_t code, std::span<const int> seq, double v) {
    ++visited;
    codes.push_back(code);
    CHECK(v == doctest::Approx(lemma3_sum(seq, 1.1, 1.0)).epsilon(1e-14));
    std::uint64_t want = 1;
    for (int e : seq) want = (want << 1) | (e > 0 ? 1u : 0u);
    CHECK(code == want);
  });
  CHECK(count == 14);
  CHECK(visited == 14);
  CHECK(r.min_value == doctest::Approx(brute).epsilon(1e-14));
  std::sort(codes.begin(), codes.end());
  for (std::size_t i = 0; i < codes.size(); ++i) CHECK(codes[i] == i + 2);

  CHECK_THROWS_AS(lemma3_scan(26, 1.02, 1.01), std::invalid_argument);
  CHECK_THROWS_AS(lemma3_scan(0, 1.02, 1.01), std::invalid_argument);
}

TEST_CASE("scan positivity over a parameter lattice") {
  for (double phi : {1.001, 1.01, 1.05, 1.1, 1.3}) {
    for (double frac : {0.0, 0.25, 0.5, 0.9, 0.99}) {
      const double psi = 1.0 + frac * (phi - 1.0);
      CHECK(lemma3_scan(12, phi, psi).min_value > 0.0);
    }
  }
}
