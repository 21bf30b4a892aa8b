#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infotrade/monte_carlo.hpp"
#include "infotrade/pricing.hpp"
#include "infotrade/stochastic_core.hpp"
#include "infotrade/trading_engine.hpp"

namespace py = pybind11;
using namespace infotrade;

namespace {

PayoffMeasure measure_from_atoms(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<PayoffMeasure::Atom> a;
  a.reserve(atoms.size());
  for (const auto& [v, p] : atoms) a.push_back({v, p});
  return PayoffMeasure::discrete(std::move(a));
}

py::dict stats_to_dict(const BatchStats& s) {
  py::dict d;
  d["n_sessions"] = s.n_sessions;
  d["n_traded_sessions"] = s.n_traded_sessions;
  d["n_trades"] = s.n_trades;
  d["n_ties"] = s.n_ties;
  d["mean_H_A_0"] = s.mean_H_A_0;
  d["se_H_A_0"] = s.se_H_A_0;
  d["mean_per_trade_profit"] = s.mean_per_trade_profit;
  d["se_per_trade"] = s.se_per_trade;
  d["mean_trade_count"] = s.mean_trade_count;
  d["mean_max_abs_inventory"] = s.mean_max_abs_inventory;
  d["se_max_abs_inventory"] = s.se_max_abs_inventory;
  d["trade_time_histogram"] = py::dict(py::arg("bin_edges") = s.trade_time_histogram.bin_edges,
                                       py::arg("counts") = s.trade_time_histogram.counts);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information-based pricing and trading simulator";

  py::class_<PayoffMeasure>(m, "PayoffMeasure")
      .def_static("binary", &PayoffMeasure::binary, py::arg("p"))
      .def_static("discrete", &measure_from_atoms, py::arg("atoms"))
      .def_static("gridded", &PayoffMeasure::gridded, py::arg("nodes"), py::arg("weights"))
      .def_property_readonly("values",
                             [](const PayoffMeasure& m) {
                               auto v = m.values();
                               return std::vector<double>(v.begin(), v.end());
                             })
      .def_property_readonly("probs",
                             [](const PayoffMeasure& m) {
                               auto v = m.probs();
                               return std::vector<double>(v.begin(), v.end());
                             })
      .def("mean", &PayoffMeasure::mean);

  py::class_<DiscountCurve>(m, "DiscountCurve")
      .def(py::init([](double r) { return DiscountCurve{r}; }), py::arg("r") = 0.0)
      .def_readwrite("short_rate", &DiscountCurve::short_rate);

  m.def("discount_factor", &discount_factor, py::arg("curve"), py::arg("t1"), py::arg("t2"));
  m.def("effective_flow_rate",
        [](const std::vector<double>& s) { return effective_flow_rate(s); }, py::arg("sigmas"));
  m.def("information_price", &information_price, py::arg("xi"), py::arg("t"), py::arg("sigma"),
        py::arg("T"), py::arg("measure"), py::arg("curve") = DiscountCurve{});
  m.def("binary_bond_mid", &binary_bond_mid, py::arg("xi"), py::arg("t"), py::arg("sigma"),
        py::arg("T"), py::arg("p"), py::arg("curve") = DiscountCurve{});
  m.def(
      "sample_bridge_path",
      [](double T, std::size_t n_steps, std::uint64_t seed, std::uint64_t stream) {
        TimeGrid grid(T, n_steps);
        SeededRng rng(seed, stream);
        return sample_bridge_path(grid, rng).values;
      },
      py::arg("T"), py::arg("n_steps"), py::arg("seed"), py::arg("stream") = 0);

  py::class_<Quote>(m, "Quote")
      .def_readonly("info_mid", &Quote::info_mid)
      .def_readonly("quoted_mid", &Quote::quoted_mid)
      .def_readonly("bid", &Quote::bid)
      .def_readonly("offer", &Quote::offer);
  m.def("quote_from_mid", &quote_from_mid, py::arg("mid"), py::arg("phi"), py::arg("psi"),
        py::arg("Q"));

  m.def("normal_cdf", &normal_cdf);
  m.def(
      "scenario2_thresholds",
      [](double phi, double p, double sigma, double t, double T) {
        const auto th = scenario2_thresholds(phi, p, sigma, t, T);
        return std::make_pair(th.sell_threshold, th.buy_threshold);
      },
      py::arg("phi"), py::arg("p"), py::arg("sigma"), py::arg("t"), py::arg("T"));
  m.def("scenario2_lower_bound", &scenario2_lower_bound, py::arg("phi"), py::arg("p"),
        py::arg("sigma"), py::arg("t"), py::arg("T"), py::arg("P_0T") = 1.0);
  m.def(
      "estimate_scenario2_bound_mc",
      [](double phi, double p, double sigma, double t, double T, std::uint64_t n,
         std::uint64_t seed) {
        const auto e = estimate_scenario2_bound_mc(phi, p, sigma, t, T, n, seed);
        return std::make_pair(e.estimate, e.se);
      },
      py::arg("phi"), py::arg("p"), py::arg("sigma"), py::arg("t"), py::arg("T"),
      py::arg("n_draws"), py::arg("seed") = 1);
  m.def(
      "lemma3_sum",
      [](const std::vector<int>& eps, double phi, double psi) { return lemma3_sum(eps, phi, psi); },
      py::arg("epsilons"), py::arg("phi"), py::arg("psi"));
  m.def(
      "lemma3_scan",
      [](std::size_t max_len, double phi, double psi) {
        const auto r = lemma3_scan(max_len, phi, psi);
        return py::make_tuple(r.min_value, r.argmin, r.sequences);
      },
      py::arg("max_len"), py::arg("phi"), py::arg("psi"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init([](int scenario, std::size_t n_steps) {
             return make_default_config(scenario, n_steps);
           }),
           py::arg("scenario") = 3, py::arg("n_steps") = 5000)
      .def_readwrite("scenario_id", &ScenarioConfig::scenario_id)
      .def_readwrite("phi", &ScenarioConfig::phi)
      .def_readwrite("psi_a", &ScenarioConfig::psi_a)
      .def_readwrite("psi_b", &ScenarioConfig::psi_b)
      .def_readwrite("max_trades", &ScenarioConfig::max_trades)
      .def_readwrite("fixed_trade_time", &ScenarioConfig::fixed_trade_time)
      .def_readwrite("measure", &ScenarioConfig::measure)
      .def_readwrite("sigma_sources_a", &ScenarioConfig::sigma_sources_a)
      .def_readwrite("sigma_sources_b", &ScenarioConfig::sigma_sources_b)
      .def_readwrite("curve", &ScenarioConfig::curve)
      .def_readwrite("trade_at_last_instant", &ScenarioConfig::trade_at_last_instant)
      .def("set_grid", [](ScenarioConfig& c, double T, std::size_t n) { c.grid = TimeGrid(T, n); },
           py::arg("T"), py::arg("n_steps"))
      .def("validate", &ScenarioConfig::validate);

  py::class_<TradeEvent>(m, "TradeEvent")
      .def_readonly("k", &TradeEvent::k)
      .def_readonly("time_index", &TradeEvent::time_index)
      .def_readonly("time", &TradeEvent::time)
      .def_property_readonly("side", [](const TradeEvent& e) { return sign(e.side); })
      .def_readonly("exec_price", &TradeEvent::exec_price)
      .def_readonly("inventory_after", &TradeEvent::inventory_after)
      .def_readonly("tie", &TradeEvent::tie);

  py::class_<SessionResult>(m, "SessionResult")
      .def_readonly("realized_x", &SessionResult::realized_x)
      .def_readonly("trades", &SessionResult::trades)
      .def_readonly("h_a_t", &SessionResult::h_a_t)
      .def_readonly("h_a_0", &SessionResult::h_a_0)
      .def_readonly("no_trade", &SessionResult::no_trade)
      .def_readonly("max_abs_inventory", &SessionResult::max_abs_inventory);

  m.def(
      "run_session",
      [](const ScenarioConfig& c, const std::vector<double>& a, const std::vector<double>& b,
         double x) { return run_session(c, a, b, x); },
      py::arg("config"), py::arg("price_a"), py::arg("price_b"), py::arg("x"));
  m.def(
      "run_batch",
      [](const ScenarioConfig& c, std::uint64_t n, std::uint64_t seed, unsigned workers) {
        BatchStats s;
        {
          py::gil_scoped_release release;
          s = run_batch(c, n, seed, workers);
        }
        return stats_to_dict(s);
      },
      py::arg("config"), py::arg("n_sessions"), py::arg("seed") = 1, py::arg("workers") = 1);
}
