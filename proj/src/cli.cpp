#include "infotrade/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace infotrade::cli {

using nlohmann::json;

namespace {

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

double get_number(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) key_error(key, "expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    key_error(key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> get_number_list(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_array()) key_error(key, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) key_error(key, "expected a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

PayoffMeasure parse_measure(const json& v) {
  const std::string key = "measure";
  try {
    if (v.is_array()) {
      std::vector<PayoffMeasure::Atom> atoms;
      for (const auto& a : v) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
          key_error(key, "atoms must be [value, probability] pairs");
        }
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      }
      return PayoffMeasure::discrete(std::move(atoms));
    }
    if (v.is_object() && v.contains("nodes") && v.contains("weights") && v.size() == 2) {
      return PayoffMeasure::gridded(get_number_list(v, "nodes"), get_number_list(v, "weights"));
    }
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind("config key", 0) == 0) throw;
    key_error(key, msg);
  }
  key_error(key, "expected [[value, prob], ...] or {\"nodes\": [...], \"weights\": [...]}");
}

// Builds (A sources, B sources) from the sigma_a / sigma_b entries.
void parse_sources(const json& doc, ScenarioConfig& cfg) {
  const bool has_a = doc.contains("sigma_a");
  const bool has_b = doc.contains("sigma_b");
  if (!has_a && !has_b) return;
  if (has_a != has_b) key_error(has_a ? "sigma_b" : "sigma_a", "sigma_a and sigma_b must be given together");
  const auto& va = doc.at("sigma_a");
  const auto& vb = doc.at("sigma_b");
  if (va.is_array() && vb.is_array()) {
    cfg.sigma_sources_a = get_number_list(doc, "sigma_a");
    cfg.sigma_sources_b = get_number_list(doc, "sigma_b");
    return;
  }
  if (va.is_number() && vb.is_number()) {
    const double sa = va.get<double>();
    const double sb = vb.get<double>();
    if (!(sb >= 0.0)) key_error("sigma_b", "must be nonnegative");
    if (!(sa >= sb)) key_error("sigma_a", "must be at least sigma_b (A's information contains B's)");
    cfg.sigma_sources_b = sb > 0.0 ? std::vector<double>{sb} : std::vector<double>{};
    cfg.sigma_sources_a = cfg.sigma_sources_b;
    if (sa > sb) cfg.sigma_sources_a.push_back(std::sqrt(sa * sa - sb * sb));
    return;
  }
  key_error("sigma_a", "sigma_a and sigma_b must both be numbers or both be lists");
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  static const std::set<std::string> known = {
      "scenario", "phi",      "psi_a",     "psi_b",      "p",         "measure",
      "r",        "t_maturity", "n_steps", "sessions",   "max_trades", "seed",
      "sigma_a",  "sigma_b",  "fixed_time", "trade_at_last_instant"};
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) key_error(item.key(), "unknown key");
  }
  if (!doc.contains("scenario")) key_error("scenario", "required");
  const auto scenario = get_count(doc, "scenario");
  if (scenario < 1 || scenario > 6) key_error("scenario", "must be in 1..6");

  const double maturity = doc.contains("t_maturity") ? get_number(doc, "t_maturity") : 1.0;
  const std::uint64_t n_steps = doc.contains("n_steps") ? get_count(doc, "n_steps") : 5000;
  RunConfig rc;
  try {
    rc.scenario = make_default_config(static_cast<int>(scenario), 2);
    rc.scenario.grid = TimeGrid(maturity, n_steps);
  } catch (const std::invalid_argument& e) {
    key_error(doc.contains("t_maturity") && !(maturity > 0.0) ? "t_maturity" : "n_steps", e.what());
  }
  auto& cfg = rc.scenario;
  if (doc.contains("phi")) cfg.phi = get_number(doc, "phi");
  if (doc.contains("psi_a")) cfg.psi_a = get_number(doc, "psi_a");
  if (doc.contains("psi_b")) cfg.psi_b = get_number(doc, "psi_b");
  if (doc.contains("r")) cfg.curve.short_rate = get_number(doc, "r");
  if (doc.contains("max_trades")) cfg.max_trades = get_count(doc, "max_trades");
  if (doc.contains("fixed_time")) cfg.fixed_trade_time = get_number(doc, "fixed_time");
  if (doc.contains("trade_at_last_instant")) {
    if (!doc.at("trade_at_last_instant").is_boolean()) {
      key_error("trade_at_last_instant", "expected true or false");
    }
    cfg.trade_at_last_instant = doc.at("trade_at_last_instant").get<bool>();
  }
  if (doc.contains("p") && doc.contains("measure")) key_error("measure", "give either p or measure");
  if (doc.contains("p")) {
    try {
      cfg.measure = PayoffMeasure::binary(get_number(doc, "p"));
    } catch (const std::invalid_argument&) {
      key_error("p", "must lie in (0, 1)");
    }
  }
  if (doc.contains("measure")) cfg.measure = parse_measure(doc.at("measure"));
  parse_sources(doc, cfg);
  if (doc.contains("sessions")) rc.sessions = get_count(doc, "sessions");
  if (rc.sessions == 0) key_error("sessions", "must be at least 1");
  if (doc.contains("seed")) rc.seed = get_count(doc, "seed");
  cfg.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: malformed JSON: " + std::string(e.what()));
  }
  return parse_run_config(doc);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_range(const std::string& spec) {
  const auto bad = [&] {
    return std::invalid_argument("malformed range '" + spec + "', expected start:stop:count");
  };
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos ||
      spec.find(':', c2 + 1) != std::string::npos) {
    throw bad();
  }
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    std::size_t used = 0;
    const std::string a = spec.substr(0, c1), b = spec.substr(c1 + 1, c2 - c1 - 1),
                      c = spec.substr(c2 + 1);
    start = std::stod(a, &used);
    if (used != a.size()) throw bad();
    stop = std::stod(b, &used);
    if (used != b.size()) throw bad();
    count = std::stol(c, &used);
    if (used != c.size()) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (count < 1 || !std::isfinite(start) || !std::isfinite(stop)) throw bad();
  if (count == 1) {
    if (start != stop) throw bad();
    return {start};
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = stop;
  return out;
}

json to_json(const BatchStats& s) {
  return json{{"n_sessions", s.n_sessions},
              {"n_traded_sessions", s.n_traded_sessions},
              {"n_trades", s.n_trades},
              {"n_ties", s.n_ties},
              {"mean_H_A_0", s.mean_H_A_0},
              {"se_H_A_0", s.se_H_A_0},
              {"mean_per_trade_profit", s.mean_per_trade_profit},
              {"se_per_trade", s.se_per_trade},
              {"mean_trade_count", s.mean_trade_count},
              {"mean_max_abs_inventory", s.mean_max_abs_inventory},
              {"se_max_abs_inventory", s.se_max_abs_inventory},
              {"trade_time_histogram",
               {{"bin_edges", s.trade_time_histogram.bin_edges},
                {"counts", s.trade_time_histogram.counts}}}};
}

void write_sessions_csv(std::ostream& os, const std::vector<SessionResult>& sessions) {
  os << "session,x,n_trades,h_a_t,h_a_0,max_abs_inventory,trades\n";
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const auto& r = sessions[s];
    os << s << ',' << format_double(r.realized_x) << ',' << r.trades.size() << ','
       << format_double(r.h_a_t) << ',' << format_double(r.h_a_0) << ',' << r.max_abs_inventory
       << ',';
    for (std::size_t k = 0; k < r.trades.size(); ++k) {
      const auto& e = r.trades[k];
      if (k) os << ';';
      os << format_double(e.time) << ':' << (e.side == Side::Buy ? "+1" : "-1") << ':'
         << format_double(e.exec_price) << ':' << e.inventory_after;
    }
    os << '\n';
  }
}

void write_hist_csv(std::ostream& os, const Histogram& hist) {
  os << "bin_left,bin_right,count\n";
  if (hist.total() == 0) return;
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    os << format_double(hist.bin_edges[b]) << ',' << format_double(hist.bin_edges[b + 1]) << ','
       << hist.counts[b] << '\n';
  }
}

namespace {

RunConfig load_with_overrides(const CommonOptions& opts) {
  RunConfig rc = load_run_config(opts.config_path);
  if (opts.seed) rc.seed = *opts.seed;
  return rc;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void close_checked(std::ofstream& f, const std::string& name) {
  f.close();
  if (!f) throw std::runtime_error("failed writing " + name);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_with_overrides(opts);
    const auto sessions = run_sessions(rc.scenario, rc.sessions, rc.seed, opts.workers);
    const BatchStats stats = summarize(rc.scenario, sessions);
    auto csv = open_output(opts.out_dir, "sessions.csv");
    write_sessions_csv(csv, sessions);
    close_checked(csv, "sessions.csv");
    auto js = open_output(opts.out_dir, "summary.json");
    js << to_json(stats).dump(2) << '\n';
    close_checked(js, "summary.json");
    out << "sessions " << stats.n_sessions << " traded " << stats.n_traded_sessions << " trades "
        << stats.n_trades << " mean_H_A_0 " << format_double(stats.mean_H_A_0) << " se "
        << format_double(stats.se_H_A_0) << '\n';
    return 0;
  });
}

int cmd_sweep(const CommonOptions& opts, const SweepOptions& sw, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_with_overrides(opts);
    const auto phis = parse_range(sw.phi_spec);
    const auto sigmas = parse_range(sw.sigma_spec);
    double ratio = 0.0;
    if (sw.sigma_ratio) {
      ratio = *sw.sigma_ratio;
    } else {
      const double fb = rc.scenario.trader_b().flow_rate();
      if (!(fb > 0.0)) {
        throw std::invalid_argument("sweep: sigma_b is zero; pass --sigma-ratio");
      }
      ratio = rc.scenario.trader_a().flow_rate() / fb;
    }
    const SweepResult res = sweep(rc.scenario, phis, sigmas, ratio, rc.sessions, rc.seed,
                                  opts.workers);
    auto csv = open_output(opts.out_dir, "surface.csv");
    csv << "phi,sigma_b,mean_per_trade,se_per_trade,mean_per_session,se_per_session,n_traded\n";
    for (std::size_t i = 0; i < phis.size(); ++i) {
      for (std::size_t j = 0; j < sigmas.size(); ++j) {
        const auto& c = res.cells[i][j];
        csv << format_double(phis[i]) << ',' << format_double(sigmas[j]) << ','
            << format_double(c.mean_per_trade_profit) << ',' << format_double(c.se_per_trade)
            << ',' << format_double(c.mean_H_A_0) << ',' << format_double(c.se_H_A_0) << ','
            << c.n_traded_sessions << '\n';
      }
    }
    close_checked(csv, "surface.csv");
    out << "cells " << phis.size() * sigmas.size() << '\n';
    return 0;
  });
}

int cmd_bound(const BoundOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DiscountCurve curve{o.r};
    const double P0T = discount_factor(curve, 0.0, o.t_maturity);
    const double bound = scenario2_lower_bound(o.phi, o.p, o.sigma, o.t, o.t_maturity, P0T);
    out << "bound " << format_double(bound) << '\n';
    if (o.phi * o.phi * o.p >= 1.0) {
      out << "note: phi^2 p >= 1, so Trader A can only be a seller; the buy term is zero\n";
    }
    if (o.check_mc) {
      const auto mc = estimate_scenario2_bound_mc(o.phi, o.p, o.sigma, o.t, o.t_maturity,
                                                  *o.check_mc, o.seed, curve);
      const double z = mc.se > 0.0 ? std::abs(mc.estimate - bound) / mc.se : 0.0;
      out << "mc_estimate " << format_double(mc.estimate) << " se " << format_double(mc.se)
          << " z " << format_double(z) << '\n';
    }
    return 0;
  });
}

int cmd_lemma3(const Lemma3Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.max_len > kLemma3MaxLength) {
      throw std::invalid_argument("max_len " + std::to_string(o.max_len) + " exceeds the limit of " +
                                  std::to_string(kLemma3MaxLength));
    }
    auto csv = open_output(o.out_dir, "lemma3.csv");
    csv << "code,length,sequence,value\n";
    std::string seq_text;
    const auto res = lemma3_scan(o.max_len, o.phi, o.psi,
                                 [&](std::uint64_t code, std::span<const int> seq, double v) {
                                   seq_text.clear();
                                   for (int e : seq) seq_text.push_back(e > 0 ? '+' : '-');
                                   csv << code << ',' << seq.size() << ',' << seq_text << ','
                                       << format_double(v) << '\n';
                                 });
    close_checked(csv, "lemma3.csv");
    std::string arg;
    for (int e : res.argmin) arg.push_back(e > 0 ? '+' : '-');
    out << "sequences " << res.sequences << '\n'
        << "min " << format_double(res.min_value) << '\n'
        << "argmin " << arg << '\n';
    return 0;
  });
}

int cmd_hist(const CommonOptions& opts, std::size_t bins, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_with_overrides(opts);
    if (bins < 2) throw std::invalid_argument("bins must be at least 2");
    const auto sessions = run_sessions(rc.scenario, rc.sessions, rc.seed, opts.workers);
    const Histogram h = make_trade_time_histogram(sessions, rc.scenario.grid.maturity(), bins);
    auto csv = open_output(opts.out_dir, "hist.csv");
    write_hist_csv(csv, h);
    close_checked(csv, "hist.csv");
    out << "trades " << h.total() << '\n';
    return 0;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Information-based trading simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->required();
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--seed", common.seed, "Override the config seed");
    sub->add_option("--workers", common.workers, "Worker threads (does not change outputs)")
        ->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "Run a batch; writes sessions.csv and summary.json");
  add_common(simulate);

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep phi x sigma_b; writes surface.csv");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--phi", sw.phi_spec, "start:stop:count")->required();
  sweep_cmd->add_option("--sigma", sw.sigma_spec, "sigma_b range start:stop:count")->required();
  sweep_cmd->add_option("--sigma-ratio", sw.sigma_ratio, "sigma_A / sigma_B");

  BoundOptions bo;
  auto* bound = app.add_subcommand("bound", "Closed-form fixed-time lower bound");
  bound->add_option("--phi", bo.phi)->required();
  bound->add_option("--p", bo.p)->required();
  bound->add_option("--sigma", bo.sigma)->required();
  bound->add_option("--t", bo.t)->required();
  bound->add_option("--t-maturity", bo.t_maturity)->required();
  bound->add_option("--r", bo.r);
  bound->add_option("--check-mc", bo.check_mc, "Also estimate by Monte Carlo with N draws");
  bound->add_option("--seed", bo.seed);

  Lemma3Options lo;
  auto* lemma3 = app.add_subcommand("lemma3", "Exhaustive trade-sequence positivity scan");
  lemma3->add_option("--max-len", lo.max_len)->required();
  lemma3->add_option("--phi", lo.phi)->required();
  lemma3->add_option("--psi", lo.psi)->required();
  lemma3->add_option("--out", lo.out_dir);

  std::size_t bins = 50;
  auto* hist = app.add_subcommand("hist", "Trade-time histogram; writes hist.csv");
  add_common(hist);
  hist->add_option("--bins", bins);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*simulate) return cmd_simulate(common, std::cout, std::cerr);
  if (*sweep_cmd) return cmd_sweep(common, sw, std::cout, std::cerr);
  if (*bound) return cmd_bound(bo, std::cout, std::cerr);
  if (*lemma3) return cmd_lemma3(lo, std::cout, std::cerr);
  if (*hist) return cmd_hist(common, bins, std::cout, std::cerr);
  return 2;
}

}  // namespace infotrade::cli
