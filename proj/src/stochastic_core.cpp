#include "infotrade/stochastic_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace infotrade {

TimeGrid::TimeGrid(double maturity, std::size_t n_steps)
    : maturity_(maturity), n_steps_(n_steps) {
  if (!(maturity > 0.0) || !std::isfinite(maturity)) {
    throw std::invalid_argument("time grid: maturity must be positive, got " +
                                std::to_string(maturity));
  }
  if (n_steps < 2) {
    throw std::invalid_argument("time grid: n_steps must be at least 2");
  }
  dt_ = maturity / static_cast<double>(n_steps);
  times_.resize(n_steps + 1);
  for (std::size_t i = 0; i < n_steps; ++i) {
    times_[i] = maturity * (static_cast<double>(i) / static_cast<double>(n_steps));
  }
  times_[n_steps] = maturity;
}

std::size_t TimeGrid::nearest_index(double t) const {
  const double k = std::round(t / dt_);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), n_steps_);
}

TimeGrid make_time_grid(double maturity, std::size_t n_steps) {
  return TimeGrid(maturity, n_steps);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t a,
                                 std::uint64_t b) {
  return mix64(mix64(mix64(master_seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

std::uint64_t session_stream(std::uint64_t session_index, std::uint64_t slot) {
  // 2^8 slots per session is far more sources than any configuration uses.
  return (session_index << 8) | (slot & 0xff);
}

SeededRng::SeededRng(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  const std::uint64_t s = derive_stream_seed(master_seed, stream_index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(stream_index)};
  engine_.seed(seq);
}

BridgeSampler::BridgeSampler(const TimeGrid& grid) : grid_(&grid) {
  const std::size_t n = grid.n_steps();
  const double T = grid.maturity();
  decay_.resize(n);
  scale_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = grid.time(i);
    const double t1 = grid.time(i + 1);
    const double a = (T - t1) / (T - t0);
    decay_[i] = a;
    scale_[i] = std::sqrt((t1 - t0) * a);
  }
}

BridgePath BridgeSampler::sample(SeededRng& rng) const {
  BridgePath path{grid_, std::vector<double>(grid_->size(), 0.0)};
  double beta = 0.0;
  for (std::size_t i = 0; i < grid_->n_steps(); ++i) {
    beta = advance(i, beta, rng);
    path.values[i + 1] = beta;
  }
  return path;
}

BridgePath sample_bridge_path(const TimeGrid& grid, SeededRng& rng) {
  return BridgeSampler(grid).sample(rng);
}

namespace {

constexpr double kProbTolerance = 1e-12;

void check_total(double total) {
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw std::invalid_argument("payoff measure: probabilities sum to " +
                                std::to_string(total) + ", expected 1");
  }
}

}  // namespace

PayoffMeasure PayoffMeasure::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("payoff measure: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  PayoffMeasure m;
  m.kind_ = Kind::Discrete;
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.value >= 0.0) || !std::isfinite(a.value)) {
      throw std::invalid_argument("payoff measure: atom values must be nonnegative");
    }
    if (!(a.prob > 0.0 && a.prob <= 1.0)) {
      throw std::invalid_argument("payoff measure: atom probabilities must lie in (0, 1]");
    }
    total += a.prob;
    m.values_.push_back(a.value);
    m.probs_.push_back(a.prob);
  }
  check_total(total);
  m.finalize();
  return m;
}

PayoffMeasure PayoffMeasure::gridded(std::vector<double> nodes,
                                     std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw std::invalid_argument("payoff measure: nodes and weights must be nonempty and aligned");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] >= 0.0) || !std::isfinite(nodes[i])) {
      throw std::invalid_argument("payoff measure: nodes must be nonnegative");
    }
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw std::invalid_argument("payoff measure: nodes must be increasing");
    }
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("payoff measure: weights must be nonnegative");
    }
    total += weights[i];
  }
  check_total(total);
  PayoffMeasure m;
  m.kind_ = Kind::Gridded;
  // Zero-weight nodes carry no mass and would give log-weight -inf.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (weights[i] > 0.0) {
      m.values_.push_back(nodes[i]);
      m.probs_.push_back(weights[i]);
    }
  }
  m.finalize();
  return m;
}

PayoffMeasure PayoffMeasure::from_density(std::vector<double> nodes,
                                          std::span<const double> density) {
  if (nodes.size() < 2 || nodes.size() != density.size()) {
    throw std::invalid_argument("payoff measure: density needs at least two aligned nodes");
  }
  std::vector<double> w(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += 0.5 * h * density[i];
    w[i + 1] += 0.5 * h * density[i + 1];
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("payoff measure: density has no mass");
  for (auto& x : w) x /= total;
  // Renormalize so the sum is exactly representable within tolerance.
  const double again = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - again;
  return gridded(std::move(nodes), std::move(w));
}

PayoffMeasure PayoffMeasure::binary(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("payoff measure: binary p must lie in (0, 1)");
  }
  return discrete({{1.0, p}, {0.0, 1.0 - p}});
}

void PayoffMeasure::finalize() {
  log_probs_.resize(probs_.size());
  cdf_.resize(probs_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    log_probs_[i] = std::log(probs_[i]);
    c += probs_[i];
    cdf_[i] = c;
  }
  cdf_.back() = 1.0;
  min_ = *std::min_element(values_.begin(), values_.end());
  max_ = *std::max_element(values_.begin(), values_.end());
}

double PayoffMeasure::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
  return m;
}

double PayoffMeasure::quantile(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  return values_[idx];
}

double sample_payoff(const PayoffMeasure& measure, SeededRng& rng) {
  return measure.quantile(rng.uniform());
}

InformationPath make_information_path(double x, double sigma,
                                      const BridgePath& bridge) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("information path: sigma must be nonnegative");
  }
  InformationPath out{bridge.grid, sigma, std::vector<double>(bridge.values.size())};
  for (std::size_t i = 0; i < bridge.values.size(); ++i) {
    out.values[i] = sigma * bridge.grid->time(i) * x + bridge.values[i];
  }
  return out;
}

double effective_flow_rate(std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("effective flow rate: empty source list");
  double ss = 0.0;
  for (double s : sigmas) ss += s * s;
  return std::sqrt(ss);
}

InformationPath effective_information(std::span<const InformationPath> paths,
                                      std::span<const double> sigmas) {
  if (paths.empty() || paths.size() != sigmas.size()) {
    throw std::invalid_argument("effective information: paths and sigmas must be nonempty and aligned");
  }
  const TimeGrid* grid = paths.front().grid;
  const std::size_t n = paths.front().values.size();
  for (const auto& p : paths) {
    if (p.grid != grid || p.values.size() != n) {
      throw std::invalid_argument("effective information: paths must share one grid");
    }
  }
  const double s_eff = effective_flow_rate(sigmas);
  if (!(s_eff > 0.0)) {
    throw std::invalid_argument("effective information: all flow rates are zero");
  }
  InformationPath out{grid, s_eff, std::vector<double>(n, 0.0)};
  if (paths.size() == 1) {
    out.values = paths.front().values;
    return out;
  }
  for (std::size_t k = 0; k < paths.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) out.values[i] += sigmas[k] * paths[k].values[i];
  }
  for (auto& v : out.values) v /= s_eff;
  return out;
}

}  // namespace infotrade
