#include "infotrade/pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace infotrade {

double discount_factor(const DiscountCurve& curve, double t1, double t2) {
  if (t1 > t2) {
    throw std::invalid_argument("discount factor: t1 must not exceed t2");
  }
  if (t1 == t2) return 1.0;
  return std::exp(-curve.short_rate * (t2 - t1));
}

namespace {

template <typename Buffer>
double weighted_mean(double xi_t, double t, double sigma, double maturity,
                     const PayoffMeasure& measure, Buffer& logw) {
  const auto values = measure.values();
  const auto log_probs = measure.log_probs();
  const std::size_t n = values.size();
  const double k = maturity / (maturity - t);
  const double a = sigma * xi_t * k;
  const double b = 0.5 * sigma * sigma * t * k;
  double top = -std::numeric_limits<double>::infinity();
  std::size_t top_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = values[i];
    logw[i] = (a - b * x) * x + log_probs[i];
    if (logw[i] > top) {
      top = logw[i];
      top_i = i;
    }
  }
  double num = values[top_i];
  double den = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == top_i) continue;
    const double w = std::exp(logw[i] - top);
    num += values[i] * w;
    den += w;
  }
  return std::clamp(num / den, measure.min_value(), measure.max_value());
}

}  // namespace

double information_price_discounted(double xi_t, double t, double sigma,
                                    double maturity, const PayoffMeasure& measure,
                                    double discount) {
  if (!(t < maturity)) return 0.0;
  if (!std::isfinite(xi_t)) {
    throw std::invalid_argument("information price: xi_t must be finite");
  }
  if (measure.size() == 0) {
    throw std::invalid_argument("information price: empty payoff measure");
  }
  if (sigma == 0.0) return discount * measure.mean();
  constexpr std::size_t kInline = 16;
  if (measure.size() <= kInline) {
    std::array<double, kInline> buf;
    return discount * weighted_mean(xi_t, t, sigma, maturity, measure, buf);
  }
  std::vector<double> buf(measure.size());
  return discount * weighted_mean(xi_t, t, sigma, maturity, measure, buf);
}

double information_price(double xi_t, double t, double sigma, double maturity,
                         const PayoffMeasure& measure, const DiscountCurve& curve) {
  if (!(t < maturity)) return 0.0;
  if (t < 0.0) throw std::invalid_argument("information price: t must be nonnegative");
  if (!(sigma >= 0.0)) throw std::invalid_argument("information price: sigma must be nonnegative");
  return information_price_discounted(xi_t, t, sigma, maturity, measure,
                                      discount_factor(curve, t, maturity));
}

double binary_bond_mid(double xi_t, double t, double sigma, double maturity,
                       double p, const DiscountCurve& curve) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("binary bond: p must lie in (0, 1)");
  }
  if (!(t < maturity)) return 0.0;
  if (!std::isfinite(xi_t)) throw std::invalid_argument("binary bond: xi_t must be finite");
  const double P = discount_factor(curve, t, maturity);
  // p e^z / (p e^z + 1 - p) = 1 / (1 + e^-(z + logit p))
  const double z = (sigma * xi_t - 0.5 * sigma * sigma * t) * maturity / (maturity - t) +
                   std::log(p) - std::log1p(-p);
  if (z >= 0.0) return P / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return P * e / (1.0 + e);
}

void check_spread_and_aversion(double phi, double psi, const char* which) {
  if (!(phi > 1.0) || !std::isfinite(phi)) {
    std::ostringstream os;
    os << "spread factor phi=" << phi << " must be greater than 1";
    throw std::invalid_argument(os.str());
  }
  if (!(psi >= 1.0 && psi < phi)) {
    std::ostringstream os;
    os << which << "=" << psi << " violates the inventory aversion bound 1 <= "
       << which << " < phi=" << phi;
    throw std::invalid_argument(os.str());
  }
}

Quote quote_from_mid(double info_mid, double phi, double psi, int inventory) {
  check_spread_and_aversion(phi, psi);
  if (!(info_mid >= 0.0)) throw std::invalid_argument("quote: mid must be nonnegative");
  const double skew = inventory == 0 ? 1.0 : std::pow(phi * psi, -inventory);
  return make_quote(info_mid, phi, skew);
}

double TraderSpec::flow_rate() const {
  double ss = 0.0;
  for (double s : sigmas) ss += s * s;
  return std::sqrt(ss);
}

void check_nested(const TraderSpec& higher, const TraderSpec& lower) {
  for (double s : higher.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("trader sources: flow rates must be nonnegative");
    }
  }
  if (lower.sigmas.size() > higher.sigmas.size() ||
      !std::equal(lower.sigmas.begin(), lower.sigmas.end(), higher.sigmas.begin())) {
    throw std::invalid_argument(
        "trader sources: the lower-tier source list must be a prefix of the higher-tier list");
  }
}

std::vector<double> price_path(const InformationPath& information,
                               const PayoffMeasure& measure, const DiscountCurve& curve) {
  const TimeGrid& grid = *information.grid;
  const double T = grid.maturity();
  std::vector<double> out(information.values.size(), 0.0);
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    out[i] = information_price(information.values[i], grid.time(i), information.flow_rate, T,
                               measure, curve);
  }
  return out;
}

}  // namespace infotrade
