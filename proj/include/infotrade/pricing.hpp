#pragma once

#include <span>
#include <string>
#include <vector>

#include "infotrade/stochastic_core.hpp"

namespace infotrade {

// Constant short rate; P(t1, t2) = exp(-r (t2 - t1)).
struct DiscountCurve {
  double short_rate = 0.0;
};

double discount_factor(const DiscountCurve& curve, double t1, double t2);

// Discounted conditional expectation of X given the information value xi_t,
// evaluated with max-shifted log-weights
//   l(x) = (sigma x xi - sigma^2 x^2 t / 2) * T / (T - t) + log mu(x).
// Returns 0 for t >= T.
double information_price(double xi_t, double t, double sigma, double maturity,
                         const PayoffMeasure& measure, const DiscountCurve& curve);

// Same as information_price but with the discount factor supplied by the
// caller; used on hot paths where P(t, T) is tabulated.
double information_price_discounted(double xi_t, double t, double sigma,
                                    double maturity, const PayoffMeasure& measure,
                                    double discount);

// Closed form for X in {0, 1} with P(X = 1) = p, written as a logistic.
double binary_bond_mid(double xi_t, double t, double sigma, double maturity,
                       double p, const DiscountCurve& curve);

struct Quote {
  double info_mid = 0.0;
  double quoted_mid = 0.0;
  double bid = 0.0;
  double offer = 0.0;
};

// quoted_mid = info_mid * (phi psi)^-Q, bid = quoted_mid / phi,
// offer = quoted_mid * phi. Requires phi > 1 and 1 <= psi < phi.
Quote quote_from_mid(double info_mid, double phi, double psi, int inventory);

// Same arithmetic as quote_from_mid without parameter validation.
inline Quote make_quote(double info_mid, double phi, double skew) {
  const double m = info_mid * skew;
  return {info_mid, m, m / phi, m * phi};
}

// Throws std::invalid_argument unless phi > 1 and 1 <= psi < phi.
void check_spread_and_aversion(double phi, double psi, const char* which = "psi");

// A trader's information sources and inventory aversion. The lower-tier
// trader's sources must be a prefix of the higher-tier trader's.
struct TraderSpec {
  std::vector<double> sigmas;
  double psi = 1.0;
  std::string label;

  double flow_rate() const;
};

// Throws std::invalid_argument unless lower.sigmas is a prefix of
// higher.sigmas.
void check_nested(const TraderSpec& higher, const TraderSpec& lower);

// One price per grid instant; the final instant carries 0.
std::vector<double> price_path(const InformationPath& information,
                               const PayoffMeasure& measure, const DiscountCurve& curve);

}  // namespace infotrade
