#pragma once

#include "cospricer/cos_engine.hpp"
#include "cospricer/models.hpp"

namespace cospricer {

double bs_price(double S0, double K, double r, double sigma, double T, OptionKind kind);

/// Laplace distributed log-return with standard deviation sigma and mean
/// log S0 + rT + log(1 - sigma^2/2). MgfDiverges if sigma >= sqrt(2).
double laplace_price(double S0, double K, double r, double sigma, double T, OptionKind kind);

/// Poisson-weighted Black-Scholes series truncated after `terms` terms.
double merton_price(double S0, double K, double r, const MertonParams& p, double T, OptionKind kind,
                    int terms = 100);

struct CarrMadanConfig {
    double alpha = 0.1;
    double u_max = 1200.0;
    int n_points = 1 << 17;
};

/// Damped call transform integrated over [0, u_max] by composite Simpson with
/// n_points panels; puts by parity. IntegralNotDecayed if the integrand at
/// u_max exceeds 1e-12 of its peak.
double carr_madan_price(const ModelSpec& model, const MarketContext& ctx, double K, OptionKind kind,
                        const CarrMadanConfig& cfg = {});

/// Dispatches to the closed form for BS, Laplace and MJD; Carr-Madan otherwise.
double reference_price(const ModelSpec& model, const MarketContext& ctx, double K, OptionKind kind,
                       const CarrMadanConfig& cfg = {});

}  // namespace cospricer
