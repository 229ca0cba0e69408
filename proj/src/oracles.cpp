#include "cospricer/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cospricer/errors.hpp"
#include "cospricer/numerics.hpp"

namespace cospricer {
namespace {

using detail::require;

}  // namespace

double bs_price(double S0, double K, double r, double sigma, double T, OptionKind kind) {
    require<InvalidArgument>(S0 > 0.0 && K > 0.0 && sigma > 0.0 && T > 0.0,
                             "bs_price: S0, K, sigma, T must be > 0");
    const double sd = sigma * std::sqrt(T);
    const double d1 = (std::log(S0 / K) + (r + 0.5 * sigma * sigma) * T) / sd;
    const double d2 = d1 - sd;
    const double df = std::exp(-r * T);
    if (kind == OptionKind::call) return S0 * numerics::normal_cdf(d1) - K * df * numerics::normal_cdf(d2);
    return K * df * numerics::normal_cdf(-d2) - S0 * numerics::normal_cdf(-d1);
}

double laplace_price(double S0, double K, double r, double sigma, double T, OptionKind kind) {
    require<InvalidArgument>(S0 > 0.0 && K > 0.0 && sigma > 0.0 && T > 0.0,
                             "laplace_price: S0, K, sigma, T must be > 0");
    if (sigma >= std::numbers::sqrt2) throw MgfDiverges("laplace_price: sigma >= sqrt(2)");
    const double b = sigma / std::numbers::sqrt2;
    const double m = std::log(S0) + r * T + std::log1p(-0.5 * sigma * sigma);
    const double d = std::log(K) - m;
    double cdf = 0.0;      // P(X < d)
    double partial = 0.0;  // E[e^X; X < d]
    if (d < 0.0) {
        cdf = 0.5 * std::exp(d / b);
        partial = std::exp(d * (1.0 + 1.0 / b)) / (2.0 * (b + 1.0));
    } else {
        cdf = 1.0 - 0.5 * std::exp(-d / b);
        partial = 1.0 / (2.0 * (1.0 + b)) + std::expm1(d * (1.0 - 1.0 / b)) / (2.0 * (b - 1.0));
    }
    const double df = std::exp(-r * T);
    const double put = df * (K * cdf - std::exp(m) * partial);
    return kind == OptionKind::put ? put : put + S0 - K * df;
}

double merton_price(double S0, double K, double r, const MertonParams& p, double T, OptionKind kind,
                    int terms) {
    require<InvalidArgument>(terms >= 1, "merton_price: terms must be >= 1");
    const double lam = p.intensity * (1.0 + p.mean_jump) * T;
    const double log_jump = std::log1p(p.mean_jump);
    std::vector<double> parts(static_cast<std::size_t>(terms));
    for (int j = 0; j < terms; ++j) {
        const double log_w = lam > 0.0 ? -lam + j * std::log(lam) - std::lgamma(j + 1.0) : (j == 0 ? 0.0 : -INFINITY);
        const double w = std::exp(log_w);
        if (w == 0.0) continue;
        const double r_j = r - p.intensity * p.mean_jump + j * log_jump / T;
        const double sigma_j = std::sqrt(p.sigma * p.sigma + j * p.jump_vol * p.jump_vol / T);
        parts[static_cast<std::size_t>(j)] = w * bs_price(S0, K, r_j, sigma_j, T, kind);
    }
    return numerics::pairwise_sum(parts);
}

double carr_madan_price(const ModelSpec& model, const MarketContext& ctx, double K, OptionKind kind,
                        const CarrMadanConfig& cfg) {
    require<InvalidArgument>(cfg.alpha > 0.0 && cfg.u_max > 0.0, "carr_madan: alpha and u_max must be > 0");
    require<InvalidArgument>(cfg.n_points >= 2 && cfg.n_points % 2 == 0, "carr_madan: n_points must be even");
    const CenteredCf phi(model, ctx);
    const double a = cfg.alpha;
    const double m = phi.mean_log_price();
    const double k = std::log(K);
    // e^{-iuk} phi(u - (a+1)i) with phi(z) = e^{izm} phi_X(z), split so the
    // deterministic phase enters only as u (m - k).
    const double scale = std::exp(-a * k + (a + 1.0) * m) / std::numbers::pi;
    auto integrand = [&](double u) {
        const Complex z(u, -(a + 1.0));
        const Complex num = phi(z) * std::polar(1.0, u * (m - k));
        const Complex den(a * a + a - u * u, (2.0 * a + 1.0) * u);
        return (num / den).real();
    };

    const int n = cfg.n_points;
    const double h = cfg.u_max / n;
    std::vector<double> f(static_cast<std::size_t>(n) + 1);
    double peak = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double v = integrand(j * h);
        const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        f[static_cast<std::size_t>(j)] = w * v;
        peak = std::max(peak, std::abs(v));
    }
    if (!(std::abs(integrand(cfg.u_max)) <= 1e-12 * peak))
        throw IntegralNotDecayed("carr_madan: integrand at u_max is " +
                                 std::to_string(std::abs(integrand(cfg.u_max)) / peak) + " of its peak");
    const double call = ctx.discount() * scale * h / 3.0 * numerics::pairwise_sum(f);
    return kind == OptionKind::call ? call : call - ctx.spot() + K * ctx.discount();
}

double reference_price(const ModelSpec& model, const MarketContext& ctx, double K, OptionKind kind,
                       const CarrMadanConfig& cfg) {
    const double S0 = ctx.spot(), r = ctx.rate(), T = ctx.maturity();
    switch (model.kind()) {
        case ModelKind::BS: return bs_price(S0, K, r, model.as<BlackScholesParams>().sigma, T, kind);
        case ModelKind::Laplace: return laplace_price(S0, K, r, model.as<LaplaceParams>().sigma, T, kind);
        case ModelKind::MJD: return merton_price(S0, K, r, model.as<MertonParams>(), T, kind);
        default: return carr_madan_price(model, ctx, K, kind, cfg);
    }
}

}  // namespace cospricer
