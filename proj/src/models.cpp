#include "cospricer/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cospricer/errors.hpp"

namespace cospricer {
namespace {

using detail::require;

constexpr Complex kI{0.0, 1.0};

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

// Raw moments E[J^n], J ~ N(mu, s^2), for n = 0..order.
std::vector<double> normal_raw_moments(double mu, double s, int order) {
    std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
    m[0] = 1.0;
    if (order >= 1) m[1] = mu;
    for (int n = 2; n <= order; ++n)
        m[n] = mu * m[n - 1] + (n - 1) * s * s * m[n - 2];
    return m;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// VG as a difference of two gamma variables: 1 - i u theta nu + sigma^2 nu u^2 / 2
// = (1 - i u mp)(1 + i u mn).
void vg_scales(const VarianceGammaParams& p, double& mp, double& mn) {
    const double root = std::sqrt(p.theta * p.theta * p.nu * p.nu + 2.0 * p.sigma * p.sigma * p.nu);
    mp = 0.5 * (p.theta * p.nu + root);
    mn = 0.5 * (-p.theta * p.nu + root);
}

Complex cgmy_exponent(const CgmyParams& p, Complex u) {
    const double g = std::tgamma(-p.Y);
    return p.C * g *
           (std::pow(Complex(p.M, 0.0) - kI * u, p.Y) - std::pow(p.M, p.Y) +
            std::pow(Complex(p.G, 0.0) + kI * u, p.Y) - std::pow(p.G, p.Y));
}

double cgmy_drift(const CgmyParams& p) {
    return -p.C * std::tgamma(-p.Y) *
           (std::pow(p.M - 1.0, p.Y) - std::pow(p.M, p.Y) + std::pow(p.G + 1.0, p.Y) -
            std::pow(p.G, p.Y));
}

double mjd_log_jump_mean(const MertonParams& p) {
    return std::log1p(p.mean_jump) - 0.5 * p.jump_vol * p.jump_vol;
}

// log E[exp(iu (log S_T - log S0 - rT))], martingale drift included.
struct IncrementExponent {
    double T;
    Complex u;

    Complex operator()(const BlackScholesParams& p) const {
        const double s2 = p.sigma * p.sigma;
        return T * (-0.5 * s2 * kI * u - 0.5 * s2 * u * u);
    }
    Complex operator()(const LaplaceParams& p) const {
        const double b2 = 0.5 * p.sigma * p.sigma;
        return kI * u * std::log1p(-b2) - std::log(1.0 + b2 * u * u);
    }
    Complex operator()(const HestonParams& p) const {
        const Complex iu = kI * u;
        const double th2 = p.theta * p.theta;
        const Complex beta = p.kappa - p.rho * p.theta * iu;
        const Complex d = std::sqrt(beta * beta + th2 * (iu + u * u));
        const Complex g = (beta - d) / (beta + d);
        const Complex e = std::exp(-d * T);
        const Complex C =
            p.kappa * p.eta / th2 * ((beta - d) * T - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
        const Complex D = (beta - d) / th2 * (1.0 - e) / (1.0 - g * e);
        return C + D * p.v0;
    }
    Complex operator()(const VarianceGammaParams& p) const {
        const double omega = std::log(1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu) / p.nu;
        return kI * u * omega * T -
               T / p.nu * std::log(1.0 - kI * u * p.theta * p.nu + 0.5 * p.sigma * p.sigma * p.nu * u * u);
    }
    Complex operator()(const CgmyParams& p) const {
        return kI * u * cgmy_drift(p) * T + T * cgmy_exponent(p, u);
    }
    Complex operator()(const MertonParams& p) const {
        const double s2 = p.sigma * p.sigma;
        const double drift = -0.5 * s2 - p.intensity * p.mean_jump;
        const double mu_j = mjd_log_jump_mean(p);
        const double d2 = p.jump_vol * p.jump_vol;
        return T * (kI * u * drift - 0.5 * s2 * u * u +
                    p.intensity * (std::exp(kI * u * mu_j - 0.5 * d2 * u * u) - 1.0));
    }
};

// E[log S_T] - log S0 - rT.
struct IncrementMean {
    double T;

    double operator()(const BlackScholesParams& p) const { return -0.5 * p.sigma * p.sigma * T; }
    double operator()(const LaplaceParams& p) const { return std::log1p(-0.5 * p.sigma * p.sigma); }
    double operator()(const HestonParams& p) const {
        const double decay = -std::expm1(-p.kappa * T) / p.kappa;
        return -0.5 * p.eta * (T - decay) - 0.5 * p.v0 * decay;
    }
    double operator()(const VarianceGammaParams& p) const {
        const double omega = std::log(1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu) / p.nu;
        return (omega + p.theta) * T;
    }
    double operator()(const CgmyParams& p) const {
        const double k1 = p.C * std::tgamma(1.0 - p.Y) *
                          (std::pow(p.M, p.Y - 1.0) - std::pow(p.G, p.Y - 1.0));
        return (cgmy_drift(p) + k1) * T;
    }
    double operator()(const MertonParams& p) const {
        return (-0.5 * p.sigma * p.sigma - p.intensity * p.mean_jump +
                p.intensity * mjd_log_jump_mean(p)) *
               T;
    }
};

// Heston variance of log S_T from the second-order Taylor coefficient of the
// Riccati solution: B(w,t) = beta1 w + beta2 w^2 + ..., A' = kappa eta B.
double heston_variance(const HestonParams& p, double T) {
    const double k = p.kappa;
    const double a0 = 0.5 - p.rho * p.theta / (2.0 * k) + p.theta * p.theta / (8.0 * k * k);
    const double a1 = p.rho * p.theta / (2.0 * k) - p.theta * p.theta / (4.0 * k * k);
    const double a2 = p.theta * p.theta / (8.0 * k * k);
    const double e = std::exp(-k * T);
    const double one_minus_e = -std::expm1(-k * T);
    const double beta2 = a0 * one_minus_e / k + a1 * T * e + a2 * e * one_minus_e / k;
    const double int_g = a0 * T + a1 * one_minus_e / k - a2 * std::expm1(-2.0 * k * T) / (2.0 * k);
    const double alpha2 = p.eta * (int_g - beta2);
    return 2.0 * (alpha2 + p.v0 * beta2);
}

struct AnalyticCumulant {
    double T;
    int n;
    double& out;

    bool operator()(const BlackScholesParams& p) const {
        out = n == 2 ? p.sigma * p.sigma * T : 0.0;
        return true;
    }
    bool operator()(const LaplaceParams& p) const {
        const double b = p.sigma / std::numbers::sqrt2;
        out = n % 2 == 0 ? 2.0 * factorial(n - 1) * std::pow(b, n) : 0.0;
        return true;
    }
    bool operator()(const HestonParams& p) const {
        if (n != 2) return false;
        out = heston_variance(p, T);
        return true;
    }
    bool operator()(const VarianceGammaParams& p) const {
        double mp = 0.0, mn = 0.0;
        vg_scales(p, mp, mn);
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        out = T / p.nu * factorial(n - 1) * (std::pow(mp, n) + sign * std::pow(mn, n));
        return true;
    }
    bool operator()(const CgmyParams& p) const {
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        out = T * p.C * std::tgamma(n - p.Y) *
              (std::pow(p.M, p.Y - n) + sign * std::pow(p.G, p.Y - n));
        return true;
    }
    bool operator()(const MertonParams& p) const {
        const auto raw = normal_raw_moments(mjd_log_jump_mean(p), p.jump_vol, n);
        out = p.intensity * T * raw[n];
        if (n == 2) out += p.sigma * p.sigma * T;
        return true;
    }
};

struct Validate {
    void operator()(const BlackScholesParams& p) const {
        require<InvalidArgument>(std::isfinite(p.sigma) && p.sigma > 0.0, "BS: sigma must be > 0");
    }
    void operator()(const LaplaceParams& p) const {
        require<InvalidArgument>(std::isfinite(p.sigma) && p.sigma > 0.0,
                                 "Laplace: sigma must be > 0");
        require<InvalidArgument>(p.sigma < std::numbers::sqrt2,
                                 "Laplace: sigma must be < sqrt(2) for E[S_T] to exist");
    }
    void operator()(const HestonParams& p) const {
        require<InvalidArgument>(finite_all({p.kappa, p.eta, p.theta, p.v0, p.rho}),
                                 "Heston: non-finite parameter");
        require<InvalidArgument>(p.kappa > 0.0, "Heston: kappa must be > 0");
        require<InvalidArgument>(p.eta > 0.0, "Heston: eta must be > 0");
        require<InvalidArgument>(p.theta > 0.0, "Heston: theta must be > 0");
        require<InvalidArgument>(p.v0 > 0.0, "Heston: v0 must be > 0");
        require<InvalidArgument>(p.rho > -1.0 && p.rho < 1.0, "Heston: rho must lie in (-1, 1)");
    }
    void operator()(const VarianceGammaParams& p) const {
        require<InvalidArgument>(finite_all({p.sigma, p.theta, p.nu}), "VG: non-finite parameter");
        require<InvalidArgument>(p.sigma > 0.0, "VG: sigma must be > 0");
        require<InvalidArgument>(p.nu > 0.0, "VG: nu must be > 0");
        require<InvalidArgument>(1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu > 0.0,
                                 "VG: 1 - theta nu - sigma^2 nu / 2 must be > 0");
    }
    void operator()(const CgmyParams& p) const {
        require<InvalidArgument>(finite_all({p.C, p.G, p.M, p.Y}), "CGMY: non-finite parameter");
        require<InvalidArgument>(p.C > 0.0, "CGMY: C must be > 0");
        require<InvalidArgument>(p.G > 0.0, "CGMY: G must be > 0");
        require<InvalidArgument>(p.M > 1.0, "CGMY: M must be > 1 for E[S_T] to exist");
        require<InvalidArgument>(p.Y < 2.0, "CGMY: Y must be < 2");
        require<InvalidArgument>(p.Y != 0.0 && p.Y != 1.0, "CGMY: Y must differ from 0 and 1");
    }
    void operator()(const MertonParams& p) const {
        require<InvalidArgument>(finite_all({p.sigma, p.intensity, p.mean_jump, p.jump_vol}),
                                 "MJD: non-finite parameter");
        require<InvalidArgument>(p.sigma > 0.0, "MJD: sigma must be > 0");
        require<InvalidArgument>(p.intensity >= 0.0, "MJD: jump intensity must be >= 0");
        require<InvalidArgument>(p.mean_jump > -1.0, "MJD: expected jump must be > -1");
        require<InvalidArgument>(p.jump_vol > 0.0, "MJD: jump volatility must be > 0");
    }
};

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BS: return "BS";
        case ModelKind::Laplace: return "Laplace";
        case ModelKind::Heston: return "Heston";
        case ModelKind::VG: return "VG";
        case ModelKind::CGMY: return "CGMY";
        case ModelKind::MJD: return "MJD";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (ModelKind k : {ModelKind::BS, ModelKind::Laplace, ModelKind::Heston, ModelKind::VG,
                        ModelKind::CGMY, ModelKind::MJD})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

ModelSpec::ModelSpec(Params params) : params_(std::move(params)) {
    std::visit(Validate{}, params_);
}

ModelKind ModelSpec::kind() const {
    return static_cast<ModelKind>(params_.index());
}

MarketContext::MarketContext(double spot, double rate, double maturity)
    : spot_(spot), rate_(rate), maturity_(maturity) {
    require<InvalidArgument>(std::isfinite(spot) && spot > 0.0, "market: S0 must be > 0");
    require<InvalidArgument>(std::isfinite(rate), "market: r must be finite");
    require<InvalidArgument>(std::isfinite(maturity) && maturity > 0.0, "market: T must be > 0");
}

double MarketContext::discount() const {
    return std::exp(-rate_ * maturity_);
}

CenteredCf::CenteredCf(const ModelSpec& model, const MarketContext& ctx)
    : model_(model),
      ctx_(ctx),
      increment_mean_(std::visit(IncrementMean{ctx.maturity()}, model.params())),
      mean_log_(std::log(ctx.spot()) + ctx.rate() * ctx.maturity() + increment_mean_) {}

Complex CenteredCf::log(Complex u) const {
    if (u == Complex(0.0, 0.0)) return {0.0, 0.0};
    return std::visit(IncrementExponent{ctx_.maturity(), u}, model_.params()) -
           kI * u * increment_mean_;
}

Complex CenteredCf::operator()(Complex u) const {
    if (u == Complex(0.0, 0.0)) return {1.0, 0.0};
    return std::exp(log(u));
}

Complex char_fn(const ModelSpec& model, const MarketContext& ctx, Complex u) {
    if (u == Complex(0.0, 0.0)) return {1.0, 0.0};
    const double shift = std::log(ctx.spot()) + ctx.rate() * ctx.maturity();
    return std::exp(kI * u * shift + std::visit(IncrementExponent{ctx.maturity(), u}, model.params()));
}

double mean_log_price(const ModelSpec& model, const MarketContext& ctx) {
    return std::log(ctx.spot()) + ctx.rate() * ctx.maturity() +
           std::visit(IncrementMean{ctx.maturity()}, model.params());
}

Complex centered_char_fn(const ModelSpec& model, const MarketContext& ctx, Complex u) {
    return CenteredCf(model, ctx)(u);
}

bool analytic_cumulant(const ModelSpec& model, const MarketContext& ctx, int n, double& out) {
    require<InvalidArgument>(n >= 2, "analytic_cumulant: order must be >= 2");
    return std::visit(AnalyticCumulant{ctx.maturity(), n, out}, model.params());
}

std::vector<double> cumulants(const ModelSpec& model, const MarketContext& ctx, int max_order,
                              const CumulantFallback& fallback) {
    require<InvalidArgument>(max_order == 1 || max_order == 2 || max_order == 4 ||
                                 max_order == 6 || max_order == 8,
                             "cumulants: max_order must be one of 1, 2, 4, 6, 8");
    std::vector<double> out{mean_log_price(model, ctx)};
    std::vector<double> numeric;
    for (int n = 2; n <= max_order; ++n) {
        double k = 0.0;
        if (!analytic_cumulant(model, ctx, n, k)) {
            if (numeric.empty()) {
                if (!fallback)
                    throw NumericFallbackRequired("cumulants: " + std::string(to_string(model.kind())) +
                                                  " order " + std::to_string(n) +
                                                  " needs a numeric provider");
                numeric = fallback(model, ctx, max_order);
                require<NumericFallbackRequired>(static_cast<int>(numeric.size()) >= max_order,
                                                 "cumulants: numeric provider returned too few orders");
            }
            k = numeric[static_cast<std::size_t>(n - 1)];
        }
        out.push_back(k);
    }
    return out;
}

}  // namespace cospricer
