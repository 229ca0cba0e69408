#pragma once

#include <complex>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

namespace cospricer {

using Complex = std::complex<double>;

enum class ModelKind { BS, Laplace, Heston, VG, CGMY, MJD };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct BlackScholesParams {
    double sigma;
};

/// X is Laplace distributed with standard deviation `sigma` at maturity.
struct LaplaceParams {
    double sigma;
};

/// kappa: mean reversion speed, eta: long-run variance, theta: vol of vol,
/// v0: initial variance, rho: correlation.
struct HestonParams {
    double kappa;
    double eta;
    double theta;
    double v0;
    double rho;
};

struct VarianceGammaParams {
    double sigma;
    double theta;
    double nu;
};

struct CgmyParams {
    double C;
    double G;
    double M;
    double Y;
};

/// intensity: jumps per year, mean_jump: expected percentage jump (kappa > -1),
/// jump_vol: standard deviation of the log jump size.
struct MertonParams {
    double sigma;
    double intensity;
    double mean_jump;
    double jump_vol;
};

/// Stock price model identifier plus its validated parameter set.
class ModelSpec {
public:
    using Params = std::variant<BlackScholesParams, LaplaceParams, HestonParams,
                                VarianceGammaParams, CgmyParams, MertonParams>;

    /// Throws InvalidArgument when a parameter leaves its admissible range.
    explicit ModelSpec(Params params);

    static ModelSpec black_scholes(double sigma) { return ModelSpec(BlackScholesParams{sigma}); }
    static ModelSpec laplace(double sigma) { return ModelSpec(LaplaceParams{sigma}); }
    static ModelSpec heston(double kappa, double eta, double theta, double v0, double rho) {
        return ModelSpec(HestonParams{kappa, eta, theta, v0, rho});
    }
    static ModelSpec variance_gamma(double sigma, double theta, double nu) {
        return ModelSpec(VarianceGammaParams{sigma, theta, nu});
    }
    static ModelSpec cgmy(double C, double G, double M, double Y) {
        return ModelSpec(CgmyParams{C, G, M, Y});
    }
    static ModelSpec merton(double sigma, double intensity, double mean_jump, double jump_vol) {
        return ModelSpec(MertonParams{sigma, intensity, mean_jump, jump_vol});
    }

    ModelKind kind() const;
    const Params& params() const { return params_; }

    template <class P>
    const P& as() const {
        return std::get<P>(params_);
    }

private:
    Params params_;
};

/// Spot, continuously compounded rate and maturity in years.
class MarketContext {
public:
    MarketContext(double spot, double rate, double maturity);

    double spot() const { return spot_; }
    double rate() const { return rate_; }
    double maturity() const { return maturity_; }
    double discount() const;

private:
    double spot_;
    double rate_;
    double maturity_;
};

/// Characteristic function of the centralized log-return
/// X = log S_T - E[log S_T], bound to one model and market.
///
/// The deterministic part log S0 + rT never enters the phase, so evaluating
/// at large u (N up to 1e7 terms) does not lose digits to phase cancellation.
class CenteredCf {
public:
    CenteredCf(const ModelSpec& model, const MarketContext& ctx);

    Complex operator()(Complex u) const;
    /// log phi_X(u) on the branch continuous from u = 0.
    Complex log(Complex u) const;
    double mean_log_price() const { return mean_log_; }
    const ModelSpec& model() const { return model_; }
    const MarketContext& market() const { return ctx_; }

private:
    ModelSpec model_;
    MarketContext ctx_;
    double increment_mean_;  // E[log S_T] - log S0 - rT
    double mean_log_;
};

/// phi_{log S_T}(u). Accepts complex u so damped transforms can reuse it.
Complex char_fn(const ModelSpec& model, const MarketContext& ctx, Complex u);

double mean_log_price(const ModelSpec& model, const MarketContext& ctx);

Complex centered_char_fn(const ModelSpec& model, const MarketContext& ctx, Complex u);

/// Supplies kappa_1..kappa_max of log S_T when no closed form exists (Heston).
using CumulantFallback =
    std::function<std::vector<double>(const ModelSpec&, const MarketContext&, int max_order)>;

/// Cumulants kappa_1..kappa_max_order of log S_T; element i holds order i+1.
/// max_order must be one of 1, 2, 4, 6, 8. Heston orders above 2 need
/// `fallback`, otherwise NumericFallbackRequired is thrown.
std::vector<double> cumulants(const ModelSpec& model, const MarketContext& ctx, int max_order,
                              const CumulantFallback& fallback = {});

/// Closed-form cumulant of order n >= 2; false when none exists.
bool analytic_cumulant(const ModelSpec& model, const MarketContext& ctx, int n, double& out);

}  // namespace cospricer
