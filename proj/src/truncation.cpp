#include "cospricer/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cospricer/errors.hpp"
#include "cospricer/numerics.hpp"

namespace cospricer {
namespace {

using detail::require;

double checked_sqrt(double x, const char* what) {
    if (!(x >= 0.0)) throw InvalidCumulant(std::string("cumulant_range: negative radicand in ") + what);
    return std::sqrt(x);
}

}  // namespace

std::string_view to_string(RangeProvenance p) {
    switch (p) {
        case RangeProvenance::markov: return "markov";
        case RangeProvenance::cumulants: return "cumulants";
        case RangeProvenance::manual: return "manual";
    }
    return "?";
}

TruncationRange TruncationRange::manual(double M, double L) {
    require<InvalidArgument>(M > 0.0 && L >= M && std::isfinite(L), "range: need 0 < M <= L");
    TruncationRange r;
    r.M = M;
    r.L = L;
    r.provenance = RangeProvenance::manual;
    return r;
}

ToleranceSpec::ToleranceSpec(double eps, double k_bound) : epsilon(eps), K_bound(k_bound) {
    require<InvalidArgument>(eps > 0.0, "tolerance: epsilon must be > 0");
    require<InvalidArgument>(k_bound > 0.0, "tolerance: K_bound must be > 0");
}

TruncationRange cumulant_range(double c1, double c2, double c4, double c6, int n_c) {
    require<InvalidArgument>(n_c == 2 || n_c == 4 || n_c == 6, "cumulant_range: n_c must be 2, 4 or 6");
    if (!(c2 > 0.0)) throw InvalidCumulant("cumulant_range: c2 must be > 0");
    double width = 0.0;
    switch (n_c) {
        case 2: width = 12.0 * std::sqrt(c2); break;
        case 4: width = 10.0 * std::sqrt(c2 + checked_sqrt(c4, "c4")); break;
        default: {
            const double inner = c4 + checked_sqrt(c6, "c6");
            width = 10.0 * std::sqrt(c2 + checked_sqrt(inner, "c4 + sqrt(c6)"));
        }
    }
    TruncationRange r;
    r.L = r.M = std::abs(c1) + width;
    r.provenance = RangeProvenance::cumulants;
    r.n_c = n_c;
    return r;
}

TruncationRange cumulant_range(const ModelSpec& model, const MarketContext& ctx, int n_c,
                               const CumulantFallback& fallback) {
    const CumulantFallback fb = fallback ? fallback : CumulantFallback(numeric_cumulants);
    const auto k = cumulants(model, ctx, n_c, fb);
    const double c4 = n_c >= 4 ? k[3] : 0.0;
    const double c6 = n_c >= 6 ? k[5] : 0.0;
    return cumulant_range(0.0, k[1], c4, c6, n_c);
}

double markov_M(const ToleranceSpec& tol, double mu_n, int n) {
    require<InvalidArgument>(mu_n > 0.0, "markov_M: mu_n must be > 0");
    require<InvalidArgument>(n >= 2 && n % 2 == 0, "markov_M: n must be even and >= 2");
    return std::pow(2.0 * tol.K_bound * mu_n / tol.epsilon, 1.0 / n);
}

double markov_L(double M, double sigma, const ToleranceSpec& tol) {
    require<InvalidArgument>(M > 0.0 && sigma > 0.0, "markov_L: M and sigma must be > 0");
    constexpr double sqrt2 = std::numbers::sqrt2;
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double eps2 = tol.epsilon * tol.epsilon;
    const double K2 = tol.K_bound * tol.K_bound;
    const double scale = -sigma / (2.0 * sqrt2);
    const double poly = sigma * sigma / (M * M) + 2.0 * sqrt2 * sigma / M + 4.0;
    const double t1 = scale * std::log(sqrt2 * sigma * eps2 / (72.0 * M * K2) * 12.0 / pi2 / poly);
    const double t2 = scale * std::log(2.0 * sqrt2 * sigma * eps2 / (72.0 * M * K2));
    return std::max({M, t1, t2});
}

TruncationRange markov_range(const ModelSpec& model, const MarketContext& ctx,
                             const ToleranceSpec& tol, int n, const MomentProvider& provider,
                             double sigma_safety) {
    require<InvalidArgument>(sigma_safety >= 1.0, "markov_range: sigma_safety must be >= 1");
    const double mu2 = provider.central_moment(model, ctx, 2).value;
    const double mu_n = n == 2 ? mu2 : provider.central_moment(model, ctx, n).value;
    TruncationRange r;
    r.M = markov_M(tol, mu_n, n);
    r.L = markov_L(r.M, sigma_safety * std::sqrt(mu2), tol);
    r.provenance = RangeProvenance::markov;
    r.epsilon = tol.epsilon;
    r.n = n;
    return r;
}

TruncationRange markov_range(const ModelSpec& model, const MarketContext& ctx,
                             const ToleranceSpec& tol, int n) {
    return markov_range(model, ctx, tol, n, DefaultMomentProvider());
}

// ---------------------------------------------------------------------------

namespace {

// int_{L}^{L+cutoff} g(x) dx, panel width at most `panel`.
double tail_integral(const std::function<double(double)>& g, double from, double cutoff,
                     double panel, double tol) {
    const auto panels = static_cast<std::size_t>(std::ceil(cutoff / panel));
    const double width = cutoff / static_cast<double>(panels);
    const double panel_tol = std::max(tol / static_cast<double>(panels), 1e-300);
    std::vector<double> parts(panels);
    for (std::size_t j = 0; j < panels; ++j) {
        const double a = from + width * static_cast<double>(j);
        parts[j] = numerics::adaptive_simpson(g, a, a + width, panel_tol);
    }
    return numerics::pairwise_sum(parts);
}

}  // namespace

BLEstimate estimate_BL(const std::function<double(double)>& density, double L, int k_max,
                       double cutoff, double tol) {
    require<InvalidArgument>(L > 0.0 && cutoff > 0.0, "estimate_BL: L and cutoff must be > 0");
    require<InvalidArgument>(k_max >= 64, "estimate_BL: k_max must be >= 64");

    std::vector<double> terms(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double w = k * std::numbers::pi / (2.0 * L);
        const double panel = k == 0 ? cutoff : std::min(cutoff, std::numbers::pi / w);
        auto right = [&](double x) { return density(x) * std::cos(w * (x + L)); };
        auto left = [&](double x) { return density(-x) * std::cos(w * (L - x)); };
        const double coeff =
            tail_integral(right, L, cutoff, panel, tol) + tail_integral(left, L, cutoff, panel, tol);
        terms[static_cast<std::size_t>(k)] = coeff * coeff / L;
    }
    BLEstimate est;
    est.value = numerics::pairwise_sum(terms);
    const auto upper = std::span<const double>(terms).subspan(static_cast<std::size_t>(k_max / 2) + 1);
    est.residue = numerics::pairwise_sum(upper);
    // Below the quadrature noise floor the ratio is meaningless.
    const double noise = static_cast<double>(k_max + 1) * 4.0 * tol * tol / L;
    if (est.residue > std::max(1e-3 * est.value, noise))
        throw SlowDecay("estimate_BL: tail of the k-sum is " + std::to_string(est.residue / est.value) +
                        " of the total at k_max=" + std::to_string(k_max));
    return est;
}

double tail_energy_bound(const std::function<double(double)>& density, double L, double cutoff) {
    auto g = [&](double x) {
        const double a = x * density(x);
        const double b = x * density(-x);
        return a * a + b * b;
    };
    const double energy = tail_integral(g, L, cutoff, cutoff / 64.0, 1e-16);
    return 2.0 * std::numbers::pi * std::numbers::pi / (3.0 * L * L) * energy;
}

double pareto_bl_bound(double beta, double alpha, double L) {
    const double b2a = std::pow(beta, 2.0 * alpha);
    const double denom = std::pow(L, 2.0 * alpha + 1.0);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return b2a / denom + 4.0 * alpha * alpha * b2a / (pi2 * denom) * (pi2 / 6.0);
}

}  // namespace cospricer
