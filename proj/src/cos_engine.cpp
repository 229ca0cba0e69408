#include "cospricer/cos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cospricer/errors.hpp"
#include "cospricer/numerics.hpp"

namespace cospricer {
namespace {

using detail::require;

// Re{z i^k} without evaluating i^k in floating point.
double real_rotated(Complex z, int k) {
    switch (k & 3) {
        case 0: return z.real();
        case 1: return -z.imag();
        case 2: return -z.real();
        default: return z.imag();
    }
}

template <class Phi>
CosExpansion expand(const Phi& phi, double L, int N) {
    require<InvalidArgument>(L > 0.0 && N >= 1, "cos_coefficients: need L > 0 and N >= 1");
    CosExpansion e{L, N, std::vector<double>(static_cast<std::size_t>(N) + 1)};
    const double step = std::numbers::pi / (2.0 * L);
    e.c[0] = 1.0 / L;
    for (int k = 1; k <= N; ++k) e.c[static_cast<std::size_t>(k)] = real_rotated(phi(Complex(k * step, 0.0)), k) / L;
    return e;
}

void check_range(const TruncationRange& r) {
    require<InvalidArgument>(r.M > 0.0 && r.L >= r.M, "price: range needs 0 < M <= L");
}

double parity(double put, const MarketContext& ctx, double strike, OptionKind kind) {
    if (kind == OptionKind::put) return put;
    return put + ctx.spot() - strike * ctx.discount();
}

// Sequential extended-precision accumulation of sum' c_k v_k; `at` receives
// the partial sum after each requested N (ascending).
void accumulate(const CosExpansion& e, const PayoffCoefficients& v, std::span<const int> Ns,
                std::span<double> at) {
    long double sum = 0.5L * e.c[0] * static_cast<long double>(v.v[0]);
    std::size_t next = 0;
    for (int k = 1; k <= e.N && next < Ns.size(); ++k) {
        sum += static_cast<long double>(e.c[static_cast<std::size_t>(k)]) * v.v[static_cast<std::size_t>(k)];
        while (next < Ns.size() && Ns[next] == k) at[next++] = static_cast<double>(sum);
    }
}

}  // namespace

std::string_view to_string(OptionKind kind) { return kind == OptionKind::put ? "put" : "call"; }

OptionKind option_kind_from_string(std::string_view name) {
    if (name == "put") return OptionKind::put;
    if (name == "call") return OptionKind::call;
    throw InvalidArgument("unknown option kind '" + std::string(name) + "'");
}

CosExpansion cos_coefficients(const CharFn& phi_X, double L, int N) { return expand(phi_X, L, N); }

CosExpansion cos_coefficients(const CenteredCf& phi_X, double L, int N) { return expand(phi_X, L, N); }

PayoffCoefficients put_coefficients(double strike, double mean_log, double M, double L, int N) {
    require<InvalidArgument>(strike > 0.0, "put_coefficients: strike must be > 0");
    require<InvalidArgument>(M > 0.0 && L >= M && N >= 0, "put_coefficients: need 0 < M <= L, N >= 0");
    PayoffCoefficients p;
    p.M = M;
    p.L = L;
    p.N = N;
    p.strike = strike;
    p.mean_log = mean_log;
    p.d = std::min(std::log(strike) - mean_log, M);
    p.v.assign(static_cast<std::size_t>(N) + 1, 0.0);
    if (p.d < -M) return p;

    // v_0 cancels K(d+M) against e^m(e^d - e^-M); extended precision keeps
    // the last digits at N ~ 1e6.
    using ld = long double;
    const ld d = std::min(std::log(static_cast<ld>(strike)) - mean_log, static_cast<ld>(M));
    const ld em = std::exp(static_cast<ld>(mean_log));
    const ld ed = std::exp(d);
    const ld emM = std::exp(-static_cast<ld>(M));
    p.v[0] = static_cast<double>(strike * (d + M) - em * (ed - emM));
    const ld step = std::numbers::pi_v<ld> / (2.0L * L);
    for (int k = 1; k <= N; ++k) {
        const ld w = k * step;
        const ld a = w * (d + L);
        const ld b = w * (L - M);
        const ld sa = std::sin(a), ca = std::cos(a);
        const ld sb = std::sin(b), cb = std::cos(b);
        const ld psi0 = (sa - sb) / w;
        const ld psi1 = (ed * (w * sa + ca) - emM * (w * sb + cb)) / (1.0L + w * w);
        p.v[static_cast<std::size_t>(k)] = static_cast<double>(strike * psi0 - em * psi1);
    }
    return p;
}

PriceResult price(const ModelSpec& model, const MarketContext& ctx, double strike, OptionKind kind,
                  const TruncationRange& range, int N) {
    const int Ns[] = {N};
    const auto p = price_curve(model, ctx, strike, kind, range, Ns);
    return {p[0], N, range, true};
}

std::vector<double> price_curve(const ModelSpec& model, const MarketContext& ctx, double strike,
                                OptionKind kind, const TruncationRange& range,
                                std::span<const int> Ns) {
    check_range(range);
    require<InvalidArgument>(!Ns.empty() && std::is_sorted(Ns.begin(), Ns.end()) && Ns.front() >= 1,
                             "price_curve: N values must be ascending and >= 1");
    const CenteredCf phi(model, ctx);
    const int n_max = Ns.back();
    const auto c = cos_coefficients(phi, range.L, n_max);
    const auto v = put_coefficients(strike, phi.mean_log_price(), range.M, range.L, n_max);
    std::vector<double> out(Ns.size());
    accumulate(c, v, Ns, out);
    for (auto& p : out) p = parity(ctx.discount() * p, ctx, strike, kind);
    return out;
}

double density(const CosExpansion& e, double x) {
    if (!(std::abs(x) <= e.L)) throw OutOfRange("density: x outside [-L, L]");
    const double step = std::numbers::pi * (x + e.L) / (2.0 * e.L);
    numerics::CompensatedSum sum;
    sum.add(0.5 * e.c[0]);
    for (int k = 1; k <= e.N; ++k) sum.add(e.c[static_cast<std::size_t>(k)] * std::cos(k * step));
    return sum.value();
}

double density(const CharFn& phi_X, double L, int N, double x) {
    if (!(std::abs(x) <= L)) throw OutOfRange("density: x outside [-L, L]");
    return density(cos_coefficients(phi_X, L, N), x);
}

PriceResult adaptive_N(const ModelSpec& model, const MarketContext& ctx, double strike,
                       OptionKind kind, const TruncationRange& range, double epsilon) {
    require<InvalidArgument>(epsilon > 0.0, "adaptive_N: epsilon must be > 0");
    check_range(range);
    std::vector<int> Ns;
    for (int n = kAdaptiveNStart; n <= kAdaptiveNCap; n *= 2) Ns.push_back(n);
    // One pass to the cap would waste time on easy cases; grow in chunks instead.
    std::size_t have = 0;
    std::vector<double> prices;
    while (have < Ns.size()) {
        const std::size_t want = std::min(Ns.size(), std::max<std::size_t>(have * 2, 4));
        prices = price_curve(model, ctx, strike, kind, range, std::span<const int>(Ns).first(want));
        for (std::size_t i = std::max<std::size_t>(have, 1); i < want; ++i)
            if (std::abs(prices[i] - prices[i - 1]) < epsilon / 10.0) return {prices[i], Ns[i], range, true};
        have = want;
    }
    throw NoConvergence("adaptive_N: no convergence up to N = " + std::to_string(kAdaptiveNCap) +
                        " (last change " + std::to_string(std::abs(prices.back() - prices[prices.size() - 2])) +
                        ")");
}

}  // namespace cospricer
