#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cospricer/models.hpp"
#include "cospricer/moments.hpp"
#include "cospricer/truncation.hpp"

namespace cospricer {

enum class OptionKind { put, call };

std::string_view to_string(OptionKind kind);
OptionKind option_kind_from_string(std::string_view name);

/// Cosine coefficients c_0..c_N of the centered density on [-L, L].
struct CosExpansion {
    double L = 0.0;
    int N = 0;
    std::vector<double> c;
};

/// Put payoff coefficients v_0..v_N on [-M, M] inside [-L, L].
struct PayoffCoefficients {
    double M = 0.0;
    double L = 0.0;
    int N = 0;
    std::vector<double> v;
    double d = 0.0;
    double strike = 0.0;
    double mean_log = 0.0;
};

struct PriceResult {
    double price = 0.0;
    int N_used = 0;
    TruncationRange range;
    bool converged = true;
};

/// c_k = (1/L) Re{phi_X(k pi / 2L) i^k}.
CosExpansion cos_coefficients(const CharFn& phi_X, double L, int N);
CosExpansion cos_coefficients(const CenteredCf& phi_X, double L, int N);

/// v_k = K Psi0(k) - e^m Psi1(k) with d = min(log K - m, M); all zero if d < -M.
PayoffCoefficients put_coefficients(double strike, double mean_log, double M, double L, int N);

/// e^{-rT} sum' c_k v_k with the k = 0 term halved. Calls by put-call parity.
PriceResult price(const ModelSpec& model, const MarketContext& ctx, double strike, OptionKind kind,
                  const TruncationRange& range, int N);

/// Prices for several N from a single pass over k = 0..max(Ns). Each entry
/// equals price(...) at that N.
std::vector<double> price_curve(const ModelSpec& model, const MarketContext& ctx, double strike,
                                OptionKind kind, const TruncationRange& range,
                                std::span<const int> Ns);

/// sum' c_k cos(k pi (x + L) / 2L). OutOfRange if |x| > L.
double density(const CosExpansion& expansion, double x);
double density(const CharFn& phi_X, double L, int N, double x);

inline constexpr int kAdaptiveNStart = 64;
inline constexpr int kAdaptiveNCap = 1 << 21;

/// Doubles N from 64 until |p(2N) - p(N)| < epsilon / 10 and returns the
/// price at 2N. Throws NoConvergence when 2N would exceed 2^21.
PriceResult adaptive_N(const ModelSpec& model, const MarketContext& ctx, double strike,
                       OptionKind kind, const TruncationRange& range, double epsilon);

}  // namespace cospricer
