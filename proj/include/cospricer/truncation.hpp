#pragma once

#include <functional>
#include <string_view>

#include "cospricer/models.hpp"
#include "cospricer/moments.hpp"

namespace cospricer {

enum class RangeProvenance { markov, cumulants, manual };

std::string_view to_string(RangeProvenance p);

/// Payoff window [-M, M] inside the density window [-L, L].
struct TruncationRange {
    double M = 0.0;
    double L = 0.0;
    RangeProvenance provenance = RangeProvenance::manual;
    double epsilon = 0.0;  // markov only
    int n = 0;             // markov only
    int n_c = 0;           // cumulants only

    /// Throws InvalidArgument unless 0 < M <= L.
    static TruncationRange manual(double M, double L);
    static TruncationRange manual(double L) { return manual(L, L); }
};

/// Target absolute pricing error and payoff supremum.
struct ToleranceSpec {
    ToleranceSpec(double epsilon, double K_bound);
    double epsilon;
    double K_bound;
};

/// [c1 - w, c1 + w] with w = 12 sqrt(c2)                     (n_c = 2)
///                         10 sqrt(c2 + sqrt(c4))           (n_c = 4)
///                         10 sqrt(c2 + sqrt(c4 + sqrt(c6))) (n_c = 6)
/// Returned as the symmetric half-width L = |c1| + w, M = L.
TruncationRange cumulant_range(double c1, double c2, double c4, double c6, int n_c);

/// Cumulants rule straight from a model: c2, c4, c6 of log S_T with c1 = 0.
TruncationRange cumulant_range(const ModelSpec& model, const MarketContext& ctx, int n_c,
                               const CumulantFallback& fallback = {});

/// (2 K mu_n / eps)^{1/n}.
double markov_M(const ToleranceSpec& tol, double mu_n, int n);

/// max(M, t1, t2) for the Laplace majorant with standard deviation sigma.
double markov_L(double M, double sigma, const ToleranceSpec& tol);

/// sigma = sigma_safety * sqrt(mu_2), M = markov_M, L = markov_L.
TruncationRange markov_range(const ModelSpec& model, const MarketContext& ctx,
                             const ToleranceSpec& tol, int n, const MomentProvider& provider,
                             double sigma_safety = 1.0);

TruncationRange markov_range(const ModelSpec& model, const MarketContext& ctx,
                             const ToleranceSpec& tol, int n);

// ---------------------------------------------------------------------------
// Tail-energy diagnostics.

struct BLEstimate {
    double value = 0.0;
    /// |B_kmax - B_{kmax/2}|: change over the upper half of the k range.
    double residue = 0.0;
};

/// B(L) = sum_k (1/L) |int_{|x|>L} f(x) cos(k pi (x+L)/(2L)) dx|^2 for
/// k = 0..k_max, with each tail integrated over [L, L+cutoff] by adaptive
/// Simpson on half-period panels. Throws SlowDecay if residue exceeds
/// 1e-3 of the value.
BLEstimate estimate_BL(const std::function<double(double)>& density, double L, int k_max,
                       double cutoff, double tol = 1e-14);

/// (2 pi^2 / (3 L^2)) int_{|x|>L} |x f(x)|^2 dx over [L, L+cutoff] per side.
double tail_energy_bound(const std::function<double(double)>& density, double L, double cutoff);

/// beta^{2a}/L^{2a+1} + 4 a^2 beta^{2a} / (pi^2 L^{2a+1}) * pi^2/6.
double pareto_bl_bound(double beta, double alpha, double L);

}  // namespace cospricer
