#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "cospricer/models.hpp"

namespace cospricer {

enum class MomentMethod { analytic, finite_difference, monte_carlo, surrogate };

std::string_view to_string(MomentMethod method);

/// Moment order plus the estimator that produced (or should produce) it.
struct MomentSpec {
    MomentSpec(int order, MomentMethod method);
    int n;
    MomentMethod method;
};

// ---------------------------------------------------------------------------
// Cumulant <-> moment conversion (complete Bell polynomial recursion).
//
// Cumulant sequences are indexed by order: kappa[i] holds kappa_{i+1}. The
// first cumulant is ignored, so the result is always a central moment.

/// Central moment mu_n. Throws MissingCumulant if an order <= n is absent
/// (sequence too short or NaN entry).
double moments_from_cumulants(std::span<const double> kappa, int n);

/// mu_0..mu_n (mu_0 = 1, mu_1 = 0).
std::vector<double> central_moments_from_cumulants(std::span<const double> kappa, int n);

/// Inverse map: central moments mu_0..mu_n to kappa_1..kappa_n with kappa_1 = 0.
std::vector<double> cumulants_from_central_moments(std::span<const double> mu);

// ---------------------------------------------------------------------------
// Numeric differentiation of a centered characteristic function.

using CharFn = std::function<Complex(Complex)>;

inline constexpr double kDefaultFdStep = 0.25;
inline constexpr int kFdStencilPoints = 32;

/// mu_n = i^{-n} d^n/du^n phi_X(u) at u = 0.
///
/// The stencil is the central (symmetric) one on a circle of radius
/// h / sqrt(mu_2) around the origin in the complex plane, i.e. phi_X is
/// evaluated at complex arguments (the moment generating function). Two radii
/// h and h/2 are combined by Richardson extrapolation. `h` is dimensionless,
/// 0 < h <= 1. Throws IllConditioned if the two radii disagree by more than
/// 1e-3 relative, or the imaginary residue exceeds 1e-6 of the result.
double fd_moment(const CharFn& phi, int n, double h = kDefaultFdStep);

// ---------------------------------------------------------------------------
// Heston Monte Carlo (full truncation Euler).

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

inline constexpr int kMcStepsPerYear = 250;
inline constexpr int kMcBlockPaths = 2048;

/// Terminal log-prices of a full-truncation Euler simulation. Paths are
/// generated in fixed blocks of kMcBlockPaths, each seeded from (seed, block
/// index), so the output does not depend on `threads`.
std::vector<double> simulate_heston_log_prices(const HestonParams& p, const MarketContext& ctx,
                                               int paths, int steps, std::uint64_t seed,
                                               unsigned threads = 0);

/// Sample n-th central moment of log S_T with bootstrap standard error.
/// steps <= 0 selects kMcStepsPerYear per year of maturity.
McEstimate mc_moment(const ModelSpec& model, const MarketContext& ctx, int n, int paths,
                     int steps, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Moment providers.

struct MomentEstimate {
    double value = 0.0;
    MomentMethod method = MomentMethod::analytic;
    double std_error = 0.0;
};

class MomentProvider {
public:
    virtual ~MomentProvider() = default;
    /// Central moment mu_n of X = log S_T - E[log S_T].
    virtual MomentEstimate central_moment(const ModelSpec& model, const MarketContext& ctx,
                                          int n) const = 0;
};

/// analytic -> finite difference -> Monte Carlo; each escalation is recorded
/// in MomentEstimate::method.
class DefaultMomentProvider : public MomentProvider {
public:
    struct Options {
        std::vector<double> fd_steps{0.25, 0.1, 0.05};
        bool allow_monte_carlo = true;
        int mc_paths = 200000;
        int mc_steps = 0;
        std::uint64_t mc_seed = 20220101;
    };

    DefaultMomentProvider() = default;
    explicit DefaultMomentProvider(Options options) : options_(std::move(options)) {}

    MomentEstimate central_moment(const ModelSpec& model, const MarketContext& ctx,
                                  int n) const override;

    /// Finite-difference moment with the step ladder; IllConditioned if every
    /// step fails.
    double numeric_moment(const CenteredCf& phi, int n) const;

private:
    Options options_;
};

/// kappa_1..kappa_max of log S_T from finite-difference moments. Usable as
/// the CumulantFallback of cumulants().
std::vector<double> numeric_cumulants(const ModelSpec& model, const MarketContext& ctx,
                                      int max_order);

// ---------------------------------------------------------------------------
// Precomputed moment surrogate.

/// Knots per axis and mu_n at every knot (row-major, last axis fastest).
class SurrogateGrid {
public:
    SurrogateGrid(std::vector<std::vector<double>> axes, std::vector<double> values, int n);

    const std::vector<std::vector<double>>& axes() const { return axes_; }
    const std::vector<double>& values() const { return values_; }
    int order() const { return n_; }
    std::size_t dimension() const { return axes_.size(); }

private:
    std::vector<std::vector<double>> axes_;
    std::vector<double> values_;
    int n_;
};

using PointEstimator = std::function<double(std::span<const double> point)>;

SurrogateGrid surrogate_build(std::vector<std::vector<double>> axes, int n,
                              const PointEstimator& estimator);

/// Multilinear interpolation; OutOfDomain outside the axes' bounding box.
double surrogate_eval(const SurrogateGrid& grid, std::span<const double> point);

/// Text format: "surrogate,<n>,<dim>", one "axis,<k0>,<k1>,..." line per
/// axis, then one value per line in row-major order.
void save_surrogate(const SurrogateGrid& grid, std::ostream& out);
SurrogateGrid load_surrogate(std::istream& in);

/// Heston parameter point (kappa, eta, theta, v0, rho, T).
using HestonPoint = std::array<double, 6>;

/// Feasible set (1e-3,10) x (1e-3,2)^3 x (-1,1) x (1/12,2), closed at the ends.
struct HestonDomain {
    static constexpr std::array<double, 6> lower{1e-3, 1e-3, 1e-3, 1e-3, -1.0, 1.0 / 12.0};
    static constexpr std::array<double, 6> upper{10.0, 2.0, 2.0, 2.0, 1.0, 2.0};
    static bool contains(std::span<const double> point);
};

HestonPoint heston_point(const ModelSpec& model, const MarketContext& ctx);

/// mu_n at a Heston point using `method` (finite_difference or monte_carlo).
PointEstimator heston_moment_estimator(int n, MomentMethod method, int mc_paths = 20000,
                                       std::uint64_t seed = 7);

/// Serves Heston mu_n from a grid and everything else from the default chain.
class SurrogateMomentProvider : public MomentProvider {
public:
    explicit SurrogateMomentProvider(SurrogateGrid grid) : grid_(std::move(grid)) {}

    MomentEstimate central_moment(const ModelSpec& model, const MarketContext& ctx,
                                  int n) const override;

private:
    SurrogateGrid grid_;
    DefaultMomentProvider fallback_;
};

}  // namespace cospricer
