#include "cospricer/moments.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "cospricer/errors.hpp"
#include "cospricer/numerics.hpp"

namespace cospricer {
namespace {

using detail::require;

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Variance estimate from the real-axis curvature of log phi, refined until the
// probe step sits at a tenth of a standard deviation in frequency units.
double probe_variance(const CharFn& phi) {
    double step = 1e-3;
    double var = 0.0;
    for (int iter = 0; iter < 6; ++iter) {
        const double re_log = std::log(std::abs(phi(Complex(step, 0.0))));
        var = -2.0 * re_log / (step * step);
        if (!(var > 0.0) || !std::isfinite(var)) return 0.0;
        const double next = 0.1 / std::sqrt(var);
        if (std::abs(next / step - 1.0) < 1e-3) break;
        step = next;
    }
    return var;
}

struct CircleDerivative {
    double re;
    double im;
};

// n! / r^n * mean_j MGF(r w^j) w^{-jn},  MGF(z) = phi(-i z).
CircleDerivative circle_stencil(const CharFn& phi, int n, double radius) {
    const int P = kFdStencilPoints;
    std::vector<double> re(P), im(P);
    for (int j = 0; j < P; ++j) {
        const double angle = 2.0 * std::numbers::pi * j / P;
        const Complex z = std::polar(radius, angle);
        const Complex mgf = phi(Complex(0.0, -1.0) * z);
        const Complex term = mgf * std::polar(1.0, -angle * n);
        re[j] = term.real();
        im[j] = term.imag();
    }
    const double scale = factorial(n) / std::pow(radius, n) / P;
    return {numerics::pairwise_sum(re) * scale, numerics::pairwise_sum(im) * scale};
}

}  // namespace

std::string_view to_string(MomentMethod method) {
    switch (method) {
        case MomentMethod::analytic: return "analytic";
        case MomentMethod::finite_difference: return "finite_difference";
        case MomentMethod::monte_carlo: return "monte_carlo";
        case MomentMethod::surrogate: return "surrogate";
    }
    return "?";
}

MomentSpec::MomentSpec(int order, MomentMethod m) : n(order), method(m) {
    require<InvalidArgument>(order == 2 || order == 4 || order == 6 || order == 8,
                             "MomentSpec: order must be one of 2, 4, 6, 8");
}

std::vector<double> central_moments_from_cumulants(std::span<const double> kappa, int n) {
    require<InvalidArgument>(n >= 0, "moments_from_cumulants: negative order");
    if (static_cast<int>(kappa.size()) < n)
        throw MissingCumulant("moments_from_cumulants: cumulant of order " +
                              std::to_string(kappa.size() + 1) + " missing");
    for (int i = 1; i < n; ++i)
        if (std::isnan(kappa[static_cast<std::size_t>(i)]))
            throw MissingCumulant("moments_from_cumulants: cumulant of order " +
                                  std::to_string(i + 1) + " missing");
    std::vector<double> mu(static_cast<std::size_t>(n) + 1, 0.0);
    mu[0] = 1.0;
    for (int j = 2; j <= n; ++j) {
        double s = 0.0;
        for (int i = 2; i <= j; ++i)
            s += binomial(j - 1, i - 1) * kappa[static_cast<std::size_t>(i - 1)] * mu[j - i];
        mu[j] = s;
    }
    return mu;
}

double moments_from_cumulants(std::span<const double> kappa, int n) {
    require<InvalidArgument>(n >= 1, "moments_from_cumulants: order must be >= 1");
    return central_moments_from_cumulants(kappa, n)[static_cast<std::size_t>(n)];
}

std::vector<double> cumulants_from_central_moments(std::span<const double> mu) {
    const int n = static_cast<int>(mu.size()) - 1;
    std::vector<double> kappa(static_cast<std::size_t>(std::max(n, 0)), 0.0);
    for (int j = 2; j <= n; ++j) {
        double s = mu[j];
        for (int i = 2; i < j; ++i)
            s -= binomial(j - 1, i - 1) * kappa[static_cast<std::size_t>(i - 1)] * mu[j - i];
        kappa[static_cast<std::size_t>(j - 1)] = s;
    }
    return kappa;
}

namespace {

// Richardson-combined circle stencil. Tolerances are relative to `scale`.
double stencil_moment(const CharFn& phi, int n, double h, double var, double scale) {
    const double radius = h / std::sqrt(var);
    const auto coarse = circle_stencil(phi, n, radius);
    const auto fine = circle_stencil(phi, n, 0.5 * radius);
    const double gain = std::ldexp(1.0, kFdStencilPoints) - 1.0;
    const double value = fine.re + (fine.re - coarse.re) / gain;

    if (!std::isfinite(value) || !std::isfinite(coarse.re))
        throw IllConditioned("fd_moment: non-finite stencil value (radius beyond analyticity?)");
    const double disagreement = std::abs(fine.re - coarse.re) / scale;
    if (!(disagreement <= 1e-3))
        throw IllConditioned("fd_moment: Richardson disagreement " + std::to_string(disagreement) +
                             " at n=" + std::to_string(n));
    if (!(std::abs(fine.im) <= 1e-6 * scale))
        throw IllConditioned("fd_moment: imaginary residue too large");
    return value;
}

}  // namespace

double fd_moment(const CharFn& phi, int n, double h) {
    require<InvalidArgument>(n >= 2 && n <= 8 && n % 2 == 0, "fd_moment: n must be even in [2, 8]");
    require<InvalidArgument>(h > 0.0 && h <= 1.0, "fd_moment: step must lie in (0, 1]");

    const double var = probe_variance(phi);
    if (var == 0.0) return 0.0;  // point mass
    // Even central moments are bounded below by var^{n/2}.
    const double floor = std::pow(var, n / 2);
    const auto coarse = circle_stencil(phi, n, h / std::sqrt(var));
    const double scale = std::max(std::abs(coarse.re), floor);
    return stencil_moment(phi, n, h, var, scale);
}

// ---------------------------------------------------------------------------

std::vector<double> simulate_heston_log_prices(const HestonParams& p, const MarketContext& ctx,
                                               int paths, int steps, std::uint64_t seed,
                                               unsigned threads) {
    require<InvalidArgument>(paths > 0 && steps > 0, "heston simulation: paths and steps must be > 0");
    const double dt = ctx.maturity() / steps;
    const double sqrt_dt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    const double x0 = std::log(ctx.spot());
    const int blocks = (paths + kMcBlockPaths - 1) / kMcBlockPaths;
    std::vector<double> out(static_cast<std::size_t>(paths));

    auto run_block = [&](int b) -> bool {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(b)};
        std::mt19937_64 gen(seq);
        std::normal_distribution<double> normal;
        const int first = b * kMcBlockPaths;
        const int last = std::min(paths, first + kMcBlockPaths);
        for (int i = first; i < last; ++i) {
            double x = x0;
            double v = p.v0;
            for (int s = 0; s < steps; ++s) {
                const double z1 = normal(gen);
                const double z2 = p.rho * z1 + rho_c * normal(gen);
                const double vp = std::max(v, 0.0);
                const double sv = std::sqrt(vp) * sqrt_dt;
                x += (ctx.rate() - 0.5 * vp) * dt + sv * z1;
                v += p.kappa * (p.eta - vp) * dt + p.theta * sv * z2;
                if (v > 1e6) return false;
            }
            out[static_cast<std::size_t>(i)] = x;
        }
        return true;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(blocks));
    std::vector<char> ok(static_cast<std::size_t>(blocks), 1);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int b = static_cast<int>(t); b < blocks; b += static_cast<int>(threads))
                    ok[static_cast<std::size_t>(b)] = run_block(b) ? 1 : 0;
            });
    }
    if (std::find(ok.begin(), ok.end(), 0) != ok.end())
        throw VarianceBlowup("heston simulation: variance path exceeded 1e6");
    return out;
}

namespace {

double sample_central_moment(std::span<const double> xs, int n) {
    const double mean = numerics::pairwise_sum(xs) / static_cast<double>(xs.size());
    std::vector<double> pw(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pw[i] = std::pow(xs[i] - mean, n);
    return numerics::pairwise_sum(pw) / static_cast<double>(xs.size());
}

}  // namespace

McEstimate mc_moment(const ModelSpec& model, const MarketContext& ctx, int n, int paths, int steps,
                     std::uint64_t seed) {
    require<InvalidArgument>(model.kind() == ModelKind::Heston,
                             "mc_moment: only the Heston model is simulated");
    require<InvalidArgument>(paths >= 10000, "mc_moment: at least 1e4 paths required");
    require<InvalidArgument>(n >= 2 && n % 2 == 0, "mc_moment: n must be even and >= 2");
    if (steps <= 0)
        steps = std::max(1, static_cast<int>(std::ceil(kMcStepsPerYear * ctx.maturity())));

    const auto xs = simulate_heston_log_prices(model.as<HestonParams>(), ctx, paths, steps, seed);
    McEstimate est;
    est.value = sample_central_moment(xs, n);

    constexpr int kBootstrap = 200;
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
    std::vector<double> resample(xs.size());
    std::vector<double> reps(kBootstrap);
    for (int b = 0; b < kBootstrap; ++b) {
        for (auto& r : resample) r = xs[pick(gen)];
        reps[static_cast<std::size_t>(b)] = sample_central_moment(resample, n);
    }
    const double m = numerics::pairwise_sum(reps) / kBootstrap;
    double ss = 0.0;
    for (double r : reps) ss += (r - m) * (r - m);
    est.std_error = std::sqrt(ss / (kBootstrap - 1));
    return est;
}

// ---------------------------------------------------------------------------

double DefaultMomentProvider::numeric_moment(const CenteredCf& phi, int n) const {
    std::string last_error = "no finite-difference step configured";
    for (double h : options_.fd_steps) {
        try {
            return fd_moment([&phi](Complex u) { return phi(u); }, n, h);
        } catch (const IllConditioned& e) {
            last_error = e.what();
        }
    }
    throw IllConditioned(last_error);
}

MomentEstimate DefaultMomentProvider::central_moment(const ModelSpec& model,
                                                     const MarketContext& ctx, int n) const {
    require<InvalidArgument>(n >= 2 && n % 2 == 0, "central_moment: n must be even and >= 2");
    std::vector<double> kappa{0.0};
    bool analytic = true;
    for (int j = 2; j <= n && analytic; ++j) {
        double k = 0.0;
        analytic = analytic_cumulant(model, ctx, j, k);
        kappa.push_back(k);
    }
    if (analytic) return {moments_from_cumulants(kappa, n), MomentMethod::analytic, 0.0};

    try {
        return {numeric_moment(CenteredCf(model, ctx), n), MomentMethod::finite_difference, 0.0};
    } catch (const IllConditioned&) {
        if (!options_.allow_monte_carlo || model.kind() != ModelKind::Heston) throw;
    }
    const auto mc = mc_moment(model, ctx, n, options_.mc_paths, options_.mc_steps, options_.mc_seed);
    return {mc.value, MomentMethod::monte_carlo, mc.std_error};
}

std::vector<double> numeric_cumulants(const ModelSpec& model, const MarketContext& ctx,
                                      int max_order) {
    require<InvalidArgument>(max_order >= 1 && max_order <= 8, "numeric_cumulants: order in [1, 8]");
    const CenteredCf cf(model, ctx);
    const CharFn phi = [&cf](Complex u) { return cf(u); };
    const DefaultMomentProvider provider;
    std::vector<double> mu(static_cast<std::size_t>(max_order) + 1, 0.0);
    mu[0] = 1.0;
    if (max_order >= 2) {
        mu[2] = provider.numeric_moment(cf, 2);
        for (int j = 3; j <= max_order; ++j) {
            if (j % 2 == 0) {
                mu[j] = provider.numeric_moment(cf, j);
                continue;
            }
            // Odd orders can vanish; judge the stencil against the standard-deviation scale.
            const double scale = std::pow(mu[2], 0.5 * j);
            std::string last_error;
            bool done = false;
            for (double h : {0.25, 0.1, 0.05}) {
                try {
                    mu[j] = stencil_moment(phi, j, h, mu[2], scale);
                    done = true;
                    break;
                } catch (const IllConditioned& e) {
                    last_error = e.what();
                }
            }
            if (!done) throw IllConditioned(last_error);
        }
    }
    auto kappa = cumulants_from_central_moments(mu);
    kappa[0] = cf.mean_log_price();
    return kappa;
}

// ---------------------------------------------------------------------------

SurrogateGrid::SurrogateGrid(std::vector<std::vector<double>> axes, std::vector<double> values, int n)
    : axes_(std::move(axes)), values_(std::move(values)), n_(n) {
    require<InvalidArgument>(!axes_.empty(), "surrogate: at least one axis required");
    std::size_t count = 1;
    for (const auto& axis : axes_) {
        require<InvalidArgument>(axis.size() >= 2, "surrogate: every axis needs >= 2 knots");
        for (std::size_t i = 1; i < axis.size(); ++i)
            require<InvalidArgument>(axis[i] > axis[i - 1], "surrogate: axes must be strictly increasing");
        count *= axis.size();
    }
    require<InvalidArgument>(values_.size() == count, "surrogate: value count does not match axes");
    for (double v : values_)
        require<InvalidArgument>(std::isfinite(v) && v > 0.0, "surrogate: stored moments must be > 0");
}

SurrogateGrid surrogate_build(std::vector<std::vector<double>> axes, int n,
                              const PointEstimator& estimator) {
    std::size_t count = 1;
    for (const auto& axis : axes) count *= axis.size();
    std::vector<double> values(count);
    std::vector<double> point(axes.size());
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rest = flat;
        for (std::size_t d = axes.size(); d-- > 0;) {
            point[d] = axes[d][rest % axes[d].size()];
            rest /= axes[d].size();
        }
        values[flat] = estimator(point);
    }
    return SurrogateGrid(std::move(axes), std::move(values), n);
}

double surrogate_eval(const SurrogateGrid& grid, std::span<const double> point) {
    const auto& axes = grid.axes();
    require<InvalidArgument>(point.size() == axes.size(), "surrogate_eval: dimension mismatch");
    const std::size_t dim = axes.size();
    std::vector<std::size_t> lo(dim);
    std::vector<double> w(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const auto& axis = axes[d];
        if (!(point[d] >= axis.front() && point[d] <= axis.back()))
            throw OutOfDomain("surrogate_eval: coordinate " + std::to_string(d) + " = " +
                              std::to_string(point[d]) + " outside the grid");
        auto it = std::upper_bound(axis.begin(), axis.end(), point[d]);
        std::size_t i = static_cast<std::size_t>(it - axis.begin());
        i = std::min(std::max<std::size_t>(i, 1), axis.size() - 1) - 1;
        lo[d] = i;
        w[d] = (point[d] - axis[i]) / (axis[i + 1] - axis[i]);
    }
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
        double weight = 1.0;
        std::size_t flat = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            const bool up = (corner >> d) & 1U;
            if (up && w[d] == 0.0) {
                weight = 0.0;
                break;
            }
            weight *= up ? w[d] : 1.0 - w[d];
            flat = flat * axes[d].size() + lo[d] + (up ? 1 : 0);
        }
        if (weight != 0.0) acc += weight * grid.values()[flat];
    }
    return acc;
}

void save_surrogate(const SurrogateGrid& grid, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "surrogate," << grid.order() << ',' << grid.dimension() << '\n';
    for (const auto& axis : grid.axes()) {
        out << "axis";
        for (double k : axis) out << ',' << k;
        out << '\n';
    }
    for (double v : grid.values()) out << v << '\n';
    out.precision(old_precision);
}

SurrogateGrid load_surrogate(std::istream& in) {
    std::string line;
    auto fail = [](const std::string& what) { return ConfigError("load_surrogate: " + what); };
    if (!std::getline(in, line) || line.rfind("surrogate,", 0) != 0) throw fail("missing header");
    int n = 0;
    std::size_t dim = 0;
    {
        std::istringstream hs(line.substr(10));
        char comma = 0;
        if (!(hs >> n >> comma >> dim) || comma != ',') throw fail("bad header");
    }
    std::vector<std::vector<double>> axes;
    for (std::size_t d = 0; d < dim; ++d) {
        if (!std::getline(in, line) || line.rfind("axis", 0) != 0) throw fail("missing axis line");
        std::vector<double> axis;
        std::istringstream ls(line.substr(4));
        std::string cell;
        while (std::getline(ls, cell, ','))
            if (!cell.empty()) axis.push_back(std::stod(cell));
        axes.push_back(std::move(axis));
    }
    std::vector<double> values;
    while (std::getline(in, line))
        if (!line.empty()) values.push_back(std::stod(line));
    return SurrogateGrid(std::move(axes), std::move(values), n);
}

bool HestonDomain::contains(std::span<const double> point) {
    if (point.size() != lower.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(point[i] >= lower[i] && point[i] <= upper[i])) return false;
    return true;
}

HestonPoint heston_point(const ModelSpec& model, const MarketContext& ctx) {
    const auto& p = model.as<HestonParams>();
    return {p.kappa, p.eta, p.theta, p.v0, p.rho, ctx.maturity()};
}

PointEstimator heston_moment_estimator(int n, MomentMethod method, int mc_paths, std::uint64_t seed) {
    require<InvalidArgument>(method == MomentMethod::finite_difference ||
                                 method == MomentMethod::monte_carlo,
                             "heston_moment_estimator: method must be finite_difference or monte_carlo");
    return [=](std::span<const double> x) {
        if (!HestonDomain::contains(x)) throw OutOfDomain("heston estimator: point outside domain");
        const auto model = ModelSpec::heston(x[0], x[1], x[2], x[3], x[4]);
        const MarketContext ctx(100.0, 0.0, x[5]);
        if (method == MomentMethod::monte_carlo)
            return mc_moment(model, ctx, n, mc_paths, 0, seed).value;
        DefaultMomentProvider::Options opts;
        opts.allow_monte_carlo = false;
        return DefaultMomentProvider(opts).central_moment(model, ctx, n).value;
    };
}

MomentEstimate SurrogateMomentProvider::central_moment(const ModelSpec& model,
                                                       const MarketContext& ctx, int n) const {
    if (model.kind() != ModelKind::Heston || n != grid_.order())
        return fallback_.central_moment(model, ctx, n);
    const auto point = heston_point(model, ctx);
    if (!HestonDomain::contains(point))
        throw OutOfDomain("surrogate: Heston point outside the feasible domain");
    return {surrogate_eval(grid_, point), MomentMethod::surrogate, 0.0};
}

}  // namespace cospricer
