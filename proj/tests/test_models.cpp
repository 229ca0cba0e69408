#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cospricer/errors.hpp"
#include "cospricer/models.hpp"
#include "cospricer/moments.hpp"
#include "quadrature_oracles.hpp"

using namespace cospricer;

namespace {

const MarketContext kAtm(100.0, 0.0, 1.0);

struct Case {
    const char* name;
    ModelSpec model;
    MarketContext ctx;
};

std::vector<Case> all_models() {
    return {
        {"bs", ModelSpec::black_scholes(0.2), MarketContext(100, 0.03, 1.0)},
        {"laplace", ModelSpec::laplace(0.2), MarketContext(100, 0.03, 1.0)},
        {"heston_m4", ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75), MarketContext(100, 0.0, 0.5)},
        {"heston_t10", ModelSpec::heston(1.5768, 0.0398, 0.5751, 0.0175, -0.5711), MarketContext(100, 0.0, 10.0)},
        {"vg", ModelSpec::variance_gamma(0.12, -0.14, 0.2), MarketContext(100, 0.1, 1.0)},
        {"cgmy_m3", ModelSpec::cgmy(0.005, 1.5, 1.5, 1.5), MarketContext(100, 0.0, 0.1)},
        {"cgmy_y198", ModelSpec::cgmy(1.0, 5.0, 5.0, 1.98), MarketContext(100, 0.1, 1.0)},
        {"mjd_m1", ModelSpec::merton(0.1, 0.001, -0.5, 0.2), MarketContext(100, 0.0, 0.1)},
        {"mjd_m2", ModelSpec::merton(0.1, 1e-5, std::expm1(-6.98), 0.2), MarketContext(100, 0.0, 0.01)},
    };
}

}  // namespace

TEST(CharFn, IsExactlyOneAtZero) {
    for (const auto& c : all_models()) {
        EXPECT_EQ(char_fn(c.model, c.ctx, 0.0), Complex(1.0, 0.0)) << c.name;
        EXPECT_EQ(centered_char_fn(c.model, c.ctx, 0.0), Complex(1.0, 0.0)) << c.name;
    }
}

TEST(CharFn, BlackScholesMatchesTextbookExponent) {
    const auto model = ModelSpec::black_scholes(0.2);
    const Complex expected = std::exp(Complex(-0.02, std::log(100.0) - 0.02));
    const Complex got = char_fn(model, kAtm, 1.0);
    EXPECT_NEAR(got.real(), expected.real(), 1e-14);
    EXPECT_NEAR(got.imag(), expected.imag(), 1e-14);
}

TEST(CharFn, LaplaceMatchesFourierTransformOfDensity) {
    // Frozen: 1 / (1 + sigma^2 / 2) at sigma = 0.2.
    constexpr double kFrozen = 0.980392156862745098;
    const auto q = oracle::fourier([](double x) { return oracle::laplace_pdf(x, 0.2); }, 1.0, 12.0);
    EXPECT_NEAR(q.real(), kFrozen, 1e-12);
    EXPECT_NEAR(q.imag(), 0.0, 1e-12);

    const auto model = ModelSpec::laplace(0.2);
    const Complex centered = centered_char_fn(model, kAtm, 1.0);
    EXPECT_NEAR(centered.real(), kFrozen, 1e-15);
    EXPECT_NEAR(centered.imag(), 0.0, 1e-15);
    const double m = mean_log_price(model, kAtm);
    const Complex full = char_fn(model, kAtm, 1.0);
    const Complex expected = std::polar(kFrozen, m);
    EXPECT_NEAR(full.real(), expected.real(), 1e-14);
    EXPECT_NEAR(full.imag(), expected.imag(), 1e-14);
}

TEST(CharFn, ModulusNeverExceedsOne) {
    for (const auto& c : all_models())
        for (double u = -200.0; u <= 200.0; u += 0.25)
            ASSERT_LE(std::abs(char_fn(c.model, c.ctx, u)), 1.0 + 1e-12) << c.name << " u=" << u;
}

TEST(CenteredCf, ConjugateSymmetry) {
    for (const auto& c : all_models()) {
        for (double h : {0.1, 0.5, 1.0, 3.7, 10.0, 25.0, 50.0}) {
            const Complex a = centered_char_fn(c.model, c.ctx, h);
            const Complex b = std::conj(centered_char_fn(c.model, c.ctx, -h));
            EXPECT_LT(std::abs(a - b), 1e-12) << c.name << " h=" << h;
        }
    }
}

TEST(CenteredCf, HasZeroMean) {
    const double h = 1e-4;
    for (const auto& c : all_models()) {
        const Complex d = centered_char_fn(c.model, c.ctx, h) - centered_char_fn(c.model, c.ctx, -h);
        EXPECT_LT(std::abs(d.imag() / (2.0 * h)), 1e-6) << c.name;
    }
}

TEST(CenteredCf, GaussianIsRealAtU2) {
    const Complex v = centered_char_fn(ModelSpec::black_scholes(0.2), kAtm, 2.0);
    EXPECT_NEAR(v.real(), std::exp(-0.08), 1e-15);
    EXPECT_EQ(v.imag(), 0.0);
}

TEST(MeanLogPrice, BlackScholesClosedForm) {
    EXPECT_NEAR(mean_log_price(ModelSpec::black_scholes(0.2), kAtm), std::log(100.0) - 0.02, 1e-15);
}

TEST(MeanLogPrice, MatchesPhaseDerivativeOfCharFn) {
    // Central difference of the phase of phi_{log S_T} at 0.
    for (const auto& c : all_models()) {
        const double h = 1e-5;
        const Complex lp = std::log(char_fn(c.model, c.ctx, h) / char_fn(c.model, c.ctx, -h));
        const double fd = lp.imag() / (2.0 * h);
        EXPECT_NEAR(mean_log_price(c.model, c.ctx), fd, 1e-7) << c.name;
    }
}

TEST(MeanLogPrice, MertonM1IncludesJumpMean) {
    // Frozen from an mpmath evaluation of log S0 + T(-sigma^2/2 - eta kappa + eta mu_J).
    const auto m1 = ModelSpec::merton(0.1, 0.001, -0.5, 0.2);
    EXPECT_NEAR(mean_log_price(m1, MarketContext(100, 0.0, 0.1)), 4.60464887127003537, 1e-14);
}

TEST(MeanLogPrice, DegenerateMaturity) {
    // Laplace is a fixed law of X, not a process in T, so it is excluded.
    for (const auto& c : all_models()) {
        if (c.model.kind() == ModelKind::Laplace) continue;
        const MarketContext tiny(100.0, 0.0, 1e-8);
        EXPECT_NEAR(mean_log_price(c.model, tiny), std::log(100.0), 1e-6) << c.name;
    }
}

TEST(Cumulants, GaussianHigherOrdersVanish) {
    const auto k = cumulants(ModelSpec::black_scholes(0.2), kAtm, 6);
    ASSERT_EQ(k.size(), 6u);
    EXPECT_NEAR(k[1], 0.04, 1e-16);
    EXPECT_EQ(k[3], 0.0);
    EXPECT_EQ(k[5], 0.0);
}

TEST(Cumulants, LaplaceFourth) {
    // kappa_4 = 2 * 3! * b^4 with b^2 = sigma^2 / 2 = 0.02, i.e. 0.0048.
    const auto f = [](double x) { return oracle::laplace_pdf(x, 0.2); };
    const double mu2 = oracle::moment(f, 2, 12.0);
    const double mu4 = oracle::moment(f, 4, 12.0);
    EXPECT_NEAR(mu4 - 3.0 * mu2 * mu2, 0.0048, 1e-13);
    for (double T : {0.1, 1.0, 5.0}) {
        const auto k = cumulants(ModelSpec::laplace(0.2), MarketContext(100, 0.0, T), 4);
        EXPECT_NEAR(k[3], 0.0048, 1e-17);
        EXPECT_NEAR(k[1], 0.04, 1e-17);
    }
}

TEST(Cumulants, MertonSecondMatchesClosedForm) {
    const auto k = cumulants(ModelSpec::merton(0.1, 0.001, -0.5, 0.2), MarketContext(100, 0.0, 0.1), 2);
    EXPECT_NEAR(k[1], 0.00105485789011405992, 1e-18);
}

TEST(Cumulants, MertonSecondMatchesMonteCarloVariance) {
    // Simulated log-returns: normal diffusion plus a Poisson number of
    // normal log-jumps.
    const double sigma = 0.1, eta = 0.001, kappa = -0.5, delta = 0.2, T = 0.1;
    const double muJ = std::log1p(kappa) - 0.5 * delta * delta;
    std::mt19937_64 gen(12345);
    std::normal_distribution<double> z;
    std::poisson_distribution<int> jumps(eta * T);
    const int paths = 10'000'000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < paths; ++i) {
        const int n = jumps(gen);
        double x = sigma * std::sqrt(T) * z(gen);
        if (n > 0) x += n * muJ + std::sqrt(static_cast<double>(n)) * delta * z(gen);
        s += x;
        s2 += x * x;
    }
    const double mean = s / paths;
    const double var = s2 / paths - mean * mean;
    // Variance of the sample variance ~ (mu4 - mu2^2) / n.
    const auto k = cumulants(ModelSpec::merton(sigma, eta, kappa, delta), MarketContext(100, 0.0, T), 4);
    const double mu4 = k[3] + 3.0 * k[1] * k[1];
    const double se = std::sqrt((mu4 - k[1] * k[1]) / paths);
    EXPECT_NEAR(var, k[1], 3.0 * se);
}

TEST(Cumulants, AnalyticAgreesWithNumericDifferentiation) {
    const std::vector<Case> cases = {
        {"bs", ModelSpec::black_scholes(0.2), kAtm},
        {"laplace", ModelSpec::laplace(0.2), kAtm},
        {"vg", ModelSpec::variance_gamma(0.12, -0.14, 0.2), MarketContext(100, 0.1, 1.0)},
        {"mjd_m1", ModelSpec::merton(0.1, 0.001, -0.5, 0.2), MarketContext(100, 0.0, 0.1)},
        {"cgmy", ModelSpec::cgmy(1.0, 5.0, 5.0, 0.5), MarketContext(100, 0.1, 1.0)},
    };
    for (const auto& c : cases) {
        const auto exact = cumulants(c.model, c.ctx, 6);
        const auto numeric = numeric_cumulants(c.model, c.ctx, 6);
        for (int n = 2; n <= 6; ++n) {
            // Scale-aware tolerance so vanishing cumulants (Gaussian) are judged absolutely.
            const double scale = std::max(std::abs(exact[n - 1]), 1e-3 * std::pow(exact[1], 0.5 * n));
            EXPECT_NEAR(numeric[n - 1], exact[n - 1], 1e-4 * scale) << c.name << " n=" << n;
        }
    }
}

TEST(Cumulants, HestonVarianceClosedForm) {
    // Frozen from mpmath differentiation of the Heston log-characteristic function.
    const auto m4 = ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75);
    const MarketContext ctx(100, 0.0, 0.5);
    EXPECT_NEAR(cumulants(m4, ctx, 2)[1], 0.0122712692184, 1e-12);
    const double fd =
        DefaultMomentProvider().numeric_moment(CenteredCf(m4, ctx), 2);
    EXPECT_NEAR(fd, 0.0122712692184, 1e-10);
}

TEST(Cumulants, HestonHigherOrdersNeedFallback) {
    const auto m4 = ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75);
    const MarketContext ctx(100, 0.0, 0.5);
    EXPECT_THROW(cumulants(m4, ctx, 4), NumericFallbackRequired);
    const auto k = cumulants(m4, ctx, 4, numeric_cumulants);
    ASSERT_EQ(k.size(), 4u);
    EXPECT_NEAR(k[1], 0.0122712692184, 1e-10);
    // mu_4 = kappa_4 + 3 kappa_2^2 (frozen mpmath value).
    EXPECT_NEAR(k[3] + 3.0 * k[1] * k[1], 0.0227424971205, 1e-9);
}

TEST(Cumulants, RejectsUnsupportedOrder) {
    EXPECT_THROW(cumulants(ModelSpec::black_scholes(0.2), kAtm, 3), InvalidArgument);
    EXPECT_THROW(cumulants(ModelSpec::black_scholes(0.2), kAtm, 10), InvalidArgument);
}

TEST(ModelSpec, ValidatesParameters) {
    EXPECT_THROW(ModelSpec::black_scholes(0.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::laplace(-0.1), InvalidArgument);
    EXPECT_THROW(ModelSpec::laplace(1.5), InvalidArgument);
    EXPECT_THROW(ModelSpec::heston(0.0, 0.05, 2.0, 0.01, -0.75), InvalidArgument);
    EXPECT_THROW(ModelSpec::heston(1.0, 0.05, 2.0, 0.01, 1.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::heston(1.0, 0.05, 2.0, -0.01, 0.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::variance_gamma(0.12, -0.14, 0.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::cgmy(1.0, 5.0, 5.0, 1.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::cgmy(1.0, 5.0, 5.0, 0.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::cgmy(1.0, 5.0, 5.0, 2.0), InvalidArgument);
    EXPECT_THROW(ModelSpec::cgmy(-1.0, 5.0, 5.0, 0.5), InvalidArgument);
    EXPECT_THROW(ModelSpec::merton(0.1, -1.0, -0.5, 0.2), InvalidArgument);
    EXPECT_THROW(ModelSpec::merton(0.1, 0.1, -1.0, 0.2), InvalidArgument);
    EXPECT_THROW(ModelSpec::merton(0.1, 0.1, -0.5, 0.0), InvalidArgument);
    EXPECT_NO_THROW(ModelSpec::merton(0.1, 0.0, -0.5, 0.2));
    EXPECT_THROW(MarketContext(0.0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(MarketContext(100.0, 0.0, 0.0), InvalidArgument);
}

TEST(ModelSpec, KindNamesRoundTrip) {
    for (auto k : {ModelKind::BS, ModelKind::Laplace, ModelKind::Heston, ModelKind::VG, ModelKind::CGMY,
                   ModelKind::MJD})
        EXPECT_EQ(model_kind_from_string(to_string(k)), k);
    EXPECT_THROW(model_kind_from_string("Bachelier"), InvalidArgument);
}
