#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cospricer/cos_engine.hpp"
#include "cospricer/errors.hpp"
#include "cospricer/oracles.hpp"
#include "cospricer/truncation.hpp"
#include "quadrature_oracles.hpp"

using namespace cospricer;

namespace {

const ModelSpec kBS = ModelSpec::black_scholes(0.2);
const MarketContext kAtm(100.0, 0.0, 1.0);

constexpr double kBsAtmCall = 7.96556745540579629;  // frozen, mpmath closed form
constexpr double kGaussianPeak = 1.99471140200716339;

const ModelSpec kM1 = ModelSpec::merton(0.1, 0.001, -0.5, 0.2);
const MarketContext kM1Ctx(100.0, 0.0, 0.1);

TruncationRange markov(const ModelSpec& m, const MarketContext& ctx, double eps, double K, int n = 8) {
    return markov_range(m, ctx, ToleranceSpec(eps, K), n);
}

}  // namespace

TEST(CosCoefficients, FirstIsOneOverL) {
    for (const auto& [model, ctx] : std::vector<std::pair<ModelSpec, MarketContext>>{
             {kBS, kAtm},
             {ModelSpec::laplace(0.2), kAtm},
             {ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75), MarketContext(100, 0, 0.5)},
             {ModelSpec::cgmy(1, 5, 5, 1.5), MarketContext(100, 0.1, 1)},
             {kM1, kM1Ctx}}) {
        for (double L : {0.5, 2.0, 9.0}) {
            const auto e = cos_coefficients(CenteredCf(model, ctx), L, 300);
            ASSERT_EQ(e.c.size(), 301u);
            EXPECT_NEAR(e.c[0], 1.0 / L, 1e-12);
            for (double c : e.c) EXPECT_LE(std::abs(c), 1.0 / L + 1e-15);
        }
    }
}

TEST(CosCoefficients, GaussianAgainstQuadrature) {
    const double L = 2.0;
    const auto e = cos_coefficients(CenteredCf(kBS, kAtm), L, 8);
    EXPECT_NEAR(e.c[1], 0.0, 1e-17);
    EXPECT_NEAR(e.c[2], -0.5 * std::exp(-0.02 * std::pow(std::numbers::pi / 2.0, 2)), 1e-15);
    for (int k = 0; k <= 8; ++k) {
        const double w = k * std::numbers::pi / (2.0 * L);
        const double q = oracle::integrate_panels(
                             [&](double x) { return oracle::normal_pdf(x, 0.2) * std::cos(w * (x + L)); }, -L, L, 16) /
                         L;
        EXPECT_NEAR(e.c[k], q, 1e-10) << k;
    }
}

TEST(CosCoefficients, RejectsBadInput) {
    EXPECT_THROW(cos_coefficients(CenteredCf(kBS, kAtm), 0.0, 8), InvalidArgument);
    EXPECT_THROW(cos_coefficients(CenteredCf(kBS, kAtm), 1.0, 0), InvalidArgument);
}

TEST(PutCoefficients, ZerothTerm) {
    const double K = 95.0, m = std::log(100.0), M = 1.5, L = 2.0;
    const auto p = put_coefficients(K, m, M, L, 4);
    const double d = std::log(K) - m;
    EXPECT_DOUBLE_EQ(p.d, d);
    EXPECT_NEAR(p.v[0], K * (d + M) - std::exp(m) * (std::exp(d) - std::exp(-M)), 1e-12);
}

TEST(PutCoefficients, DeepOutOfTheMoneyIsZero) {
    const auto p = put_coefficients(10.0, std::log(100.0), 1.0, 2.0, 32);
    for (double v : p.v) EXPECT_EQ(v, 0.0);
}

TEST(PutCoefficients, DeepInTheMoneyClipsAtM) {
    const auto p = put_coefficients(1000.0, std::log(100.0), 1.0, 2.0, 4);
    EXPECT_EQ(p.d, 1.0);
}

TEST(PutCoefficients, FirstCoefficientFrozen) {
    const auto p = put_coefficients(100.0, std::log(100.0), 2.0, 2.0, 1);
    EXPECT_NEAR(p.v[1], 87.1184456403955437, 1e-10);
    EXPECT_NEAR(p.v[1], oracle::put_coefficient(100.0, std::log(100.0), 2.0, 2.0, 1), 1e-10);
}

TEST(PutCoefficients, RandomTuplesAgainstQuadrature) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double K = 50.0 + 100.0 * u(gen);
        const double m = std::log(100.0) + 0.6 * (u(gen) - 0.5);
        const double M = 0.3 + 2.7 * u(gen);
        const double L = M * (1.0 + u(gen));
        const int k = static_cast<int>(200.0 * u(gen));
        const double got = put_coefficients(K, m, M, L, k).v[k];
        const double want = oracle::put_coefficient(K, m, M, L, k);
        EXPECT_NEAR(got, want, 1e-9 * std::max(std::abs(want), 1e-3 * K))
            << "K=" << K << " m=" << m << " M=" << M << " L=" << L << " k=" << k;
    }
}

TEST(Price, BlackScholesAtmCall) {
    const auto r = price(kBS, kAtm, 100.0, OptionKind::call, markov(kBS, kAtm, 1e-8, 100.0), 256);
    EXPECT_NEAR(r.price, kBsAtmCall, 1e-8);
    EXPECT_EQ(r.N_used, 256);
    EXPECT_EQ(r.range.provenance, RangeProvenance::markov);
}

TEST(Price, PutCallParity) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<std::pair<ModelSpec, MarketContext>> models{
        {kBS, MarketContext(100, 0.05, 1.0)},
        {ModelSpec::variance_gamma(0.12, -0.14, 0.2), MarketContext(100, 0.1, 1.0)},
        {ModelSpec::heston(1.5768, 0.0398, 0.5751, 0.0175, -0.5711), MarketContext(100, 0.02, 2.0)},
        {kM1, kM1Ctx}};
    for (const auto& [model, ctx] : models) {
        for (int i = 0; i < 10; ++i) {
            const double K = 60.0 + 80.0 * u(gen);
            const auto range = TruncationRange::manual(0.5 + 3.0 * u(gen), 4.0);
            const int N = 32 + static_cast<int>(500 * u(gen));
            const double put = price(model, ctx, K, OptionKind::put, range, N).price;
            const double call = price(model, ctx, K, OptionKind::call, range, N).price;
            const double fwd = ctx.spot() - K * ctx.discount();
            EXPECT_NEAR(call - put, fwd, 1e-12 * ctx.spot());
        }
    }
}

TEST(Price, NonNegativeWithAdequateRange) {
    for (double K : {60.0, 90.0, 100.0, 110.0, 150.0}) {
        const auto range = markov(kM1, kM1Ctx, 1e-7, K);
        // Only converged expansions are sign-definite; short ones ring.
        for (int N : {1024, 4096, 16384}) {
            EXPECT_GE(price(kM1, kM1Ctx, K, OptionKind::put, range, N).price, -1e-10);
            EXPECT_GE(price(kM1, kM1Ctx, K, OptionKind::call, range, N).price, -1e-10);
        }
    }
}

TEST(Price, MertonM1CumulantRangeIsBiased) {
    // The cumulants range clips the jump mode and converges to a wrong price.
    const auto cum = cumulant_range(kM1, kM1Ctx, 4);
    EXPECT_NEAR(price(kM1, kM1Ctx, 100.0, OptionKind::call, cum, 4096).price, 1.263666, 5e-6);
    const auto mk = markov(kM1, kM1Ctx, 1e-7, 100.0);
    const double ref = merton_price(100.0, 100.0, 0.0, std::get<MertonParams>(kM1.params()), 0.1, OptionKind::call);
    EXPECT_NEAR(price(kM1, kM1Ctx, 100.0, OptionKind::call, mk, 4096).price, ref, 1e-7);
}

TEST(Price, CurveMatchesSinglePrices) {
    const std::vector<int> Ns{16, 100, 101, 640, 2000};
    const auto range = markov(kM1, kM1Ctx, 1e-7, 100.0);
    const auto curve = price_curve(kM1, kM1Ctx, 100.0, OptionKind::call, range, Ns);
    ASSERT_EQ(curve.size(), Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i)
        EXPECT_EQ(curve[i], price(kM1, kM1Ctx, 100.0, OptionKind::call, range, Ns[i]).price) << Ns[i];
}

TEST(Price, RangeScalingLeavesPriceUnchanged) {
    // N proportional to L keeps the resolution per unit length fixed.
    const double base = price(kBS, kAtm, 100.0, OptionKind::put, TruncationRange::manual(2.0), 128).price;
    for (double L : {4.0, 8.0, 16.0}) {
        const int N = static_cast<int>(64.0 * L);
        EXPECT_NEAR(price(kBS, kAtm, 100.0, OptionKind::put, TruncationRange::manual(L), N).price, base, 1e-8)
            << "L=" << L;
    }
}

TEST(Density, GaussianPeak) {
    EXPECT_NEAR(density(CenteredCf(kBS, kAtm), 2.0, 512, 0.0), kGaussianPeak, 1e-6);
}

TEST(Density, IntegratesToOneOnMarkovRange) {
    for (const auto& [model, ctx] : std::vector<std::pair<ModelSpec, MarketContext>>{
             {kBS, kAtm}, {ModelSpec::laplace(0.2), kAtm}, {kM1, kM1Ctx}}) {
        for (double eps : {1e-6, 1e-8}) {
            const auto r = markov(model, ctx, eps, 100.0);
            const auto e = cos_coefficients(CenteredCf(model, ctx), r.L, 512);
            const double mass = oracle::gauss_panels([&](double x) { return density(e, x); }, -r.L, r.L, 1024);
            EXPECT_NEAR(mass, 1.0, 1e-6);
        }
    }
}

TEST(Density, OutsideWindowThrows) {
    const auto e = cos_coefficients(CenteredCf(kBS, kAtm), 2.0, 16);
    EXPECT_THROW(density(e, 2.0001), OutOfRange);
    EXPECT_THROW(density(e, -3.0), OutOfRange);
    EXPECT_NO_THROW(density(e, -2.0));
}

TEST(Density, JumpModeOnlyOnMarkovRange) {
    // The Markov window shows the jump as a local maximum near -0.71. The
    // cumulants window ends at -0.85, so the reflected series just keeps
    // rising towards its edge and no mode appears.
    const CenteredCf phi(kM1, kM1Ctx);
    const auto cum = cumulant_range(kM1, kM1Ctx, 4);
    const auto mk = markov(kM1, kM1Ctx, 1e-7, 100.0);
    EXPECT_NEAR(cum.L, 0.85, 0.005);
    EXPECT_NEAR(mk.L, 4.0, 0.05);
    const double peak = density(phi, mk.L, 4096, -0.71);
    EXPECT_GT(peak, density(phi, mk.L, 4096, -0.85));
    EXPECT_GT(peak, density(phi, mk.L, 4096, -0.60));
    double prev = density(phi, cum.L, 4096, -0.3);
    for (double x = -0.35; x >= -cum.L; x -= 0.05) {
        const double v = density(phi, cum.L, 4096, x);
        EXPECT_GT(v, prev) << "x=" << x;
        prev = v;
    }
    const double x_edge = -cum.L;
    EXPECT_GT(density(phi, cum.L, 4096, x_edge), 1.5 * density(phi, mk.L, 4096, x_edge));
}

TEST(AdaptiveN, BlackScholesConvergesQuickly) {
    const auto r = adaptive_N(kBS, kAtm, 100.0, OptionKind::call, markov(kBS, kAtm, 1e-4, 100.0), 1e-4);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.N_used, 512);
    EXPECT_NEAR(r.price, kBsAtmCall, 1e-4);
}

TEST(AdaptiveN, ResultEqualsPriceAtReturnedN) {
    const auto range = markov(kM1, kM1Ctx, 1e-7, 100.0);
    const auto r = adaptive_N(kM1, kM1Ctx, 100.0, OptionKind::call, range, 1e-7);
    EXPECT_EQ(r.price, price(kM1, kM1Ctx, 100.0, OptionKind::call, range, r.N_used).price);
}

TEST(AdaptiveN, SelfConvergesToWrongValueOnBadRange) {
    const auto m3 = ModelSpec::cgmy(0.005, 1.5, 1.5, 1.5);
    const MarketContext ctx(100.0, 0.0, 0.1);
    const auto r = adaptive_N(m3, ctx, 100.0, OptionKind::call, cumulant_range(m3, ctx, 4), 1e-7);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::abs(r.price - 1.02168477497), 1.07e-4, 0.05 * 1.07e-4);
}

TEST(AdaptiveN, ReportsNoConvergence) {
    // Slowly decaying characteristic function: the cap is reached first.
    const auto vg = ModelSpec::variance_gamma(0.12, -0.14, 0.2);
    const MarketContext ctx(100.0, 0.1, 0.1);
    EXPECT_THROW(adaptive_N(vg, ctx, 90.0, OptionKind::call, TruncationRange::manual(30.0), 1e-13), NoConvergence);
}

TEST(OptionKind, NamesRoundTrip) {
    EXPECT_EQ(option_kind_from_string("put"), OptionKind::put);
    EXPECT_EQ(option_kind_from_string(to_string(OptionKind::call)), OptionKind::call);
    EXPECT_THROW(option_kind_from_string("straddle"), InvalidArgument);
}
