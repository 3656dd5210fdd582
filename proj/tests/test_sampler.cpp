#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace phmeas;
using namespace phmeas::testing;

namespace {

struct Pipeline {
    PHObservable observable;
    PHSpectrum spectrum;
    DilatedMeasurement dilation;
};

Pipeline pipeline(const Fixture& f)
{
    auto obs = load(f);
    auto s = decompose(obs);
    auto d = build_dilation(s);
    return {std::move(obs), std::move(s), std::move(d)};
}

EventRecord synthetic(std::vector<std::uint64_t> counts, std::vector<double> e, std::vector<int> s,
                      std::uint64_t trials)
{
    return {std::move(counts), trials, 0, std::move(e), std::move(s)};
}

}  // namespace

TEST(Simulate, HermitianEigenmodeOnlyHitsItsOwnSubspace)
{
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h << 1.0, 0.5, 0.0, 0.5, 2.0, 0.1, 0.0, 0.1, 3.0;
    const auto obs = check_pseudo_hermitian(h, make_metric(ComplexMatrix::Identity(3, 3)));
    const auto s = decompose(obs);
    const auto d = build_dilation(s);
    const auto rec = simulate_events(d, s, state_from_pure(s.vector(1), s.metric), 100000, 3);
    EXPECT_EQ(rec.counts[0], 0u);
    EXPECT_EQ(rec.counts[2], 0u);
    EXPECT_GT(rec.counts[1], 0u);
    const auto est = estimate(rec);
    EXPECT_NEAR(est.expectation_hat, s.eigenvalues(1), 1e-12);
    EXPECT_NEAR(est.variance_hat, 0.0, 1e-12);
    EXPECT_NEAR(est.std_error, 0.0, 1e-12);
}

TEST(Simulate, SingleTrial)
{
    const auto p = pipeline(all_fixtures()[0]);
    const auto state = state_from_pure(theta_state(0.0, 0.5), p.spectrum.metric);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto rec = simulate_events(p.dilation, p.spectrum, state, 1, seed);
        EXPECT_LE(rec.detected(), 1u);
        EXPECT_EQ(rec.trials, 1u);
    }
}

TEST(Simulate, CountsFollowRoutingTimesDetection)
{
    // P(click in k) = |<E_k|eta|psi>|^2 / sum_l ||eta E_l||^2 for unit psi
    const auto f = all_fixtures()[0];
    const auto p = pipeline(f);
    const ComplexVector psi = theta_state(0.0, std::numbers::pi / 4);
    const std::uint64_t trials = 1000000;
    const auto rec = simulate_events(p.dilation, p.spectrum, state_from_pure(psi, p.spectrum.metric), trials, 42);
    double total_w = 0.0;
    for (Eigen::Index l = 0; l < 3; ++l)
        total_w += (f.eta * p.spectrum.vector(l)).squaredNorm();
    for (Eigen::Index k = 0; k < 3; ++k) {
        const double q = std::norm(p.spectrum.vector(k).dot(f.eta * psi)) / total_w;
        const double mean = double(trials) * q;
        const double sd = std::sqrt(double(trials) * q * (1.0 - q));
        EXPECT_NEAR(double(rec.counts[std::size_t(k)]), mean, 5.0 * std::max(sd, 1.0)) << "k=" << k;
    }
}

TEST(Simulate, DeterministicAndWorkerIndependent)
{
    const auto p = pipeline(all_fixtures()[2]);
    const auto state = state_from_pure(theta_state(0.3, 1.2), p.spectrum.metric);
    const auto a = simulate_events(p.dilation, p.spectrum, state, 300000, 42, 1);
    const auto b = simulate_events(p.dilation, p.spectrum, state, 300000, 42, 1);
    const auto c = simulate_events(p.dilation, p.spectrum, state, 300000, 42, 3);
    const auto d = simulate_events(p.dilation, p.spectrum, state, 300000, 43, 1);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_NE(a.counts, d.counts);
}

TEST(Simulate, RejectsBadInput)
{
    const auto p = pipeline(all_fixtures()[0]);
    const auto state = state_from_pure(theta_state(0.0, 0.5), p.spectrum.metric);
    EXPECT_THROW(simulate_events(p.dilation, p.spectrum, state, 0, 1), Error);
    const auto m2 = make_metric(ComplexMatrix::Identity(2, 2));
    const auto small = make_state(ComplexMatrix::Identity(2, 2), m2, Normalization::Dirac);
    EXPECT_THROW(simulate_events(p.dilation, p.spectrum, small, 10, 1), Error);
}

TEST(Estimate, SyntheticSignedCounts)
{
    const double r3 = std::sqrt(3.0);
    // W = 100 + 100 - 50 = 150, mean = 0, var = (300 + 300) / 150
    const auto est = estimate(synthetic({100, 100, 50}, {-r3, r3, 0.0}, {1, 1, -1}, 1000));
    EXPECT_NEAR(est.expectation_hat, 0.0, 1e-12);
    EXPECT_NEAR(est.variance_hat, 4.0, 1e-12);
    EXPECT_GT(est.std_error, 0.0);
    EXPECT_NEAR(est.covariance(0, 1), est.covariance(1, 0), 1e-15);
}

TEST(Estimate, DeltaMethodMatchesFiniteDifferenceOracle)
{
    // propagate the multinomial covariance through numerically differentiated estimators
    const auto rec = synthetic({300, 120, 80}, {-1.5, 0.0, 1.5}, {1, -1, 1}, 2000);
    auto mean_of = [&](const std::vector<double>& n) {
        double w = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            w += rec.signs[k] * n[k];
            s1 += rec.signs[k] * n[k] * rec.eigenvalues[k];
        }
        return s1 / w;
    };
    std::vector<double> n0(rec.counts.begin(), rec.counts.end());
    std::array<double, 3> g{};
    for (std::size_t k = 0; k < 3; ++k) {
        auto up = n0, down = n0;
        up[k] += 1e-4;
        down[k] -= 1e-4;
        g[k] = (mean_of(up) - mean_of(down)) / 2e-4;
    }
    const double t = double(rec.trials);
    double var = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
            const double qk = n0[k] / t, ql = n0[l] / t;
            var += g[k] * g[l] * t * ((k == l ? qk : 0.0) - qk * ql);
        }
    EXPECT_NEAR(estimate(rec).std_error, std::sqrt(var), 1e-6);
}

TEST(Estimate, DegenerateStatistics)
{
    try {
        estimate(synthetic({50, 50, 0}, {-1.0, 0.0, 1.0}, {1, -1, 1}, 500));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateStatistics);
    }
    EXPECT_THROW(estimate(synthetic({0, 0, 0}, {-1.0, 0.0, 1.0}, {1, 1, 1}, 500)), Error);
    EXPECT_THROW(estimate(synthetic({1, 2}, {-1.0, 0.0, 1.0}, {1, 1, 1}, 500)), Error);
}

TEST(Estimate, StandardErrorScalesAsInverseRootT)
{
    const auto p = pipeline(all_fixtures()[0]);
    const auto state = state_from_pure(theta_state(0.0, std::numbers::pi / 4), p.spectrum.metric);
    const double se4 = estimate(simulate_events(p.dilation, p.spectrum, state, 10000, 42)).std_error;
    const double se5 = estimate(simulate_events(p.dilation, p.spectrum, state, 100000, 42)).std_error;
    const double se6 = estimate(simulate_events(p.dilation, p.spectrum, state, 1000000, 42)).std_error;
    const double r1 = se4 / se5 / std::sqrt(10.0), r2 = se5 / se6 / std::sqrt(10.0);
    EXPECT_GT(r1, 0.5);
    EXPECT_LT(r1, 2.0);
    EXPECT_GT(r2, 0.5);
    EXPECT_LT(r2, 2.0);
}

TEST(Estimate, UnbiasedAcrossSeeds)
{
    for (const auto& f : {all_fixtures()[1], all_fixtures()[3]}) {
        const auto p = pipeline(f);
        const auto state = state_from_pure(theta_state(0.2, 1.0), p.spectrum.metric);
        const auto truth = moments(p.observable, state);
        double sum_mean = 0.0, sum_var = 0.0, se_mean = 0.0, se_var = 0.0;
        const int runs = 50;
        for (int s = 0; s < runs; ++s) {
            const auto est = estimate(simulate_events(p.dilation, p.spectrum, state, 100000, 1000 + s));
            sum_mean += est.expectation_hat;
            sum_var += est.variance_hat;
            se_mean += est.std_error;
            se_var += est.variance_std_error;
        }
        const double scale = std::sqrt(double(runs));
        EXPECT_NEAR(sum_mean / runs, truth.expectation, 5.0 * se_mean / runs / scale) << f.name;
        EXPECT_NEAR(sum_var / runs, truth.variance, 5.0 * se_var / runs / scale) << f.name;
    }
}

TEST(Estimate, BootstrapAgreesWithDeltaMethod)
{
    const auto p = pipeline(all_fixtures()[2]);
    const auto state = state_from_pure(theta_state(0.0, 1.0), p.spectrum.metric);
    const auto rec = simulate_events(p.dilation, p.spectrum, state, 100000, 7);
    const auto est = estimate(rec);
    const auto boot = bootstrap_std_error(rec, 1000, 1);
    EXPECT_EQ(boot.used, 1000u);
    EXPECT_NEAR(boot.expectation / est.std_error, 1.0, 0.15);
    EXPECT_NEAR(boot.variance / est.variance_std_error, 1.0, 0.15);
}

TEST(Experiment, SampledMatchesAnalytic)
{
    for (const auto& f : all_fixtures()) {
        for (double t1 : {0.0, std::numbers::pi / 2.5}) {
            const auto obs = load(f);
            const auto state = state_from_pure(theta_state(t1, std::numbers::pi / 4), obs.metric());
            const auto r = run_experiment(obs, state, 1000000, 42);
            EXPECT_NEAR(r.sampled.expectation_hat, r.analytic.expectation, 5.0 * r.sampled.std_error)
                << f.name << " t1=" << t1;
            EXPECT_NEAR(r.sampled.variance_hat, r.analytic.variance, 5.0 * r.sampled.variance_std_error)
                << f.name << " t1=" << t1;
        }
    }
}

TEST(Experiment, DiracAndEtaNormalizedInputsAgree)
{
    const auto obs = load(all_fixtures()[0]);
    const ComplexVector psi = theta_state(0.4, 0.9);
    const auto a = run_experiment(obs, state_from_pure(psi, obs.metric(), Normalization::Dirac), 50000, 9);
    const auto b = run_experiment(obs, state_from_pure(psi, obs.metric(), Normalization::EtaNormalized), 50000, 9);
    EXPECT_EQ(a.sampled.counts_used, b.sampled.counts_used);
}

TEST(Seeds, DerivedStreamsDiffer)
{
    EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
    EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
    EXPECT_EQ(derive_seed(42, 5), derive_seed(42, 5));
}
