#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace phmeas;
using namespace phmeas::testing;

namespace {

ComplexVector vec3(complex a, complex b, complex c)
{
    ComplexVector v(3);
    v << a, b, c;
    return v;
}

ErrorKind kind_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected phmeas::Error";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Metric, Classification)
{
    EXPECT_EQ(make_metric(fixtures::eta_pos()).definiteness(), Definiteness::PositiveDefinite);
    EXPECT_EQ(make_metric(fixtures::eta_indef()).definiteness(), Definiteness::Indefinite);
    const auto id = make_metric(ComplexMatrix::Identity(3, 3));
    EXPECT_EQ(id.definiteness(), Definiteness::PositiveDefinite);
    EXPECT_LE((id.eta_inverse() - ComplexMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Metric, Errors)
{
    ComplexMatrix skew = fixtures::eta_pos();
    skew(0, 1) = 0.5;
    EXPECT_EQ(kind_of([&] { make_metric(skew); }), ErrorKind::NotHermitian);
    ComplexMatrix singular = fixtures::eta_pos();
    singular(2, 2) = 0.0;
    EXPECT_EQ(kind_of([&] { make_metric(singular); }), ErrorKind::Singular);
    singular(2, 2) = 1e-14;
    EXPECT_EQ(kind_of([&] { make_metric(singular); }), ErrorKind::Singular);
    EXPECT_EQ(kind_of([&] { make_metric(ComplexMatrix(2, 3)); }), ErrorKind::DimensionMismatch);
    ComplexMatrix nan = fixtures::eta_pos();
    nan(0, 0) = std::nan("");
    EXPECT_EQ(kind_of([&] { make_metric(nan); }), ErrorKind::InvalidArgument);
}

TEST(Metric, RandomConstructionInvariants)
{
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        for (const auto& m : {random_positive_metric(3, rng), random_signature_metric(4, rng)}) {
            EXPECT_LE((m.eta() - m.eta().adjoint()).norm(), Tolerances::rel * m.eta().norm());
            const auto n = m.dim();
            EXPECT_LE((m.eta() * m.eta_inverse() - ComplexMatrix::Identity(n, n)).norm(), Tolerances::rel);
        }
    }
    EXPECT_EQ(random_signature_metric(3, rng).definiteness(), Definiteness::Indefinite);
}

TEST(PseudoHermitian, FixturesValidUnderTheirMetrics)
{
    for (const auto& f : all_fixtures()) {
        const auto h = load(f);
        EXPECT_LE(h.residual(), 1e-12) << f.name;
    }
}

TEST(PseudoHermitian, PositivePairRejectedUnderIdentity)
{
    const auto id = make_metric(ComplexMatrix::Identity(3, 3));
    // direct residual: A^dagger - A is nonzero for the (1,3)/(3,1) entries 1.2 vs 2
    const ComplexMatrix a = fixtures::eq5_a();
    EXPECT_GT((a.adjoint() - a).norm(), 0.5);
    try {
        check_pseudo_hermitian(a, id);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPseudoHermitian);
        ASSERT_TRUE(e.value());
        EXPECT_NEAR(*e.value(), (a.adjoint() - a).norm() / a.norm(), 1e-12);
    }
    EXPECT_EQ(kind_of([&] { check_pseudo_hermitian(fixtures::eq5_b(), id); }),
              ErrorKind::NotPseudoHermitian);
}

TEST(PseudoHermitian, IdentityMetricAcceptsExactlyHermitian)
{
    Rng rng(11);
    for (Eigen::Index n : {2, 3, 5}) {
        const auto id = make_metric(ComplexMatrix::Identity(n, n));
        for (int i = 0; i < 100; ++i) {
            EXPECT_NO_THROW(check_pseudo_hermitian(random_hermitian(n, rng), id));
            EXPECT_EQ(kind_of([&] { check_pseudo_hermitian(random_non_hermitian(n, rng), id); }),
                      ErrorKind::NotPseudoHermitian);
        }
    }
}

TEST(PseudoHermitian, DimensionMismatch)
{
    const auto m = make_metric(fixtures::eta_pos());
    EXPECT_EQ(kind_of([&] { check_pseudo_hermitian(ComplexMatrix::Identity(2, 2), m); }),
              ErrorKind::DimensionMismatch);
}

TEST(State, BasisStateEtaNormalized)
{
    const auto m = make_metric(fixtures::eta_pos());
    const auto s = state_from_pure(vec3(0, 1, 0), m, Normalization::EtaNormalized);
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    expected(1, 1) = 1.0;
    EXPECT_LE((s.rho() - expected).norm(), 1e-15);
}

TEST(State, ThetaStateHasUnitEtaTrace)
{
    const auto m = make_metric(fixtures::eta_pos());
    for (double t1 : {0.0, std::numbers::pi / 2.5})
        for (double t2 : {0.0, std::numbers::pi / 4, 2.0}) {
            const auto s = state_from_pure(theta_state(t1, t2), m);
            EXPECT_NEAR((s.rho() * m.eta()).trace().real(), 1.0, 1e-12);
            EXPECT_NEAR(s.dirac().trace().real(), 1.0, 1e-12);
        }
}

TEST(State, NegativeEtaNormKeepsPsdCore)
{
    const auto m = make_metric(fixtures::eta_indef());
    const auto psi = vec3(0, 0, 1);
    EXPECT_DOUBLE_EQ(eta_inner(psi, psi, m).real(), -1.0);
    const auto s = state_from_pure(psi, m, Normalization::EtaNormalized);
    ComplexMatrix proj = ComplexMatrix::Zero(3, 3);
    proj(2, 2) = 1.0;
    EXPECT_LE((s.dirac() - proj).norm(), 1e-15);
    EXPECT_DOUBLE_EQ(s.scale(), -1.0);
    EXPECT_LE((s.rho() + proj).norm(), 1e-15);
    EXPECT_NEAR((s.rho() * m.eta()).trace().real(), 1.0, 1e-15);
}

TEST(State, Errors)
{
    const auto m = make_metric(fixtures::eta_indef());
    EXPECT_EQ(kind_of([&] { state_from_pure(vec3(0, 0, 0), m); }), ErrorKind::ZeroVector);
    // (1, 0, 1): <psi|eta|psi> = 1 - 1 = 0
    EXPECT_EQ(kind_of([&] { state_from_pure(vec3(1, 0, 1), m); }), ErrorKind::VanishingEtaNorm);
    EXPECT_NO_THROW(state_from_pure(vec3(1, 0, 1), m, Normalization::Dirac));
    ComplexMatrix not_psd = ComplexMatrix::Identity(3, 3);
    not_psd(0, 0) = -0.5;
    EXPECT_EQ(kind_of([&] { make_state(not_psd, m, Normalization::Dirac); }),
              ErrorKind::NotPositiveSemidefinite);
    EXPECT_EQ(kind_of([&] { state_from_pure(ComplexVector::Ones(2), m); }), ErrorKind::DimensionMismatch);
}

TEST(State, MixedStatesAccepted)
{
    Rng rng(3);
    const auto m = make_metric(fixtures::eta_pos());
    for (int i = 0; i < 20; ++i) {
        const auto s = make_state(random_density(3, rng), m, Normalization::EtaNormalized);
        EXPECT_NEAR((s.rho() * m.eta()).trace().real(), 1.0, 1e-12);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s.dirac());
        EXPECT_GE(es.eigenvalues().minCoeff(), -Tolerances::abs);
    }
}

TEST(EtaInner, DiagonalReadOff)
{
    const auto pos = make_metric(fixtures::eta_pos());
    const auto ind = make_metric(fixtures::eta_indef());
    const auto e2 = vec3(0, 0, 1);
    EXPECT_DOUBLE_EQ(eta_inner(e2, e2, pos).real(), 0.6);
    EXPECT_DOUBLE_EQ(eta_inner(e2, e2, ind).real(), -1.0);
    EXPECT_EQ(eta_inner(vec3(1, 0, 0), vec3(0, 1, 0), pos), complex(0.0));
    EXPECT_EQ(eta_inner(vec3(1, 0, 0), vec3(0, 1, 0), ind), complex(0.0));
    EXPECT_EQ(kind_of([&] { eta_inner(ComplexVector::Ones(2), e2, pos); }), ErrorKind::DimensionMismatch);
}

TEST(EtaInner, Sesquilinear)
{
    Rng rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        const auto m = i % 2 ? random_positive_metric(3, rng) : random_signature_metric(3, rng);
        const ComplexVector a = gaussian(3, 1, rng), b = gaussian(3, 1, rng), c = gaussian(3, 1, rng);
        const complex x(g(rng), g(rng)), y(g(rng), g(rng));
        EXPECT_LE(std::abs(eta_inner(a, b, m) - std::conj(eta_inner(b, a, m))), 1e-12);
        EXPECT_LE(std::abs(eta_inner(a, x * b + y * c, m) - (x * eta_inner(a, b, m) + y * eta_inner(a, c, m))),
                  1e-11);
        EXPECT_LE(std::abs(eta_inner(x * a + y * c, b, m) -
                           (std::conj(x) * eta_inner(a, b, m) + std::conj(y) * eta_inner(c, b, m))),
                  1e-11);
    }
}
