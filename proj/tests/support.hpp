#pragma once

// Test-only generators and oracles. Nothing here calls into the code paths it
// is used to check beyond constructing validated inputs.

#include <array>
#include <cmath>
#include <random>

#include "phmeas/phmeas.hpp"

namespace phmeas::testing {

using Rng = std::mt19937_64;

inline ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = complex(g(rng), g(rng));
    return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng)
{
    const ComplexMatrix g = gaussian(n, n, rng);
    return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_non_hermitian(Eigen::Index n, Rng& rng)
{
    return random_hermitian(n, rng) + 0.5 * kI * random_hermitian(n, rng) * random_hermitian(n, rng);
}

/// eta = (S S^dagger)^-1 with S well conditioned.
inline PHMetric random_positive_metric(Eigen::Index n, Rng& rng)
{
    const ComplexMatrix s = ComplexMatrix::Identity(n, n) + 0.35 * gaussian(n, n, rng);
    const ComplexMatrix eta = (s * s.adjoint()).inverse();
    return make_metric(0.5 * (eta + eta.adjoint()));
}

/// eta = S^dagger D S with D a signature holding both signs.
inline PHMetric random_signature_metric(Eigen::Index n, Rng& rng)
{
    const ComplexMatrix s = ComplexMatrix::Identity(n, n) + 0.3 * gaussian(n, n, rng);
    ComplexMatrix d = ComplexMatrix::Identity(n, n);
    d(n - 1, n - 1) = -1.0;
    if (n > 2 && std::bernoulli_distribution(0.5)(rng)) {
        const auto i = std::uniform_int_distribution<Eigen::Index>(1, n - 2)(rng);
        d(i, i) = -1.0;
    }
    const ComplexMatrix eta = s.adjoint() * d * s;
    return make_metric(0.5 * (eta + eta.adjoint()));
}

/// H = eta^-1 h for random Hermitian h; PH by construction. Draws that land
/// outside the supported class (complex or degenerate spectrum, eta-null
/// eigenvectors) are redrawn.
inline PHObservable random_ph(const PHMetric& metric, Rng& rng)
{
    for (;;) {
        const ComplexMatrix h = metric.eta_inverse() * random_hermitian(metric.dim(), rng);
        try {
            auto obs = check_pseudo_hermitian(h, metric);
            (void)decompose(obs);
            return obs;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotPseudoHermitian)
                throw;
        }
    }
}

inline ComplexMatrix random_density(Eigen::Index n, Rng& rng)
{
    std::uniform_int_distribution<Eigen::Index> rank(1, n);
    const ComplexMatrix g = gaussian(n, rank(rng), rng);
    const ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

/// Random state with non-negligible eta-norm, eta-normalized for `metric`.
inline QuantumState random_state(const PHMetric& metric, Rng& rng)
{
    for (;;) {
        const ComplexMatrix rho = random_density(metric.dim(), rng);
        if (std::abs((rho * metric.eta()).trace().real()) > 0.05)
            return make_state(rho, metric, Normalization::EtaNormalized);
    }
}

inline ComplexVector random_unit_vector(Eigen::Index n, Rng& rng)
{
    ComplexVector v = gaussian(n, 1, rng).col(0);
    return v / v.norm();
}

/// Characteristic polynomial lambda^3 - c2 lambda^2 + c1 lambda - c0 of a
/// 3x3 matrix by direct trace and cofactor formulas.
struct CharPoly3 {
    complex c2, c1, c0;

    complex operator()(complex x) const { return x * x * x - c2 * x * x + c1 * x - c0; }
};

inline CharPoly3 char_poly3(const ComplexMatrix& a)
{
    const complex tr = a(0, 0) + a(1, 1) + a(2, 2);
    complex tr2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            tr2 += a(i, j) * a(j, i);
    const complex det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                        a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                        a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    return {tr, 0.5 * (tr * tr - tr2), det};
}

struct Fixture {
    const char* name;
    ComplexMatrix matrix;
    ComplexMatrix eta;
};

inline std::array<Fixture, 4> all_fixtures()
{
    return {Fixture{"eq5.A", fixtures::eq5_a(), fixtures::eta_pos()},
            Fixture{"eq5.B", fixtures::eq5_b(), fixtures::eta_pos()},
            Fixture{"eq6.A", fixtures::eq6_a(), fixtures::eta_indef()},
            Fixture{"eq6.B", fixtures::eq6_b(), fixtures::eta_indef()}};
}

inline PHObservable load(const Fixture& f)
{
    return check_pseudo_hermitian(f.matrix, make_metric(f.eta));
}

}  // namespace phmeas::testing
