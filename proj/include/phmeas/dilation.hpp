#pragma once

// Direct-sum dilated projective measurement.
//
// Each eigenmode k gets its own n-dimensional subspace in which the skewed
// projection onto E_k becomes the orthonormal rank-1 projection onto the dual
// vector v_k (orthogonal to every E_l with l != k). Feeding the subspace a
// share of the state proportional to w_k = 1/|<v_k|E_k>|^2 makes its
// detection probability proportional to p_kk. Nothing here depends on the
// state.

#include <vector>

#include "spectral.hpp"

namespace phmeas {

/// Two-level unitary on the adjacent modes (lower, lower + 1):
///
///     [ e^{-i alpha} cos(theta)    e^{-i beta} sin(theta) ]
///     [ -e^{i beta} sin(theta)     e^{i alpha} cos(theta) ]
///
/// It maps (r cos(theta) e^{i alpha}, r sin(theta) e^{i beta}) to (r, 0).
struct TwoLevelRotation {
    Eigen::Index lower = 0;
    double theta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    Eigen::Matrix2cd block() const
    {
        const double c = std::cos(theta), s = std::sin(theta);
        Eigen::Matrix2cd g;
        g << std::polar(c, -alpha), std::polar(s, -beta), -std::polar(s, beta),
            std::polar(c, alpha);
        return g;
    }

    ComplexMatrix embed(Eigen::Index n) const
    {
        ComplexMatrix u = ComplexMatrix::Identity(n, n);
        u.block(lower, lower, 2, 2) = block();
        return u;
    }
};

struct UnitarySynthesis {
    ComplexMatrix unitary;
    /// In application order: unitary = factors.back() * ... * factors.front().
    std::vector<TwoLevelRotation> factors;
};

inline ComplexMatrix factor_product(const std::vector<TwoLevelRotation>& factors, Eigen::Index n)
{
    ComplexMatrix u = ComplexMatrix::Identity(n, n);
    for (const auto& f : factors)
        u = f.embed(n) * u;
    return u;
}

/// Unitary U with U v = e_0, built as a chain of at most n - 1 adjacent
/// two-level rotations that zero v from the bottom up.
inline UnitarySynthesis synthesize_unitary(const ComplexVector& v)
{
    const auto n = v.size();
    if (n == 0 || std::abs(v.norm() - 1.0) > Tolerances::rel)
        throw Error(ErrorKind::NotUnitVector, "dilation", "vector is not unit norm",
                    n ? v.norm() : 0.0);

    UnitarySynthesis out{ComplexMatrix::Identity(n, n), {}};
    ComplexVector work = v;
    for (Eigen::Index i = n - 1; i >= 1; --i) {
        const complex a = work(i - 1), b = work(i);
        const bool last = i == 1;
        if (std::abs(b) == 0.0 && (!last || (a.imag() == 0.0 && a.real() > 0.0)))
            continue;
        TwoLevelRotation f;
        f.lower = i - 1;
        f.theta = std::atan2(std::abs(b), std::abs(a));
        f.alpha = std::arg(a);
        f.beta = std::arg(b);
        const Eigen::Matrix2cd g = f.block();
        const Eigen::Vector2cd pair = g * Eigen::Vector2cd(a, b);
        work(i - 1) = pair(0);
        work(i) = 0.0;
        out.unitary.middleRows(i - 1, 2) = (g * out.unitary.middleRows(i - 1, 2)).eval();
        out.factors.push_back(f);
    }
    return out;
}

struct DilatedMeasurement {
    std::vector<ComplexVector> duals;
    std::vector<ComplexMatrix> projectors;
    /// w_k = 1 / |<v_k|E_k>|^2
    std::vector<double> weights;
    /// N = sum_k w_k / n
    double normalizer = 0.0;
    std::vector<UnitarySynthesis> unitaries;
    PHMetric metric;

    Eigen::Index dim() const noexcept { return Eigen::Index(duals.size()); }
};

/// v_k = eta E_k / ||eta E_k||, phased like the eigenvectors.
inline std::vector<ComplexVector> dual_vectors(const PHSpectrum& spectrum)
{
    const auto n = spectrum.dim();
    std::vector<ComplexVector> duals;
    duals.reserve(std::size_t(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        ComplexVector v = spectrum.metric.eta() * spectrum.vector(k);
        const double len = v.norm();
        if (len <= Tolerances::abs)
            throw Error(ErrorKind::IllConditioned, "dilation", "eta E_k vanishes", len);
        v /= len;
        v *= detail::canonical_phase(v);
        duals.push_back(std::move(v));
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
            if (k == l)
                continue;
            const ComplexVector e = spectrum.vector(l);
            const double overlap = std::abs(duals[std::size_t(k)].dot(e));
            if (overlap > Tolerances::rel * e.norm())
                throw Error(ErrorKind::IllConditioned, "dilation",
                            "dual vector is not orthogonal to the other eigenvectors", overlap);
        }
    return duals;
}

inline DilatedMeasurement build_dilation(const PHSpectrum& spectrum)
{
    DilatedMeasurement out{dual_vectors(spectrum), {}, {}, 0.0, {}, spectrum.metric};
    const auto n = spectrum.dim();
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexVector& v = out.duals[std::size_t(k)];
        out.projectors.push_back(v * v.adjoint());
        out.weights.push_back(1.0 / std::norm(v.dot(spectrum.vector(k))));
        out.unitaries.push_back(synthesize_unitary(v));
    }
    double total = 0.0;
    for (double w : out.weights)
        total += w;
    out.normalizer = total / double(n);
    return out;
}

/// Tr[P_k rho] w_k for the eta-normalized rho; equals p_kk.
inline double subspace_probability(const DilatedMeasurement& dilation, Eigen::Index k,
                                   const QuantumState& state)
{
    if (k < 0 || k >= dilation.dim())
        throw Error(ErrorKind::IndexOutOfRange, "dilation", "subspace index out of range",
                    double(k));
    if (state.dim() != dilation.metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "dilation", "state and dilation dimensions differ");
    const ComplexMatrix rho = state.is_eta_normalized_for(dilation.metric)
                                  ? state.rho()
                                  : state.eta_normalized(dilation.metric);
    const ComplexVector& v = dilation.duals[std::size_t(k)];
    return v.dot(rho * v).real() * dilation.weights[std::size_t(k)];
}

/// Explicit n^2 x n^2 block-diagonal projector P_1 (+) ... (+) P_n.
inline ComplexMatrix materialize_projector(const DilatedMeasurement& dilation)
{
    const auto n = dilation.dim();
    ComplexMatrix p = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index k = 0; k < n; ++k)
        p.block(k * n, k * n, n, n) = dilation.projectors[std::size_t(k)];
    return p;
}

/// Explicit dilated state (1/N)(w_1 rho (+) ... (+) w_n rho).
inline ComplexMatrix materialize_state(const DilatedMeasurement& dilation, const QuantumState& state)
{
    const auto n = dilation.dim();
    const ComplexMatrix rho = state.eta_normalized(dilation.metric);
    ComplexMatrix sigma = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index k = 0; k < n; ++k)
        sigma.block(k * n, k * n, n, n) = dilation.weights[std::size_t(k)] * rho / dilation.normalizer;
    return sigma;
}

}  // namespace phmeas
