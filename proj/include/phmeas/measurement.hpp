#pragma once

// Analytic statistics of PH observables: expectation and variance in both
// trace form and spectral-sum form, decomposition coefficients, and effect
// operators.

#include <vector>

#include "spectral.hpp"

namespace phmeas {

struct Moments {
    double expectation = 0.0;
    double variance = 0.0;
    /// Tr[rho_dirac eta] used for the on-demand normalization.
    double eta_norm = 0.0;
    /// |Im Tr[rho eta H]| before it was discarded.
    double imag_residual = 0.0;
    /// True when the state was not already eta-normalized for this metric.
    bool normalized_on_demand = false;
};

namespace detail {

inline ComplexMatrix normalized_rho(const PHMetric& metric, const QuantumState& state,
                                    bool* on_demand = nullptr)
{
    if (state.dim() != metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "measurement",
                    "state and observable dimensions differ");
    if (on_demand)
        *on_demand = !state.is_eta_normalized_for(metric);
    if (state.is_eta_normalized_for(metric))
        return state.rho();
    return state.eta_normalized(metric);
}

// Tr[rho eta X], complex
inline complex eta_trace(const ComplexMatrix& rho, const PHMetric& metric, const ComplexMatrix& x)
{
    return (rho * metric.eta() * x).trace();
}

}  // namespace detail

inline Moments moments(const PHObservable& h, const QuantumState& state)
{
    Moments m;
    const ComplexMatrix rho = detail::normalized_rho(h.metric(), state, &m.normalized_on_demand);
    m.eta_norm = state.eta_norm(h.metric());
    const complex ev = detail::eta_trace(rho, h.metric(), h.matrix());
    const double scale = std::max(1.0, (rho * h.metric().eta() * h.matrix()).norm());
    m.imag_residual = std::abs(ev.imag());
    if (m.imag_residual > Tolerances::rel * scale)
        throw Error(ErrorKind::IllConditioned, "measurement",
                    "Tr[rho eta H] has a non-negligible imaginary part", m.imag_residual);
    m.expectation = ev.real();
    const auto n = h.dim();
    const ComplexMatrix shifted = h.matrix() - m.expectation * ComplexMatrix::Identity(n, n);
    m.variance = detail::eta_trace(rho, h.metric(), shifted * shifted).real();
    return m;
}

/// Tr[rho eta H]
inline double expectation(const PHObservable& h, const QuantumState& state)
{
    return moments(h, state).expectation;
}

/// Tr[rho eta (H - <H>)^2]; negative values are possible for indefinite eta.
inline double variance(const PHObservable& h, const QuantumState& state)
{
    return moments(h, state).variance;
}

/// p_kl = <E_k|eta rho eta|E_l> / (<E_k|eta|E_k><E_l|eta|E_l>) for the
/// eta-normalized rho, so that rho = sum_kl p_kl |E_k><E_l|.
struct DecompositionCoefficients {
    ComplexMatrix p;

    double diagonal(Eigen::Index k) const { return p(k, k).real(); }
};

inline DecompositionCoefficients decomposition_coefficients(const PHSpectrum& spectrum,
                                                            const QuantumState& state)
{
    const ComplexMatrix rho = detail::normalized_rho(spectrum.metric, state);
    const ComplexMatrix& eta = spectrum.metric.eta();
    ComplexMatrix p = spectrum.eigenvectors.adjoint() * eta * rho * eta * spectrum.eigenvectors;
    for (Eigen::Index k = 0; k < p.rows(); ++k)
        for (Eigen::Index l = 0; l < p.cols(); ++l)
            p(k, l) /= double(spectrum.signs[k] * spectrum.signs[l]);
    return {std::move(p)};
}

/// sum_kl p_kl |E_k><E_l|
inline ComplexMatrix reconstruct_state(const PHSpectrum& spectrum,
                                       const DecompositionCoefficients& coeffs)
{
    return spectrum.eigenvectors * coeffs.p * spectrum.eigenvectors.adjoint();
}

/// sum_k p_kk s_k e_k
inline double spectral_expectation(const PHSpectrum& spectrum, const DecompositionCoefficients& c)
{
    double acc = 0.0;
    for (Eigen::Index k = 0; k < spectrum.dim(); ++k)
        acc += c.diagonal(k) * spectrum.signs[k] * spectrum.eigenvalues(k);
    return acc;
}

/// sum_k p_kk s_k (e_k - <H>)^2
inline double spectral_variance(const PHSpectrum& spectrum, const DecompositionCoefficients& c)
{
    const double mean = spectral_expectation(spectrum, c);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
        const double d = spectrum.eigenvalues(k) - mean;
        acc += c.diagonal(k) * spectrum.signs[k] * d * d;
    }
    return acc;
}

/// Effect operators M_k = eta|E_k><E_k|eta / <E_k|eta|E_k>; they sum to eta
/// rather than the identity.
struct EffectSet {
    std::vector<ComplexMatrix> effects;

    ComplexMatrix sum() const
    {
        ComplexMatrix acc = ComplexMatrix::Zero(effects.front().rows(), effects.front().cols());
        for (const auto& m : effects)
            acc += m;
        return acc;
    }
};

inline EffectSet effect_set(const PHSpectrum& spectrum)
{
    EffectSet out;
    const ComplexMatrix& eta = spectrum.metric.eta();
    for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
        const ComplexVector w = eta * spectrum.vector(k);
        out.effects.push_back(w * w.adjoint() / double(spectrum.signs[k]));
    }
    return out;
}

}  // namespace phmeas
