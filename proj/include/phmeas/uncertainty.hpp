#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>

#include "sampler.hpp"

namespace phmeas {

/// AB split into two PH observables with (1+i)C1 + (1-i)C2 = AB:
///   C1 = (AB + BA)/4 + (AB - BA)/(4i)
///   C2 = (AB + BA)/4 - (AB - BA)/(4i)
/// Both are PH under the shared metric because AB + BA and (AB - BA)/i are.
inline std::pair<PHObservable, PHObservable> product_split(const PHObservable& a,
                                                           const PHObservable& b)
{
    if (!a.metric().same_as(b.metric()))
        throw Error(ErrorKind::MetricMismatch, "uncertainty", "observables use different metrics");
    const ComplexMatrix ab = a.matrix() * b.matrix();
    const ComplexMatrix ba = b.matrix() * a.matrix();
    const ComplexMatrix sym = (ab + ba) / 4.0;
    const ComplexMatrix anti = (ab - ba) / (4.0 * kI);
    return {check_pseudo_hermitian(sym + anti, a.metric()),
            check_pseudo_hermitian(sym - anti, a.metric())};
}

/// [[var A, <AB> - <A><B>], [<BA> - <B><A>, var B]]
inline Eigen::Matrix2cd covariance_matrix(const PHObservable& a, const PHObservable& b,
                                          const QuantumState& state)
{
    if (!a.metric().same_as(b.metric()))
        throw Error(ErrorKind::MetricMismatch, "uncertainty", "observables use different metrics");
    const Moments ma = moments(a, state);
    const Moments mb = moments(b, state);
    const ComplexMatrix rho = detail::normalized_rho(a.metric(), state);
    const complex ab = detail::eta_trace(rho, a.metric(), a.matrix() * b.matrix());
    const complex ba = detail::eta_trace(rho, a.metric(), b.matrix() * a.matrix());
    Eigen::Matrix2cd m;
    m << ma.variance, ab - ma.expectation * mb.expectation, ba - mb.expectation * ma.expectation,
        mb.variance;
    return m;
}

/// Smallest eigenvalue of the Hermitian part of M.
inline double min_eigenvalue(const Eigen::Matrix2cd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

struct AnalyticMode {};
struct SampledMode {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
};
using RatioMode = std::variant<AnalyticMode, SampledMode>;

enum class RatioStatus { Defined, CrossTermVanishes };

inline std::string_view to_string(RatioStatus s) noexcept
{
    return s == RatioStatus::Defined ? "ok" : "CrossTermVanishes";
}

struct UncertaintyReport {
    double var_a = 0.0;
    double var_b = 0.0;
    /// <AB> - <A><B>
    complex cross_term;
    Eigen::Matrix2cd m_matrix;
    /// var_a var_b / |cross_term|^2, signed; +inf when the cross term vanishes.
    double ratio_r = 0.0;
    RatioStatus status = RatioStatus::Defined;
    Definiteness metric_definiteness = Definiteness::PositiveDefinite;
    bool sampled = false;
    /// Delta-method standard error of ratio_r (sampled mode only).
    double std_error_r = 0.0;
    /// Sampled estimates for A, B, C1, C2 (sampled mode only).
    std::optional<std::array<MeasurementEstimate, 4>> estimates;
};

namespace detail {

inline void finish_ratio(UncertaintyReport& r)
{
    const double d = std::norm(r.cross_term);
    if (d <= Tolerances::abs * Tolerances::abs) {
        r.status = RatioStatus::CrossTermVanishes;
        r.ratio_r = std::numeric_limits<double>::infinity();
    } else {
        r.status = RatioStatus::Defined;
        r.ratio_r = r.var_a * r.var_b / d;
    }
}

}  // namespace detail

inline UncertaintyReport uncertainty_ratio(const PHObservable& a, const PHObservable& b,
                                           const QuantumState& state,
                                           const RatioMode& mode = AnalyticMode{})
{
    UncertaintyReport r;
    r.metric_definiteness = a.metric().definiteness();

    if (std::holds_alternative<AnalyticMode>(mode)) {
        r.m_matrix = covariance_matrix(a, b, state);
        r.var_a = r.m_matrix(0, 0).real();
        r.var_b = r.m_matrix(1, 1).real();
        r.cross_term = r.m_matrix(0, 1);
        detail::finish_ratio(r);
        return r;
    }

    const auto& cfg = std::get<SampledMode>(mode);
    const auto [c1, c2] = product_split(a, b);
    const std::array<const PHObservable*, 4> obs{&a, &b, &c1, &c2};
    std::array<MeasurementEstimate, 4> est;
    for (std::size_t i = 0; i < 4; ++i)
        est[i] = run_experiment(*obs[i], state, cfg.trials, derive_seed(cfg.seed, i + 1), cfg.workers)
                     .sampled;

    const double mu_a = est[0].expectation_hat, mu_b = est[1].expectation_hat;
    const double c1_hat = est[2].expectation_hat, c2_hat = est[3].expectation_hat;
    r.sampled = true;
    r.var_a = est[0].variance_hat;
    r.var_b = est[1].variance_hat;
    r.cross_term = (1.0 + kI) * c1_hat + (1.0 - kI) * c2_hat - mu_a * mu_b;
    r.m_matrix << r.var_a, r.cross_term, std::conj(r.cross_term), r.var_b;
    detail::finish_ratio(r);

    if (r.status == RatioStatus::Defined) {
        // R = vA vB / D with D = x^2 + y^2, x = c1 + c2 - muA muB, y = c1 - c2
        const double x = r.cross_term.real(), y = r.cross_term.imag();
        const double dd = x * x + y * y;
        const double dr_dd = -r.ratio_r / dd;
        const Eigen::Vector2d g_a(dr_dd * 2.0 * x * -mu_b, r.var_b / dd);
        const Eigen::Vector2d g_b(dr_dd * 2.0 * x * -mu_a, r.var_a / dd);
        const double g_c1 = dr_dd * 2.0 * (x + y);
        const double g_c2 = dr_dd * 2.0 * (x - y);
        const double var = g_a.dot(est[0].covariance * g_a) + g_b.dot(est[1].covariance * g_b) +
                           g_c1 * g_c1 * est[2].covariance(0, 0) +
                           g_c2 * g_c2 * est[3].covariance(0, 0);
        r.std_error_r = std::sqrt(std::max(0.0, var));
    }
    r.estimates = est;
    return r;
}

}  // namespace phmeas
