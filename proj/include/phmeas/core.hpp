#pragma once

// Core types: complex dense matrices, the pseudo-Hermitian metric, validated
// PH observables and quantum states.

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace phmeas {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr complex kI{0.0, 1.0};

/// Numerical thresholds shared by all modules.
struct Tolerances {
    static constexpr double rel = 1e-9;    // relative, Frobenius
    static constexpr double abs = 1e-12;
    static constexpr double sing = 1e-12;  // min/max singular value ratio
    static constexpr double deg = 1e-8;    // eigenvalue gap, relative to max|e|
    static constexpr double norm = 1e-8;   // |<E|eta|E>| floor for unit E
    static constexpr double psd = 1e-9;    // relative to ||M||
};

namespace detail {

inline bool all_finite(const ComplexMatrix& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

inline void require_square(const ComplexMatrix& m, const char* module, const char* what)
{
    if (m.rows() == 0 || m.rows() != m.cols())
        throw Error(ErrorKind::DimensionMismatch, module,
                    std::string(what) + " must be a non-empty square matrix");
    if (!all_finite(m))
        throw Error(ErrorKind::InvalidArgument, module,
                    std::string(what) + " has non-finite entries");
}

inline double hermitian_residual(const ComplexMatrix& m)
{
    return (m - m.adjoint()).norm();
}

// Phase that makes the first component of largest modulus real positive.
inline complex canonical_phase(const ComplexVector& v)
{
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        // ties within rounding resolve to the lowest index
        if (std::abs(v(i)) > best_abs * (1.0 + 1e-12)) {
            best = i;
            best_abs = std::abs(v(i));
        }
    }
    if (best_abs <= 0.0)
        return 1.0;
    return std::conj(v(best)) / best_abs;
}

}  // namespace detail

enum class Definiteness { PositiveDefinite, Indefinite };

inline std::string_view to_string(Definiteness d) noexcept
{
    return d == Definiteness::PositiveDefinite ? "PositiveDefinite" : "Indefinite";
}

/// Invertible Hermitian matrix eta defining <a|b>_eta = <a|eta|b>.
class PHMetric {
  public:
    const ComplexMatrix& eta() const noexcept { return eta_; }
    const ComplexMatrix& eta_inverse() const noexcept { return eta_inverse_; }
    Definiteness definiteness() const noexcept { return definiteness_; }
    Eigen::Index dim() const noexcept { return eta_.rows(); }

    bool same_as(const PHMetric& other) const
    {
        return dim() == other.dim() &&
               (eta_ - other.eta_).norm() <= Tolerances::rel * std::max(1.0, eta_.norm());
    }

  private:
    PHMetric(ComplexMatrix eta, ComplexMatrix inv, Definiteness d)
        : eta_(std::move(eta)), eta_inverse_(std::move(inv)), definiteness_(d)
    {
    }
    friend PHMetric make_metric(const ComplexMatrix& eta);

    ComplexMatrix eta_;
    ComplexMatrix eta_inverse_;
    Definiteness definiteness_;
};

inline PHMetric make_metric(const ComplexMatrix& eta)
{
    detail::require_square(eta, "phcore", "metric");
    const double scale = eta.norm();
    const double herm = detail::hermitian_residual(eta);
    if (herm > Tolerances::rel * scale)
        throw Error(ErrorKind::NotHermitian, "phcore", "metric is not Hermitian",
                    scale > 0 ? herm / scale : herm);

    Eigen::JacobiSVD<ComplexMatrix> svd(eta);
    const auto& sv = svd.singularValues();
    const double ratio = sv(0) > 0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    if (ratio < Tolerances::sing)
        throw Error(ErrorKind::Singular, "phcore", "metric is singular", ratio);

    ComplexMatrix inv = eta.fullPivLu().inverse();
    const auto n = eta.rows();
    const double inv_res = (eta * inv - ComplexMatrix::Identity(n, n)).norm();
    if (inv_res > Tolerances::rel * std::sqrt(double(n)))
        throw Error(ErrorKind::Singular, "phcore", "metric inverse is inaccurate", inv_res);

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (eta + eta.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    const auto d = es.eigenvalues().minCoeff() > 0.0 ? Definiteness::PositiveDefinite
                                                     : Definiteness::Indefinite;
    return PHMetric(eta, std::move(inv), d);
}

/// A square matrix H with H^dagger = eta H eta^-1 for its metric.
class PHObservable {
  public:
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const PHMetric& metric() const noexcept { return metric_; }
    /// ||H^dagger - eta H eta^-1||_F / ||H||_F at validation time.
    double residual() const noexcept { return residual_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

  private:
    PHObservable(ComplexMatrix h, PHMetric m, double r)
        : matrix_(std::move(h)), metric_(std::move(m)), residual_(r)
    {
    }
    friend PHObservable check_pseudo_hermitian(const ComplexMatrix&, const PHMetric&);

    ComplexMatrix matrix_;
    PHMetric metric_;
    double residual_;
};

inline double pseudo_hermitian_residual(const ComplexMatrix& h, const PHMetric& metric)
{
    const double scale = h.norm();
    const double r = (h.adjoint() - metric.eta() * h * metric.eta_inverse()).norm();
    return scale > 0 ? r / scale : r;
}

inline PHObservable check_pseudo_hermitian(const ComplexMatrix& h, const PHMetric& metric)
{
    detail::require_square(h, "phcore", "observable");
    if (h.rows() != metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "phcore",
                    "observable and metric dimensions differ");
    const double r = pseudo_hermitian_residual(h, metric);
    if (r > Tolerances::rel)
        throw Error(ErrorKind::NotPseudoHermitian, "phcore",
                    "H^dagger != eta H eta^-1 (relative residual " + std::to_string(r) + ")",
                    r);
    return PHObservable(h, metric, r);
}

enum class Normalization { Dirac, EtaNormalized };

/// Density matrix. The PSD, unit-trace part is stored separately from the
/// real scale that realizes the declared normalization, so a state with
/// negative eta-norm keeps a testable PSD core: rho() = scale() * dirac().
class QuantumState {
  public:
    const ComplexMatrix& dirac() const noexcept { return dirac_; }
    double scale() const noexcept { return scale_; }
    ComplexMatrix rho() const { return scale_ * dirac_; }
    Normalization normalization() const noexcept { return mode_; }
    const std::optional<PHMetric>& metric() const noexcept { return metric_; }
    Eigen::Index dim() const noexcept { return dirac_.rows(); }

    /// Tr[rho_dirac eta]
    double eta_norm(const PHMetric& metric) const
    {
        return (dirac_ * metric.eta()).trace().real();
    }

    /// rho / Tr[rho eta] under `metric`, independent of the stored mode.
    ComplexMatrix eta_normalized(const PHMetric& metric) const
    {
        if (metric.dim() != dim())
            throw Error(ErrorKind::DimensionMismatch, "phcore", "state and metric dimensions differ");
        const double t = eta_norm(metric);
        if (std::abs(t) <= Tolerances::abs)
            throw Error(ErrorKind::VanishingEtaNorm, "phcore", "Tr[rho eta] vanishes", t);
        return dirac_ / t;
    }

    /// True when `metric` matches the one this state was eta-normalized with.
    bool is_eta_normalized_for(const PHMetric& metric) const
    {
        return mode_ == Normalization::EtaNormalized && metric_ && metric_->same_as(metric);
    }

  private:
    QuantumState(ComplexMatrix dirac, double scale, Normalization mode,
                 std::optional<PHMetric> metric)
        : dirac_(std::move(dirac)), scale_(scale), mode_(mode), metric_(std::move(metric))
    {
    }
    friend QuantumState make_state(const ComplexMatrix&, const PHMetric&, Normalization);

    ComplexMatrix dirac_;
    double scale_;
    Normalization mode_;
    std::optional<PHMetric> metric_;
};

/// Build a state from a (possibly unnormalized) PSD density matrix.
inline QuantumState make_state(const ComplexMatrix& rho, const PHMetric& metric,
                               Normalization mode)
{
    detail::require_square(rho, "phcore", "density matrix");
    if (rho.rows() != metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "phcore", "state and metric dimensions differ");
    const double scale = std::max(rho.norm(), Tolerances::abs);
    const double herm = detail::hermitian_residual(rho);
    if (herm > Tolerances::rel * scale)
        throw Error(ErrorKind::NotHermitian, "phcore", "density matrix is not Hermitian", herm);
    const ComplexMatrix h = 0.5 * (rho + rho.adjoint());
    const double tr = h.trace().real();
    if (tr <= Tolerances::abs)
        throw Error(ErrorKind::ZeroVector, "phcore", "density matrix has vanishing trace", tr);
    ComplexMatrix dirac = h / tr;

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dirac, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -Tolerances::abs)
        throw Error(ErrorKind::NotPositiveSemidefinite, "phcore",
                    "density matrix has a negative eigenvalue", min_eig);

    if (mode == Normalization::Dirac)
        return QuantumState(std::move(dirac), 1.0, mode, std::nullopt);

    const double t = (dirac * metric.eta()).trace().real();
    if (std::abs(t) <= Tolerances::abs)
        throw Error(ErrorKind::VanishingEtaNorm, "phcore",
                    "Tr[rho eta] vanishes; state cannot be eta-normalized", t);
    return QuantumState(std::move(dirac), 1.0 / t, mode, metric);
}

inline QuantumState state_from_pure(const ComplexVector& psi, const PHMetric& metric,
                                    Normalization mode = Normalization::EtaNormalized)
{
    if (psi.size() != metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "phcore", "state vector and metric dimensions differ");
    if (!detail::all_finite(psi))
        throw Error(ErrorKind::InvalidArgument, "phcore", "state vector has non-finite entries");
    const double dirac_norm = psi.squaredNorm();
    if (dirac_norm <= Tolerances::abs)
        throw Error(ErrorKind::ZeroVector, "phcore", "state vector is zero", dirac_norm);
    if (mode == Normalization::EtaNormalized) {
        const double eta_norm = psi.dot(metric.eta() * psi).real();
        if (std::abs(eta_norm) <= Tolerances::abs * dirac_norm)
            throw Error(ErrorKind::VanishingEtaNorm, "phcore",
                        "<psi|eta|psi> vanishes; state is eta-null", eta_norm);
    }
    return make_state(psi * psi.adjoint(), metric, mode);
}

/// <psi1|eta|psi2>
inline complex eta_inner(const ComplexVector& psi1, const ComplexVector& psi2,
                         const PHMetric& metric)
{
    if (psi1.size() != metric.dim() || psi2.size() != metric.dim())
        throw Error(ErrorKind::DimensionMismatch, "phcore", "vector and metric dimensions differ");
    return psi1.dot(metric.eta() * psi2);
}

/// (cos t1 sin t2, cos t1 cos t2, sin t1), unnormalized.
inline ComplexVector theta_state(double theta1, double theta2)
{
    ComplexVector v(3);
    v << std::cos(theta1) * std::sin(theta2), std::cos(theta1) * std::cos(theta2),
        std::sin(theta1);
    return v;
}

}  // namespace phmeas
