#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace phmeas {

/// Eigen-decomposition of a PH observable with eta-orthonormal eigenvectors.
///
/// Eigenpairs are sorted by ascending eigenvalue. Column k of `eigenvectors`
/// is E_k, scaled so that <E_k|eta|E_k> = signs[k] = +1 or -1, and phased so
/// its first component of largest modulus is real positive.
struct PHSpectrum {
    Eigen::VectorXd eigenvalues;
    ComplexMatrix eigenvectors;
    std::vector<int> signs;
    PHMetric metric;
    /// Largest |Im e_k| of the raw eigenvalues before truncation to real.
    double max_imag = 0.0;

    Eigen::Index dim() const noexcept { return eigenvalues.size(); }
    ComplexVector vector(Eigen::Index k) const { return eigenvectors.col(k); }
};

/// G_kl = <E_k|eta|E_l>
inline ComplexMatrix eta_gram(const PHSpectrum& spectrum)
{
    return spectrum.eigenvectors.adjoint() * spectrum.metric.eta() * spectrum.eigenvectors;
}

/// ||sum_k s_k |E_k><E_k| eta - 1||_F
inline double completeness_residual(const PHSpectrum& spectrum)
{
    const auto n = spectrum.dim();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        acc += double(spectrum.signs[k]) * spectrum.vector(k) * spectrum.vector(k).adjoint();
    return (acc * spectrum.metric.eta() - ComplexMatrix::Identity(n, n)).norm();
}

/// Largest deviation of the eta-Gram matrix from diag(s_k).
inline double eta_gram_residual(const PHSpectrum& spectrum)
{
    ComplexMatrix g = eta_gram(spectrum);
    for (Eigen::Index k = 0; k < spectrum.dim(); ++k)
        g(k, k) -= double(spectrum.signs[k]);
    return g.cwiseAbs().maxCoeff();
}

/// sum_k e_k s_k |E_k><E_k| eta
inline ComplexMatrix spectral_resolution(const PHSpectrum& spectrum)
{
    const auto n = spectrum.dim();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        acc += spectrum.eigenvalues(k) * double(spectrum.signs[k]) * spectrum.vector(k) *
               spectrum.vector(k).adjoint();
    return acc * spectrum.metric.eta();
}

inline PHSpectrum decompose(const PHObservable& observable)
{
    const ComplexMatrix& h = observable.matrix();
    const PHMetric& metric = observable.metric();
    const ComplexMatrix& eta = metric.eta();
    const auto n = h.rows();

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(h, true);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::IllConditioned, "spectral", "eigensolver did not converge");

    const ComplexVector raw = solver.eigenvalues();
    const double max_abs = raw.cwiseAbs().maxCoeff();
    double max_imag = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        max_imag = std::max(max_imag, std::abs(raw(k).imag()));
    if (max_imag > Tolerances::rel * max_abs)
        throw Error(ErrorKind::ComplexSpectrum, "spectral",
                    "eigenvalue with non-negligible imaginary part (broken real spectrum)",
                    max_imag);

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return raw(a).real() < raw(b).real(); });

    const double gap_floor = Tolerances::deg * max_abs;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double gap = raw(order[k + 1]).real() - raw(order[k]).real();
        if (gap < gap_floor || max_abs == 0.0)
            throw Error(ErrorKind::Degenerate, "spectral",
                        "eigenvalues closer than the degeneracy threshold", gap);
    }

    PHSpectrum out{Eigen::VectorXd(n), ComplexMatrix(n, n), std::vector<int>(n), metric, max_imag};
    for (Eigen::Index k = 0; k < n; ++k) {
        ComplexVector v = solver.eigenvectors().col(order[k]);
        v.normalize();
        const double eta_norm = v.dot(eta * v).real();
        if (std::abs(eta_norm) < Tolerances::norm)
            throw Error(ErrorKind::VanishingEtaNorm, "spectral",
                        "eigenvector has vanishing eta-norm (threshold 1e-8 for unit vectors)",
                        eta_norm);
        v /= std::sqrt(std::abs(eta_norm));
        v *= detail::canonical_phase(v);
        out.eigenvalues(k) = raw(order[k]).real();
        out.eigenvectors.col(k) = v;
        out.signs[k] = eta_norm > 0 ? 1 : -1;
    }

    const double hnorm = h.norm();
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexVector e = out.vector(k);
        const double r = (h * e - out.eigenvalues(k) * e).norm();
        if (r > Tolerances::rel * hnorm * e.norm())
            throw Error(ErrorKind::IllConditioned, "spectral", "eigenpair residual too large", r);
    }
    const double gram = eta_gram_residual(out);
    if (gram > Tolerances::rel)
        throw Error(ErrorKind::IllConditioned, "spectral",
                    "eigenvectors are not eta-orthogonal within tolerance", gram);
    return out;
}

}  // namespace phmeas
