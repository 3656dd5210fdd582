#pragma once

// Monte Carlo model of the photonic simulator. Every emitted photon is routed
// to subspace k with probability w_k / sum_l w_l, projected onto v_k, and
// postselected (Bernoulli, probability <v_k|rho|v_k>). Detected events are
// labelled with e_k and carry the statistical weight s_k.

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "dilation.hpp"
#include "measurement.hpp"

namespace phmeas {

struct EventRecord {
    std::vector<std::uint64_t> counts;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> eigenvalues;
    std::vector<int> signs;

    std::uint64_t detected() const
    {
        std::uint64_t total = 0;
        for (auto c : counts)
            total += c;
        return total;
    }
    /// sum_k s_k n_k
    double weighted_total() const
    {
        double total = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k)
            total += signs[k] * double(counts[k]);
        return total;
    }

    bool operator==(const EventRecord&) const = default;
};

struct MeasurementEstimate {
    double expectation_hat = 0.0;
    double variance_hat = 0.0;
    /// Delta-method standard error of expectation_hat.
    double std_error = 0.0;
    double variance_std_error = 0.0;
    /// Delta-method covariance of (expectation_hat, variance_hat).
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
    EventRecord counts_used;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double unit_uniform(std::mt19937_64& rng)
{
    return double(rng() >> 11) * 0x1.0p-53;
}

inline constexpr std::uint64_t kChunkTrials = 1u << 16;

}  // namespace detail

/// Seed of an independent stream derived from (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(~stream));
}

/// Trials are processed in fixed-size chunks, each with its own stream
/// derived from (seed, chunk index), so the counts do not depend on `workers`.
inline EventRecord simulate_events(const DilatedMeasurement& dilation, const PHSpectrum& spectrum,
                                   const QuantumState& state, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 1)
{
    if (trials < 1)
        throw Error(ErrorKind::InvalidArgument, "sampler", "trials must be at least 1");
    if (dilation.dim() != spectrum.dim() || state.dim() != spectrum.dim())
        throw Error(ErrorKind::DimensionMismatch, "sampler",
                    "dilation, spectrum and state dimensions differ");

    const auto n = std::size_t(dilation.dim());
    std::vector<double> cumulative(n), detect(n);
    double total_w = 0.0;
    for (double w : dilation.weights)
        total_w += w;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += dilation.weights[k] / total_w;
        cumulative[k] = acc;
        const ComplexVector& v = dilation.duals[k];
        detect[k] = std::clamp(v.dot(state.dirac() * v).real(), 0.0, 1.0);
    }
    cumulative.back() = 1.0;

    const std::uint64_t chunks = (trials + detail::kChunkTrials - 1) / detail::kChunkTrials;
    auto run_chunk = [&](std::uint64_t c, std::vector<std::uint64_t>& counts) {
        std::mt19937_64 rng(derive_seed(seed, c));
        const std::uint64_t begin = c * detail::kChunkTrials;
        const std::uint64_t end = std::min(trials, begin + detail::kChunkTrials);
        for (std::uint64_t t = begin; t < end; ++t) {
            const double route = detail::unit_uniform(rng);
            const double click = detail::unit_uniform(rng);
            const auto k = std::size_t(std::upper_bound(cumulative.begin(), cumulative.end(), route) -
                                       cumulative.begin());
            const auto sub = std::min(k, n - 1);
            if (click < detect[sub])
                ++counts[sub];
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::min<std::uint64_t>(chunks, 64))));
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(n, 0));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c)
            run_chunk(c, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::uint64_t c = w; c < chunks; c += workers)
                    run_chunk(c, partial[w]);
            });
        for (auto& t : pool)
            t.join();
    }

    EventRecord record{std::vector<std::uint64_t>(n, 0), trials, seed, {}, spectrum.signs};
    for (const auto& p : partial)
        for (std::size_t k = 0; k < n; ++k)
            record.counts[k] += p[k];
    record.eigenvalues.assign(spectrum.eigenvalues.data(),
                              spectrum.eigenvalues.data() + spectrum.eigenvalues.size());
    return record;
}

namespace detail {

struct WeightedStats {
    double mean;
    double var;
    double weight;
};

// Counts enter as reals so the bootstrap can reuse this.
inline WeightedStats weighted_stats(const std::vector<double>& counts, const EventRecord& labels)
{
    double w = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double e = labels.eigenvalues[k];
        const double sn = labels.signs[k] * counts[k];
        w += sn;
        s1 += sn * e;
        s2 += sn * e * e;
    }
    if (w == 0.0)
        return {0.0, 0.0, 0.0};
    const double mean = s1 / w;
    return {mean, s2 / w - mean * mean, w};
}

inline void check_labels(const EventRecord& r)
{
    if (r.counts.size() != r.eigenvalues.size() || r.counts.size() != r.signs.size())
        throw Error(ErrorKind::DimensionMismatch, "sampler", "event record labels are inconsistent");
    if (r.detected() > r.trials)
        throw Error(ErrorKind::InvalidArgument, "sampler", "more detections than trials");
}

}  // namespace detail

/// Weighted estimators with s_k = +-1 as statistical weights:
///   mean = sum s_k e_k n_k / sum s_k n_k
///   var  = sum s_k (e_k - mean)^2 n_k / sum s_k n_k
/// Standard errors come from the multinomial covariance of the counts
/// (including the undetected outcome) by the delta method.
inline MeasurementEstimate estimate(const EventRecord& record)
{
    detail::check_labels(record);
    const std::size_t n = record.counts.size();
    std::vector<double> counts(record.counts.begin(), record.counts.end());
    const auto stats = detail::weighted_stats(counts, record);
    if (stats.weight == 0.0)
        throw Error(ErrorKind::DegenerateStatistics, "sampler",
                    "weighted count total sum s_k n_k is zero (eta-null empirical state)");

    MeasurementEstimate out;
    out.expectation_hat = stats.mean;
    out.variance_hat = stats.var;
    out.counts_used = record;

    // d mean / d n_k = s_k (e_k - mean) / W
    // d var  / d n_k = s_k ((e_k - mean)^2 - var) / W
    Eigen::MatrixXd grad(2, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double d = record.eigenvalues[k] - stats.mean;
        grad(0, Eigen::Index(k)) = record.signs[k] * d / stats.weight;
        grad(1, Eigen::Index(k)) = record.signs[k] * (d * d - stats.var) / stats.weight;
    }
    const double trials = double(record.trials);
    const auto dim = Eigen::Index(n);
    Eigen::MatrixXd cov(dim, dim);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const double qk = counts[k] / trials, ql = counts[l] / trials;
            cov(Eigen::Index(k), Eigen::Index(l)) = trials * ((k == l ? qk : 0.0) - qk * ql);
        }
    out.covariance = grad * cov * grad.transpose();
    out.std_error = std::sqrt(std::max(0.0, out.covariance(0, 0)));
    out.variance_std_error = std::sqrt(std::max(0.0, out.covariance(1, 1)));
    return out;
}

struct BootstrapError {
    double expectation = 0.0;
    double variance = 0.0;
    std::size_t used = 0;
};

/// Multinomial bootstrap cross-check of the delta-method errors.
inline BootstrapError bootstrap_std_error(const EventRecord& record, std::size_t resamples = 1000,
                                          std::uint64_t seed = 0)
{
    detail::check_labels(record);
    const std::size_t n = record.counts.size();
    std::mt19937_64 rng(derive_seed(seed, 0xb007));
    std::vector<double> means, vars;
    std::vector<double> draw(n);
    for (std::size_t r = 0; r < resamples; ++r) {
        std::uint64_t remaining = record.trials;
        double mass = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double q = double(record.counts[k]) / double(record.trials);
            const double p = mass > 0.0 ? std::clamp(q / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::uint64_t> bin(remaining, p);
            const auto x = remaining ? bin(rng) : 0;
            draw[k] = double(x);
            remaining -= x;
            mass -= q;
        }
        const auto s = detail::weighted_stats(draw, record);
        if (s.weight == 0.0)
            continue;
        means.push_back(s.mean);
        vars.push_back(s.var);
    }
    auto stdev = [](const std::vector<double>& x) {
        if (x.size() < 2)
            return 0.0;
        double m = 0.0;
        for (double v : x)
            m += v;
        m /= double(x.size());
        double ss = 0.0;
        for (double v : x)
            ss += (v - m) * (v - m);
        return std::sqrt(ss / double(x.size() - 1));
    };
    return {stdev(means), stdev(vars), means.size()};
}

struct ExperimentResult {
    Moments analytic;
    MeasurementEstimate sampled;
    PHSpectrum spectrum;
    DilatedMeasurement dilation;
};

/// Analytic moments next to the sampled estimate from the full pipeline.
inline ExperimentResult run_experiment(const PHObservable& observable, const QuantumState& state,
                                       std::uint64_t trials, std::uint64_t seed,
                                       unsigned workers = 1)
{
    const Moments analytic = moments(observable, state);
    PHSpectrum spectrum = decompose(observable);
    DilatedMeasurement dilation = build_dilation(spectrum);
    const EventRecord record = simulate_events(dilation, spectrum, state, trials, seed, workers);
    return {analytic, estimate(record), std::move(spectrum), std::move(dilation)};
}

}  // namespace phmeas
