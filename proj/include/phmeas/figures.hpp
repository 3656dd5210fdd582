#pragma once

// Theta-sweeps behind the expectation/variance and uncertainty-ratio plots.

#include <atomic>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "io.hpp"
#include "uncertainty.hpp"

namespace phmeas {

enum class Figure { Fig3a, Fig3b, Fig3c, Fig3d, Fig4a, Fig4b, Fig4c, Fig4d };

inline std::optional<Figure> parse_figure(std::string_view s)
{
    static constexpr std::pair<std::string_view, Figure> table[] = {
        {"fig3a", Figure::Fig3a}, {"fig3b", Figure::Fig3b}, {"fig3c", Figure::Fig3c},
        {"fig3d", Figure::Fig3d}, {"fig4a", Figure::Fig4a}, {"fig4b", Figure::Fig4b},
        {"fig4c", Figure::Fig4c}, {"fig4d", Figure::Fig4d}};
    for (const auto& [name, fig] : table)
        if (name == s)
            return fig;
    return std::nullopt;
}

struct FigureSetup {
    double theta1;
    /// fig3: the single observable swept. fig4: the (A, B) pair.
    std::string observable_a;
    std::string observable_b;
    std::string metric;
    bool ratio;
};

inline FigureSetup figure_setup(Figure f)
{
    constexpr double tilt = std::numbers::pi / 2.5;
    switch (f) {
    case Figure::Fig3a: return {0.0, "eq5.A", "", "eta_pos", false};
    case Figure::Fig3b: return {0.0, "eq5.B", "", "eta_pos", false};
    case Figure::Fig3c: return {tilt, "eq5.A", "", "eta_pos", false};
    case Figure::Fig3d: return {tilt, "eq5.B", "", "eta_pos", false};
    case Figure::Fig4a: return {0.0, "eq5.A", "eq5.B", "eta_pos", true};
    case Figure::Fig4b: return {tilt, "eq5.A", "eq5.B", "eta_pos", true};
    case Figure::Fig4c: return {0.0, "eq6.A", "eq6.B", "eta_indef", true};
    case Figure::Fig4d: return {tilt, "eq6.A", "eq6.B", "eta_indef", true};
    }
    return {};
}

/// theta2_i = pi * i / (grid_points - 1), i = 0 .. grid_points - 1.
inline double grid_theta2(std::size_t i, std::size_t grid_points)
{
    return std::numbers::pi * double(i) / double(grid_points - 1);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const
    {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return out;
    }

    io::json to_json() const
    {
        io::json out = io::json::array();
        for (const auto& r : rows) {
            io::json obj = io::json::object();
            for (std::size_t i = 0; i < header.size(); ++i)
                obj[header[i]] = io::cell(r[i]);
            out.push_back(std::move(obj));
        }
        return out;
    }
};

inline const std::vector<std::string>& fig3_header()
{
    static const std::vector<std::string> h{
        "index",         "theta1",        "theta2",       "observable",  "expectation",
        "variance",      "expectation_hat", "expectation_se", "variance_hat", "variance_se",
        "status"};
    return h;
}

inline const std::vector<std::string>& fig4_header()
{
    static const std::vector<std::string> h{"index",  "theta1",   "theta2",   "R",
                                            "R_hat",  "R_se",     "var_a",    "var_b",
                                            "re_cross", "im_cross", "status"};
    return h;
}

/// Sweep theta2 over the grid and emit analytic and sampled columns. A grid
/// point whose pipeline fails keeps its row with the error kind in `status`.
/// Each grid point samples with seed derive_seed(seed, index), so rows do not
/// depend on `workers`.
inline CsvTable reproduce_figure(Figure figure, std::size_t grid_points = 37,
                                 std::uint64_t trials = 1'000'000, std::uint64_t seed = 42,
                                 unsigned workers = 1)
{
    if (grid_points < 2)
        throw Error(ErrorKind::InvalidArgument, "cli", "grid_points must be at least 2",
                    double(grid_points));
    if (trials < 1)
        throw Error(ErrorKind::InvalidArgument, "cli", "trials must be at least 1");

    const FigureSetup setup = figure_setup(figure);
    const PHMetric metric = make_metric(*fixtures::metric(setup.metric));
    const PHObservable a = check_pseudo_hermitian(*fixtures::observable(setup.observable_a), metric);
    const std::optional<PHObservable> b =
        setup.ratio ? std::optional(check_pseudo_hermitian(*fixtures::observable(setup.observable_b), metric))
                    : std::nullopt;

    CsvTable table{setup.ratio ? fig4_header() : fig3_header(), std::vector<std::vector<std::string>>(grid_points)};
    const std::string nan = "nan";

    auto point = [&](std::size_t i) {
        const double t2 = grid_theta2(i, grid_points);
        const std::uint64_t point_seed = derive_seed(seed, i);
        std::vector<std::string> row{std::to_string(i), io::fmt(setup.theta1), io::fmt(t2)};
        try {
            const QuantumState state = state_from_pure(theta_state(setup.theta1, t2), metric);
            if (!setup.ratio) {
                const auto res = run_experiment(a, state, trials, point_seed);
                row.insert(row.end(),
                           {setup.observable_a, io::fmt(res.analytic.expectation),
                            io::fmt(res.analytic.variance), io::fmt(res.sampled.expectation_hat),
                            io::fmt(res.sampled.std_error), io::fmt(res.sampled.variance_hat),
                            io::fmt(res.sampled.variance_std_error), "ok"});
            } else {
                const auto an = uncertainty_ratio(a, *b, state, AnalyticMode{});
                const auto sm = uncertainty_ratio(a, *b, state, SampledMode{trials, point_seed, 1});
                const bool ok = an.status == RatioStatus::Defined && sm.status == RatioStatus::Defined;
                row.insert(row.end(),
                           {io::fmt(an.ratio_r), io::fmt(sm.ratio_r), io::fmt(sm.std_error_r),
                            io::fmt(an.var_a), io::fmt(an.var_b), io::fmt(an.cross_term.real()),
                            io::fmt(an.cross_term.imag()),
                            ok ? "ok" : std::string(to_string(RatioStatus::CrossTermVanishes))});
            }
        } catch (const Error& e) {
            row.resize(table.header.size(), nan);
            if (!setup.ratio)
                row[3] = setup.observable_a;
            row.back() = std::string(to_string(e.kind()));
        }
        table.rows[i] = std::move(row);
    };

    workers = std::max(1u, std::min<unsigned>(workers, unsigned(grid_points)));
    if (workers == 1) {
        for (std::size_t i = 0; i < grid_points; ++i)
            point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < grid_points;)
                    point(i);
            });
        for (auto& t : pool)
            t.join();
    }
    return table;
}

}  // namespace phmeas
