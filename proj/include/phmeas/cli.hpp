#pragma once

// Command-line front end. run_cli() is the whole program minus main(), so the
// tests can drive it in-process.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "figures.hpp"

namespace phmeas::cli {

inline constexpr std::string_view kColumns = R"(CSV columns (fixed order):
  validate     observable,metric,definiteness,residual,status
  spectrum     k,eigenvalue,sign,eta_gram_residual,completeness_residual
  measure      expectation,variance,eta_norm,normalized_on_demand,p_kk,signs
  dilate       k,eigenvalue,sign,weight,normalizer,v_re,v_im,u_re,u_im,factors
  sample       k,e_k,s_k,n_k,p_kk_analytic,p_hat
  uncertainty  theta1,theta2,var_a,var_b,re_cross,im_cross,R,mode,std_error_R
  reproduce    fig3*: index,theta1,theta2,observable,expectation,variance,
                      expectation_hat,expectation_se,variance_hat,variance_se,status
               fig4*: index,theta1,theta2,R,R_hat,R_se,var_a,var_b,re_cross,im_cross,status
List cells are ';'-separated. Matrices in u_re/u_im are row-major. Factors are
lower:theta:alpha:beta per two-level rotation, in application order.
Angles are radians. R is 'inf' when the cross term vanishes.)";

namespace detail {

inline std::string join(const std::vector<std::string>& xs, char sep = ';')
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += sep;
        out += xs[i];
    }
    return out;
}

template <class F>
std::string join_n(Eigen::Index n, F cell)
{
    std::vector<std::string> xs;
    for (Eigen::Index i = 0; i < n; ++i)
        xs.push_back(cell(i));
    return join(xs);
}

inline io::json error_json(const Error& e)
{
    io::json j{{"error", std::string(to_string(e.kind()))},
               {"module", e.module()},
               {"message", e.detail()}};
    if (e.value())
        j["value"] = *e.value();
    return j;
}

struct Options {
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 42;
    std::uint64_t trials = 1'000'000;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string config;
    std::string observable;
    std::string observable_b;
    std::string metric;
    std::string state;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::string normalization;
    std::string mode;
    std::string figure;
    std::size_t grid_points = 37;
    bool bootstrap = false;
};

inline ExperimentConfig build_config(const Options& o, const CLI::App& app, const CLI::App& sub)
{
    ExperimentConfig c;
    if (!o.config.empty())
        c = config_from_json(phmeas::detail::load_json_file(o.config));
    auto given = [&](const char* name) {
        return (app.get_option_no_throw(name) && app.get_option_no_throw(name)->count() > 0) ||
               (sub.get_option_no_throw(name) && sub.get_option_no_throw(name)->count() > 0);
    };
    if (given("--observable")) c.observable = o.observable;
    if (given("--observable-b")) c.observable_b = o.observable_b;
    if (given("--metric")) c.metric = o.metric;
    if (given("--state")) {
        if (!o.state.empty() && (o.state.front() == '{' || o.state.front() == '[')) {
            try {
                c.state = io::json::parse(o.state);
            } catch (const io::json::exception& e) {
                throw Error(ErrorKind::ConfigParse, "cli", std::string("invalid inline state: ") + e.what());
            }
        } else {
            c.state = o.state;
        }
    }
    if (given("--theta1") || given("--theta2")) {
        double t1 = 0.0, t2 = 0.0;
        if (c.state.is_object() && c.state.contains("theta1") && c.state.contains("theta2")) {
            t1 = c.state["theta1"].get<double>();
            t2 = c.state["theta2"].get<double>();
        }
        if (given("--theta1")) t1 = o.theta1;
        if (given("--theta2")) t2 = o.theta2;
        c.state = io::json{{"theta1", t1}, {"theta2", t2}};
    }
    if (given("--seed")) c.seed = o.seed;
    if (given("--trials")) c.trials = o.trials;
    if (given("--normalization"))
        c.normalization = o.normalization == "dirac" ? Normalization::Dirac : Normalization::EtaNormalized;
    if (given("--mode"))
        c.mode = o.mode == "sampled" ? RunMode::Sampled : RunMode::Analytic;
    return c;
}

struct Output {
    CsvTable table;
    io::json json;  // used for --format json when not null
};

inline Output cmd_validate(const ExperimentConfig& c)
{
    const ResolvedObservable obs = resolve_observable(c.observable);
    const PHObservable h = resolve_ph_observable(c.observable, c.metric);
    CsvTable t{{"observable", "metric", "definiteness", "residual", "status"}, {}};
    t.rows.push_back({obs.label, metric_label(c.metric, obs),
                      std::string(to_string(h.metric().definiteness())), io::fmt(h.residual()),
                      "valid"});
    return {t, nullptr};
}

inline Output cmd_spectrum(const ExperimentConfig& c)
{
    const PHSpectrum s = decompose(resolve_ph_observable(c.observable, c.metric));
    const std::string gram = io::fmt(eta_gram_residual(s));
    const std::string comp = io::fmt(completeness_residual(s));
    CsvTable t{{"k", "eigenvalue", "sign", "eta_gram_residual", "completeness_residual"}, {}};
    io::json vecs = io::json::array();
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        t.rows.push_back({std::to_string(k), io::fmt(s.eigenvalues(k)), std::to_string(s.signs[k]),
                          gram, comp});
        vecs.push_back(io::vector_to_json(s.vector(k)));
    }
    io::json j = t.to_json();
    for (std::size_t k = 0; k < j.size(); ++k)
        j[k]["eigenvector"] = vecs[k];
    return {t, j};
}

inline Output cmd_measure(const ExperimentConfig& c)
{
    const PHObservable h = resolve_ph_observable(c.observable, c.metric);
    const auto rs = resolve_state(c.state, h.metric(), c.normalization);
    const Moments m = moments(h, rs.state);
    const PHSpectrum s = decompose(h);
    const auto p = decomposition_coefficients(s, rs.state);
    CsvTable t{{"expectation", "variance", "eta_norm", "normalized_on_demand", "p_kk", "signs"}, {}};
    t.rows.push_back({io::fmt(m.expectation), io::fmt(m.variance), io::fmt(m.eta_norm),
                      m.normalized_on_demand ? "true" : "false",
                      join_n(s.dim(), [&](auto k) { return io::fmt(p.diagonal(k)); }),
                      join_n(s.dim(), [&](auto k) { return std::to_string(s.signs[std::size_t(k)]); })});
    io::json pkk = io::json::array();
    for (Eigen::Index k = 0; k < s.dim(); ++k)
        pkk.push_back(p.diagonal(k));
    io::json j{{"expectation", m.expectation}, {"variance", m.variance},
               {"eta_norm", m.eta_norm},       {"normalized_on_demand", m.normalized_on_demand},
               {"p_kk", pkk},                  {"signs", s.signs}};
    return {t, j};
}

inline Output cmd_dilate(const ExperimentConfig& c)
{
    const PHSpectrum s = decompose(resolve_ph_observable(c.observable, c.metric));
    const DilatedMeasurement d = build_dilation(s);
    const auto n = s.dim();
    CsvTable t{{"k", "eigenvalue", "sign", "weight", "normalizer", "v_re", "v_im", "u_re", "u_im",
                "factors"},
               {}};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& v = d.duals[std::size_t(k)];
        const auto& u = d.unitaries[std::size_t(k)];
        std::vector<std::string> factors;
        for (const auto& f : u.factors)
            factors.push_back(std::to_string(f.lower) + ":" + io::fmt(f.theta) + ":" +
                              io::fmt(f.alpha) + ":" + io::fmt(f.beta));
        t.rows.push_back({std::to_string(k), io::fmt(s.eigenvalues(k)), std::to_string(s.signs[std::size_t(k)]),
                          io::fmt(d.weights[std::size_t(k)]), io::fmt(d.normalizer),
                          join_n(n, [&](auto i) { return io::fmt(v(i).real()); }),
                          join_n(n, [&](auto i) { return io::fmt(v(i).imag()); }),
                          join_n(n * n, [&](auto i) { return io::fmt(u.unitary(i / n, i % n).real()); }),
                          join_n(n * n, [&](auto i) { return io::fmt(u.unitary(i / n, i % n).imag()); }),
                          join(factors)});
    }
    return {t, nullptr};
}

inline Output cmd_sample(const ExperimentConfig& c, unsigned workers, bool bootstrap)
{
    const PHObservable h = resolve_ph_observable(c.observable, c.metric);
    const auto rs = resolve_state(c.state, h.metric(), Normalization::Dirac);
    const PHSpectrum s = decompose(h);
    const DilatedMeasurement d = build_dilation(s);
    const EventRecord rec = simulate_events(d, s, rs.state, c.trials, c.seed, workers);
    const auto p = decomposition_coefficients(s, rs.state);
    const double w = rec.weighted_total();
    CsvTable t{{"k", "e_k", "s_k", "n_k", "p_kk_analytic", "p_hat"}, {}};
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        const auto i = std::size_t(k);
        t.rows.push_back({std::to_string(k), io::fmt(rec.eigenvalues[i]), std::to_string(rec.signs[i]),
                          std::to_string(rec.counts[i]), io::fmt(p.diagonal(k)),
                          w != 0.0 ? io::fmt(double(rec.counts[i]) / w) : "nan"});
    }
    io::json j{{"rows", t.to_json()}, {"trials", rec.trials}, {"seed", rec.seed}};
    if (w != 0.0) {
        const auto est = estimate(rec);
        const Moments m = moments(h, rs.state);
        j["estimate"] = {{"expectation_hat", est.expectation_hat},
                         {"variance_hat", est.variance_hat},
                         {"std_error", est.std_error},
                         {"variance_std_error", est.variance_std_error},
                         {"expectation", m.expectation},
                         {"variance", m.variance}};
        if (bootstrap) {
            const auto bs = bootstrap_std_error(rec, 1000, c.seed);
            j["estimate"]["bootstrap_std_error"] = bs.expectation;
            j["estimate"]["bootstrap_variance_std_error"] = bs.variance;
        }
    }
    return {t, j};
}

inline Output cmd_uncertainty(ExperimentConfig c, unsigned workers)
{
    if (c.observable_b.is_null()) {
        const auto obs = resolve_observable(c.observable);
        if (!obs.label.starts_with("eq5") && !obs.label.starts_with("eq6"))
            throw Error(ErrorKind::ConfigParse, "cli", "uncertainty needs --observable-b for non-fixture observables");
        c.observable_b = obs.label.starts_with("eq6") ? "eq6.B" : "eq5.B";
    }
    const PHObservable a = resolve_ph_observable(c.observable, c.metric);
    const PHObservable b = resolve_ph_observable(c.observable_b, c.metric);
    const auto rs = resolve_state(c.state, a.metric(), Normalization::EtaNormalized);
    const RatioMode mode = c.mode == RunMode::Sampled ? RatioMode{SampledMode{c.trials, c.seed, workers}}
                                                      : RatioMode{AnalyticMode{}};
    const UncertaintyReport r = uncertainty_ratio(a, b, rs.state, mode);
    CsvTable t{{"theta1", "theta2", "var_a", "var_b", "re_cross", "im_cross", "R", "mode", "std_error_R"}, {}};
    t.rows.push_back({rs.theta1 ? io::fmt(*rs.theta1) : "nan", rs.theta2 ? io::fmt(*rs.theta2) : "nan",
                      io::fmt(r.var_a), io::fmt(r.var_b), io::fmt(r.cross_term.real()),
                      io::fmt(r.cross_term.imag()), io::fmt(r.ratio_r),
                      r.sampled ? "sampled" : "analytic", io::fmt(r.std_error_r)});
    return {t, nullptr};
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    using detail::Options;
    Options o;
    CLI::App app{"Pseudo-Hermitian observable measurement simulator", "phmeas"};
    app.footer(std::string(kColumns));
    app.require_subcommand(1);
    app.add_option("--out", o.out, "Write output to this file instead of stdout");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--trials", o.trials, "Emitted photons per observable");
    app.add_option("--workers", o.workers, "Worker threads");
    app.add_option("--config", o.config, "ExperimentConfig JSON file");

    auto add_obs = [&](CLI::App* s) {
        s->fallthrough();
        s->add_option("--observable", o.observable, "Fixture (eq5.A, eq5.B, eq6.A, eq6.B) or JSON file");
        s->add_option("--metric", o.metric, "Fixture (eta_pos, eta_indef, identity) or JSON file");
    };
    auto add_state = [&](CLI::App* s) {
        s->add_option("--state", o.state, "State JSON file or inline JSON");
        s->add_option("--theta1", o.theta1, "State parameter theta1 (radians)");
        s->add_option("--theta2", o.theta2, "State parameter theta2 (radians)");
    };

    auto* validate = app.add_subcommand("validate", "Check the pseudo-Hermitian condition");
    add_obs(validate);
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, signs and residuals");
    add_obs(spectrum);
    auto* measure = app.add_subcommand("measure", "Analytic expectation, variance, p_kk");
    add_obs(measure);
    add_state(measure);
    measure->add_option("--normalization", o.normalization, "State normalization")
        ->check(CLI::IsMember({"dirac", "eta"}));
    auto* dilate = app.add_subcommand("dilate", "Dual vectors, weights and unitaries per subspace");
    add_obs(dilate);
    auto* sample = app.add_subcommand("sample", "Monte Carlo photon counting");
    add_obs(sample);
    add_state(sample);
    sample->add_flag("--bootstrap", o.bootstrap, "Add bootstrap errors to JSON output");
    auto* uncert = app.add_subcommand("uncertainty", "Uncertainty ratio R for a pair");
    add_obs(uncert);
    add_state(uncert);
    uncert->add_option("--observable-b", o.observable_b, "Second observable");
    uncert->add_option("--mode", o.mode, "analytic or sampled")->check(CLI::IsMember({"analytic", "sampled"}));
    auto* reproduce = app.add_subcommand("reproduce", "Sweep theta2 for one figure panel");
    reproduce->fallthrough();
    reproduce->add_option("--figure", o.figure, "fig3a..fig3d, fig4a..fig4d")->required();
    reproduce->add_option("--grid-points", o.grid_points, "Grid size over theta2 in [0, pi]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << detail::error_json(Error(ErrorKind::ConfigParse, "cli", e.what())).dump() << '\n';
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const ExperimentConfig cfg = detail::build_config(o, app, *sub);
        detail::Output result;
        if (sub == validate) result = detail::cmd_validate(cfg);
        else if (sub == spectrum) result = detail::cmd_spectrum(cfg);
        else if (sub == measure) result = detail::cmd_measure(cfg);
        else if (sub == dilate) result = detail::cmd_dilate(cfg);
        else if (sub == sample) result = detail::cmd_sample(cfg, o.workers, o.bootstrap);
        else if (sub == uncert) result = detail::cmd_uncertainty(cfg, o.workers);
        else {
            const auto fig = parse_figure(o.figure);
            if (!fig)
                throw Error(ErrorKind::ConfigParse, "cli", "unknown figure '" + o.figure + "'");
            result.table = reproduce_figure(*fig, o.grid_points, cfg.trials, cfg.seed, o.workers);
            result.json = nullptr;
        }

        const std::string text = o.format == "json"
                                     ? (result.json.is_null() ? result.table.to_json() : result.json).dump(2) + "\n"
                                     : result.table.to_csv();
        if (o.out.empty()) {
            out << text;
        } else {
            std::ofstream file(o.out, std::ios::binary);
            if (!file)
                throw Error(ErrorKind::ConfigParse, "cli", "cannot write '" + o.out + "'");
            file << text;
        }
        return 0;
    } catch (const Error& e) {
        err << detail::error_json(e).dump() << '\n';
        return e.kind() == ErrorKind::ConfigParse ? 1 : 2;
    } catch (const std::exception& e) {
        err << detail::error_json(Error(ErrorKind::ConfigParse, "cli", e.what())).dump() << '\n';
        return 1;
    }
}

}  // namespace phmeas::cli
