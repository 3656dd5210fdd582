#pragma once

// Experiment configuration: fixture names, inline matrices or JSON files for
// observables, metrics and states.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>

#include "fixtures.hpp"
#include "io.hpp"

namespace phmeas {

enum class RunMode { Analytic, Sampled };

struct ExperimentConfig {
    /// Fixture name, path to a JSON file, or an inline matrix / object.
    io::json observable = "eq5.A";
    io::json observable_b = nullptr;
    /// Fixture name, file, or inline matrix. Null means the fixture's own metric.
    io::json metric = nullptr;
    /// {"theta1", "theta2"} | {"vector": [...]} | {"density": [[...]]} | file path
    io::json state = io::json{{"theta1", 0.0}, {"theta2", std::numbers::pi / 4}};
    Normalization normalization = Normalization::EtaNormalized;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 42;
    RunMode mode = RunMode::Analytic;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& what)
{
    throw Error(ErrorKind::ConfigParse, "cli", what);
}

inline io::json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        config_fail("cannot open '" + path + "'");
    try {
        return io::json::parse(in);
    } catch (const io::json::exception& e) {
        config_fail("invalid JSON in '" + path + "': " + e.what());
    }
}

// String refs are fixture names first, then file paths; anything else fails.
template <class Lookup>
io::json deref(const io::json& ref, Lookup fixture, const char* what)
{
    if (!ref.is_string())
        return ref;
    const auto name = ref.get<std::string>();
    if (fixture(name))
        return ref;
    if (std::filesystem::is_regular_file(name))
        return load_json_file(name);
    config_fail(std::string("unknown ") + what + " '" + name + "' (not a fixture name or file)");
}

}  // namespace detail

/// Resolved observable matrix, plus the metric embedded in its file if any.
struct ResolvedObservable {
    ComplexMatrix matrix;
    std::optional<ComplexMatrix> embedded_metric;
    std::string label;
};

inline ResolvedObservable resolve_observable(const io::json& ref)
{
    const io::json j = detail::deref(ref, fixtures::observable, "observable");
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        return {*fixtures::observable(name), fixtures::metric(fixtures::default_metric_for(name)),
                name};
    }
    if (j.is_object()) {
        if (!j.contains("matrix"))
            detail::config_fail("observable object needs a \"matrix\" field");
        ResolvedObservable out{io::matrix_from_json(j["matrix"]), std::nullopt,
                               ref.is_string() ? ref.get<std::string>() : "inline"};
        if (j.contains("eta"))
            out.embedded_metric = io::matrix_from_json(j["eta"]);
        return out;
    }
    return {io::matrix_from_json(j), std::nullopt, ref.is_string() ? ref.get<std::string>() : "inline"};
}

inline ComplexMatrix resolve_metric_matrix(const io::json& ref)
{
    const io::json j = detail::deref(ref, fixtures::metric, "metric");
    if (j.is_string())
        return *fixtures::metric(j.get<std::string>());
    if (j.is_object()) {
        if (!j.contains("eta"))
            detail::config_fail("metric object needs an \"eta\" field");
        return io::matrix_from_json(j["eta"]);
    }
    return io::matrix_from_json(j);
}

inline std::string metric_label(const io::json& ref, const ResolvedObservable& obs)
{
    if (ref.is_string())
        return ref.get<std::string>();
    if (ref.is_null() && obs.embedded_metric)
        return obs.label == "inline" ? "inline" : std::string(fixtures::default_metric_for(obs.label));
    return "inline";
}

/// Observable validated against the explicit metric, or its own one.
inline PHObservable resolve_ph_observable(const io::json& observable_ref, const io::json& metric_ref)
{
    const ResolvedObservable obs = resolve_observable(observable_ref);
    ComplexMatrix eta;
    if (!metric_ref.is_null())
        eta = resolve_metric_matrix(metric_ref);
    else if (obs.embedded_metric)
        eta = *obs.embedded_metric;
    else
        detail::config_fail("no metric given for observable '" + obs.label + "'");
    return check_pseudo_hermitian(obs.matrix, make_metric(eta));
}

struct ResolvedState {
    QuantumState state;
    std::optional<double> theta1;
    std::optional<double> theta2;
};

inline ResolvedState resolve_state(const io::json& ref, const PHMetric& metric, Normalization mode)
{
    io::json j = ref;
    if (j.is_string())
        j = detail::load_json_file(j.get<std::string>());
    if (j.is_object() && j.contains("theta1") && j.contains("theta2")) {
        if (!j["theta1"].is_number() || !j["theta2"].is_number())
            detail::config_fail("theta1/theta2 must be numbers (radians)");
        const double t1 = j["theta1"].get<double>(), t2 = j["theta2"].get<double>();
        return {state_from_pure(theta_state(t1, t2), metric, mode), t1, t2};
    }
    if (j.is_object() && j.contains("vector"))
        return {state_from_pure(io::vector_from_json(j["vector"]), metric, mode), {}, {}};
    if (j.is_object() && j.contains("density"))
        return {make_state(io::matrix_from_json(j["density"]), metric, mode), {}, {}};
    if (j.is_array() && !j.empty() && !j[0].is_array())
        return {state_from_pure(io::vector_from_json(j), metric, mode), {}, {}};
    if (j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array())
        return {make_state(io::matrix_from_json(j), metric, mode), {}, {}};
    if (j.is_array())
        return {state_from_pure(io::vector_from_json(j), metric, mode), {}, {}};
    detail::config_fail("state must be {theta1, theta2}, {vector}, {density} or an array");
}

inline ExperimentConfig config_from_json(const io::json& j)
{
    if (!j.is_object())
        detail::config_fail("config must be a JSON object");
    ExperimentConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "observable") c.observable = value;
            else if (key == "observable_b") c.observable_b = value;
            else if (key == "metric") c.metric = value;
            else if (key == "state") c.state = value;
            else if (key == "trials") c.trials = value.get<std::uint64_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "normalization") {
                const auto s = value.get<std::string>();
                if (s == "dirac") c.normalization = Normalization::Dirac;
                else if (s == "eta") c.normalization = Normalization::EtaNormalized;
                else detail::config_fail("normalization must be \"dirac\" or \"eta\"");
            } else if (key == "mode") {
                const auto s = value.get<std::string>();
                if (s == "analytic") c.mode = RunMode::Analytic;
                else if (s == "sampled") c.mode = RunMode::Sampled;
                else detail::config_fail("mode must be \"analytic\" or \"sampled\"");
            } else {
                detail::config_fail("unknown config key '" + key + "'");
            }
        }
    } catch (const io::json::exception& e) {
        detail::config_fail(std::string("bad config value: ") + e.what());
    }
    return c;
}

}  // namespace phmeas
