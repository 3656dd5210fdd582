#pragma once

// JSON matrices (nested arrays of [re, im] pairs) and CSV number rendering.

#include <charconv>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "core.hpp"

namespace phmeas::io {

using json = nlohmann::json;

// Entries are [re, im] pairs; adding 0.0 turns -0 into +0.
inline json to_json(const ComplexMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real() + 0.0, m(i, j).imag() + 0.0});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const ComplexVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back({v(i).real() + 0.0, v(i).imag() + 0.0});
    return out;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what)
{
    throw Error(ErrorKind::ConfigParse, "cli", what);
}

// Accepts [re, im] or a bare real number.
inline complex entry(const json& e)
{
    if (e.is_number())
        return e.get<double>();
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    parse_fail("matrix entry must be [re, im] or a number, got " + e.dump());
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty())
        detail::parse_fail("matrix must be a non-empty array of rows");
    const auto rows = Eigen::Index(j.size());
    if (!j[0].is_array() || j[0].empty())
        detail::parse_fail("matrix rows must be non-empty arrays");
    const auto cols = Eigen::Index(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[std::size_t(i)];
        if (!row.is_array() || Eigen::Index(row.size()) != cols)
            detail::parse_fail("matrix rows must all have the same length");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = detail::entry(row[std::size_t(c)]);
    }
    return m;
}

inline ComplexVector vector_from_json(const json& j)
{
    if (!j.is_array() || j.empty())
        detail::parse_fail("vector must be a non-empty array");
    ComplexVector v(Eigen::Index(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(Eigen::Index(i)) = detail::entry(j[i]);
    return v;
}

/// Shortest decimal that round-trips to the same double.
inline std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (x == 0.0)
        x = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// A table cell as JSON: integers and finite decimals become numbers,
/// anything else (labels, "inf", "nan") stays a string.
inline json cell(const std::string& s)
{
    const char* first = s.data();
    const char* last = first + s.size();
    long long i = 0;
    if (auto r = std::from_chars(first, last, i); r.ec == std::errc{} && r.ptr == last)
        return i;
    double d = 0.0;
    if (auto r = std::from_chars(first, last, d); r.ec == std::errc{} && r.ptr == last && std::isfinite(d))
        return d;
    return s;
}

}  // namespace phmeas::io
