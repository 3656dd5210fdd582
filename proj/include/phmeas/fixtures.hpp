#pragma once

// Named 3x3 fixtures: two observable pairs and their metrics.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace phmeas::fixtures {

inline ComplexMatrix real3(std::initializer_list<double> rowmajor)
{
    ComplexMatrix m(3, 3);
    auto it = rowmajor.begin();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = *it++;
    return m;
}

inline ComplexMatrix eta_pos() { return real3({1, 0, 0, 0, 1, 0, 0, 0, 0.6}); }
inline ComplexMatrix eta_indef() { return real3({1, 0, 0, 0, 1, 0, 0, 0, -1}); }
inline ComplexMatrix identity() { return ComplexMatrix::Identity(3, 3); }

// PH under eta_pos
inline ComplexMatrix eq5_a() { return real3({0, 0.3, 1.2, 0.3, 0, 0, 2, 0, 0}); }
inline ComplexMatrix eq5_b() { return real3({0, 2, -0.6, 2, 0, 0, -1, 0, 0}); }

// PH under eta_indef
inline ComplexMatrix eq6_a() { return real3({0, 2, -1, 2, 0, 0, 1, 0, 0}); }
inline ComplexMatrix eq6_b() { return real3({0, 4, -3, 4, 0, 0, 3, 0, 0}); }

inline const std::vector<std::string>& observable_names()
{
    static const std::vector<std::string> names{"eq5.A", "eq5.B", "eq6.A", "eq6.B"};
    return names;
}

inline const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names{"eta_pos", "eta_indef", "identity"};
    return names;
}

inline std::optional<ComplexMatrix> observable(std::string_view name)
{
    if (name == "eq5.A") return eq5_a();
    if (name == "eq5.B") return eq5_b();
    if (name == "eq6.A") return eq6_a();
    if (name == "eq6.B") return eq6_b();
    return std::nullopt;
}

inline std::optional<ComplexMatrix> metric(std::string_view name)
{
    if (name == "eta_pos") return eta_pos();
    if (name == "eta_indef") return eta_indef();
    if (name == "identity") return identity();
    return std::nullopt;
}

/// Metric each observable fixture is defined under.
inline std::string_view default_metric_for(std::string_view observable_name)
{
    return observable_name.starts_with("eq6") ? "eta_indef" : "eta_pos";
}

}  // namespace phmeas::fixtures
