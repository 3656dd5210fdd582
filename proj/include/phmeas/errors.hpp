#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phmeas {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    NotHermitian,
    Singular,
    NotPseudoHermitian,
    NotPositiveSemidefinite,
    ZeroVector,
    VanishingEtaNorm,
    ComplexSpectrum,
    Degenerate,
    IllConditioned,
    IndexOutOfRange,
    NotUnitVector,
    DegenerateStatistics,
    MetricMismatch,
    ConfigParse,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotPseudoHermitian: return "NotPseudoHermitian";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::VanishingEtaNorm: return "VanishingEtaNorm";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::DegenerateStatistics: return "DegenerateStatistics";
    case ErrorKind::MetricMismatch: return "MetricMismatch";
    case ErrorKind::ConfigParse: return "ConfigParse";
    }
    return "Unknown";
}

/// Domain error raised by every module. `module` names where it was raised;
/// `value` carries the offending quantity (a residual, a norm, a gap) when
/// one exists.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string module, const std::string& message,
          std::optional<double> value = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind), module_(std::move(module)), detail_(message), value_(value)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& detail() const noexcept { return detail_; }
    std::optional<double> value() const noexcept { return value_; }

  private:
    ErrorKind kind_;
    std::string module_;
    std::string detail_;
    std::optional<double> value_;
};

}  // namespace phmeas
