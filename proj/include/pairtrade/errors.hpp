// errors.hpp
// Error type shared by every pairtrade module.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pairtrade {

enum class Errc {
    // data
    MalformedRow,
    DuplicateTimestamp,
    InvariantViolation,
    BadFactor,
    UnsortedInput,
    EmptyIntersection,
    SeriesTooShort,
    WindowTooShort,
    LengthMismatch,
    IoError,
    CheckpointFormat,
    // numeric
    ZeroVariance,
    SingularDesign,
    InsufficientData,
    DegenerateResiduals,
    NoValidWindow,
    DegenerateSpread,
    NotWarm,
    BankruptPortfolio,
    NonFiniteParams,
    DivergedTraining,
    NonPositiveStart,
    NoSuccessfulPoint,
    DegenerateSpan,
    ZeroVolatility,
    // usage / configuration
    TargetOutOfRange,
    EpisodeFinished,
    ProtocolError,
    EmptyGrid,
    InvalidArgument,
    ConfigError,
    StaleArtifact,
};

enum class ErrorCategory { Config, Data, Numeric };

std::string_view to_string(Errc code) noexcept;
ErrorCategory category_of(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> line = std::nullopt);

    Errc code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }
    // 1-based input line for parse errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

}  // namespace pairtrade
