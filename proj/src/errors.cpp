#include "pairtrade/errors.hpp"

namespace pairtrade {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::BadFactor: return "BadFactor";
        case Errc::UnsortedInput: return "UnsortedInput";
        case Errc::EmptyIntersection: return "EmptyIntersection";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::WindowTooShort: return "WindowTooShort";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::IoError: return "IoError";
        case Errc::CheckpointFormat: return "CheckpointFormat";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::SingularDesign: return "SingularDesign";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::DegenerateResiduals: return "DegenerateResiduals";
        case Errc::NoValidWindow: return "NoValidWindow";
        case Errc::DegenerateSpread: return "DegenerateSpread";
        case Errc::NotWarm: return "NotWarm";
        case Errc::BankruptPortfolio: return "BankruptPortfolio";
        case Errc::NonFiniteParams: return "NonFiniteParams";
        case Errc::DivergedTraining: return "DivergedTraining";
        case Errc::NonPositiveStart: return "NonPositiveStart";
        case Errc::NoSuccessfulPoint: return "NoSuccessfulPoint";
        case Errc::DegenerateSpan: return "DegenerateSpan";
        case Errc::ZeroVolatility: return "ZeroVolatility";
        case Errc::TargetOutOfRange: return "TargetOutOfRange";
        case Errc::EpisodeFinished: return "EpisodeFinished";
        case Errc::ProtocolError: return "ProtocolError";
        case Errc::EmptyGrid: return "EmptyGrid";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ConfigError: return "ConfigError";
        case Errc::StaleArtifact: return "StaleArtifact";
    }
    return "Unknown";
}

ErrorCategory category_of(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRow:
        case Errc::DuplicateTimestamp:
        case Errc::InvariantViolation:
        case Errc::BadFactor:
        case Errc::UnsortedInput:
        case Errc::EmptyIntersection:
        case Errc::SeriesTooShort:
        case Errc::WindowTooShort:
        case Errc::LengthMismatch:
        case Errc::IoError:
        case Errc::CheckpointFormat:
            return ErrorCategory::Data;
        case Errc::ZeroVariance:
        case Errc::SingularDesign:
        case Errc::InsufficientData:
        case Errc::DegenerateResiduals:
        case Errc::NoValidWindow:
        case Errc::DegenerateSpread:
        case Errc::NotWarm:
        case Errc::BankruptPortfolio:
        case Errc::NonFiniteParams:
        case Errc::DivergedTraining:
        case Errc::NonPositiveStart:
        case Errc::NoSuccessfulPoint:
        case Errc::DegenerateSpan:
        case Errc::ZeroVolatility:
            return ErrorCategory::Numeric;
        default:
            return ErrorCategory::Config;
    }
}

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), line_(line) {}

}  // namespace pairtrade
