#include "ace/error.hpp"

namespace ace {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::NegativeInput: return "NegativeInput";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidRank: return "InvalidRank";
        case ErrorKind::RankExceeded: return "RankExceeded";
        case ErrorKind::RankTooLow: return "RankTooLow";
        case ErrorKind::InvalidK: return "InvalidK";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::BadMagic: return "BadMagic";
        case ErrorKind::TruncatedFile: return "TruncatedFile";
        case ErrorKind::RaggedCsv: return "RaggedCsv";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::NonRepresentable: return "NonRepresentable";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::DegenerateScale: return "DegenerateScale";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

}  // namespace ace
