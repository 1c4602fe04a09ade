#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ace {

enum class ErrorKind {
    // construction and argument guards
    InvalidArgument,
    NonFiniteValue,
    NegativeInput,
    DimensionMismatch,
    // rank / size guards
    InvalidRank,
    RankExceeded,
    RankTooLow,
    InvalidK,
    DimensionTooLarge,
    TooLarge,
    // data-dependent failures
    DegenerateInput,
    ZeroVector,
    InvalidSpec,
    // file formats
    BadMagic,
    TruncatedFile,
    RaggedCsv,
    ParseError,
    NonRepresentable,
    IoFailure,
    // numerical failures
    DegenerateScale,
    SingularSystem,
    NumericalFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception type raised by every module. The kind is stable and is what the
/// CLI maps onto exit codes; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace ace
