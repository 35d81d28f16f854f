#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cogalign {

enum class ErrorCode {
    // numeric kernel
    LengthMismatch,
    ConstantInput,
    InsufficientData,
    BothConstantEqual,
    NotSymmetric,
    NotSquare,
    InvalidDf,
    NotPSD,
    // scale / scoring
    UnparseableResponse,
    NoKeyedItems,
    // ingestion and persistence
    ParseError,
    SchemaViolation,
    UnknownItemColumn,
    EmptyMatrix,
    DuplicateCell,
    IoError,
    UnsupportedFormat,
    // psychometrics
    ZeroTotalVariance,
    TooFewItems,
    TooFewRespondents,
    DegenerateCorrelationMatrix,
    TooManyFactors,
    NonPositiveDefiniteS,
    NotConverged,
    UnidentifiedModel,
    InvalidDistanceMatrix,
    NoOverlap,
    // rsa / sna
    TooFewObservations,
    AllConstant,
    LabelMismatch,
    InsufficientCells,
    MissingDimension,
    NoDefinedEdges,
    // llm administration
    EndpointUnreachable,
    AuthFailure,
    // intervention
    ScaleMismatch,
    TooFewRuns,
    ItemSetMismatch,
    // synthgen
    SpecScaleMismatch,
    // pipeline / cli
    ConfigError,
    UsageError,
};

std::string_view to_string(ErrorCode code);

/// How a failure maps onto the CLI exit code contract.
enum class ErrorCategory { Usage, Data, Endpoint };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace cogalign
