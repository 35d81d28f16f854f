#include "cogalign/errors.hpp"

namespace cogalign {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::BothConstantEqual: return "BothConstantEqual";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::InvalidDf: return "InvalidDf";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::UnparseableResponse: return "UnparseableResponse";
        case ErrorCode::NoKeyedItems: return "NoKeyedItems";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::UnknownItemColumn: return "UnknownItemColumn";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::DuplicateCell: return "DuplicateCell";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::ZeroTotalVariance: return "ZeroTotalVariance";
        case ErrorCode::TooFewItems: return "TooFewItems";
        case ErrorCode::TooFewRespondents: return "TooFewRespondents";
        case ErrorCode::DegenerateCorrelationMatrix: return "DegenerateCorrelationMatrix";
        case ErrorCode::TooManyFactors: return "TooManyFactors";
        case ErrorCode::NonPositiveDefiniteS: return "NonPositiveDefiniteS";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::UnidentifiedModel: return "UnidentifiedModel";
        case ErrorCode::InvalidDistanceMatrix: return "InvalidDistanceMatrix";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::AllConstant: return "AllConstant";
        case ErrorCode::LabelMismatch: return "LabelMismatch";
        case ErrorCode::InsufficientCells: return "InsufficientCells";
        case ErrorCode::MissingDimension: return "MissingDimension";
        case ErrorCode::NoDefinedEdges: return "NoDefinedEdges";
        case ErrorCode::EndpointUnreachable: return "EndpointUnreachable";
        case ErrorCode::AuthFailure: return "AuthFailure";
        case ErrorCode::ScaleMismatch: return "ScaleMismatch";
        case ErrorCode::TooFewRuns: return "TooFewRuns";
        case ErrorCode::ItemSetMismatch: return "ItemSetMismatch";
        case ErrorCode::SpecScaleMismatch: return "SpecScaleMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::UsageError:
            return ErrorCategory::Usage;
        case ErrorCode::EndpointUnreachable:
        case ErrorCode::AuthFailure:
            return ErrorCategory::Endpoint;
        default:
            return ErrorCategory::Data;
    }
}

}  // namespace cogalign
