#pragma once

#include <stdexcept>
#include <string>

namespace fdeval {

/// Error codes used across the library. Every failure mode that callers can
/// react to programmatically has its own code; the message carries context
/// (field names, row numbers, paths).
enum class ErrorCode {
    // datamodel
    DimMismatch,
    ModeMismatch,
    ClassSetMismatch,
    BadValue,
    // segmetrics
    BadTolerance,
    // aggregation
    BadWidth,
    BadPatch,
    EmptyMap,
    // learners
    TooFewRows,
    TooFewSamples,
    NonfiniteInput,
    SchemaMismatch,
    SingularAfterRidge,
    // rcanalysis
    LengthMismatch,
    EmptyInput,
    RiskOutOfRange,
    NormalizationDegenerate,
    // stats
    ConstantInput,
    SingleClass,
    MisalignedCases,
    EmptyFold,
    // io
    BadMagic,
    UnsupportedDtype,
    FortranOrderUnsupported,
    ValueOutOfRange,
    MissingColumn,
    DuplicateCase,
    UnresolvedPath,
    BadConfig,
    IoError,
};

const char* error_code_name(ErrorCode code);

class EvalError : public std::runtime_error {
public:
    EvalError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fdeval
