#pragma once

#include <stdexcept>
#include <string>

namespace uiground {

// Every failure mode the library can surface. Codes map onto CLI exit
// categories: usage (2), data/schema (3), numeric (4).
enum class ErrorCode {
    NonPositiveScreenDims,
    CoordinateOutOfRange,
    GridCapacityExceeded,
    NoUniquelyNamedElement,
    NoUniqueAbsoluteReferent,
    NoUniqueRelativeReferent,
    DanglingScreenReference,
    EmptyDataset,
    EmptyCommand,
    DimensionMismatch,
    EmptyScreen,
    NonFiniteLoss,
    IoFailure,
    SchemaMismatch,
    InconsistentDimension,
    SingleClassDataset,
    WrongModelKind,
    EmptySplit,
    ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace uiground
