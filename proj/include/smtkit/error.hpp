#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smtkit {

// Failure codes for operations that cannot produce a result. Anything the
// pipeline can tolerate is reported as a Finding instead (see finding.hpp).
enum class ErrorCode {
    IoError,
    MalformedGrid,
    NoTablesFound,
    OrphanContinuation,
    EmptyIdShort,
    UnparseableCardinality,
    NotAnAasx,
    UnknownDialect,
    XmlMalformed,
    SyntaxError,
    InvalidModel,
    TransformFailed,
    TemplateError,
    UnsupportedKind,
    EmptySourceSet,
    UnknownFormat,
    Usage,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace smtkit
