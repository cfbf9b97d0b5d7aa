#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace owb {

/// Stable, machine-readable failure categories. The CLI maps these to exit
/// codes and prints error_code_name() in its diagnostics.
enum class ErrorCode {
    invalid_argument,
    parse_error,
    duplicate_key,
    inconsistent_cluster,
    empty_petal,
    no_data_anywhere,
    non_positive_variance,
    invariant_failure,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// A petal with no finite observation anywhere in the panel.
class EmptyPetal : public Error {
public:
    explicit EmptyPetal(std::size_t petal)
        : Error(ErrorCode::empty_petal,
                "petal " + std::to_string(petal) + " has no finite observation"),
          petal_(petal) {}

    std::size_t petal() const noexcept { return petal_; }

private:
    std::size_t petal_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
        case ErrorCode::parse_error: return "PARSE_ERROR";
        case ErrorCode::duplicate_key: return "DUPLICATE_KEY";
        case ErrorCode::inconsistent_cluster: return "INCONSISTENT_CLUSTER";
        case ErrorCode::empty_petal: return "EMPTY_PETAL";
        case ErrorCode::no_data_anywhere: return "NO_DATA_ANYWHERE";
        case ErrorCode::non_positive_variance: return "NON_POSITIVE_VARIANCE";
        case ErrorCode::invariant_failure: return "INVARIANT_FAILURE";
    }
    return "UNKNOWN";
}

}  // namespace owb
