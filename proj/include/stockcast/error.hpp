#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stockcast {

enum class ErrorKind {
    Schema,            ///< missing or malformed column mapping
    Row,               ///< unparseable input row
    Validation,        ///< domain invariant violated by input data
    Parameter,         ///< caller supplied an invalid argument
    InsufficientData,  ///< not enough observations for the operation
    Range,             ///< a value falls outside the admissible range
    Shape,             ///< mismatched lengths or widths
    Numeric,           ///< singular system or non-finite intermediate
    FitFailure,        ///< no admissible model could be estimated
    Label,             ///< classification labels unusable
    UndefinedMetric,   ///< metric is mathematically undefined for the input
    Config,            ///< invalid run configuration
    Data,              ///< inconsistent data across inputs
    Io,                ///< filesystem failure
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; the kind lets callers branch
/// without a class per failure mode.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace stockcast
