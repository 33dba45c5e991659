#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hysid {

enum class ErrorCode {
    NonUniformGrid,
    TooShort,
    NonFinite,
    InvalidExcitation,
    InvalidParameter,
    DivergedSimulation,
    MissingAux,
    LengthMismatch,
    ShapeMismatch,
    MissingAuxModel,
    ZeroReference,
    ConstantReference,
    ParseError,
    FileNotFound,
    IoError,
    UnknownPreset,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. `index()` carries the offending
/// sample (or row) when the failure is tied to one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> index = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace hysid
