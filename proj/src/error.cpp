#include "hysid/error.hpp"

namespace hysid {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonUniformGrid: return "NonUniformGrid";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::InvalidExcitation: return "InvalidExcitation";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::DivergedSimulation: return "DivergedSimulation";
        case ErrorCode::MissingAux: return "MissingAux";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::MissingAuxModel: return "MissingAuxModel";
        case ErrorCode::ZeroReference: return "ZeroReference";
        case ErrorCode::ConstantReference: return "ConstantReference";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
    }
    return "Unknown";
}

namespace {
std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> index) {
    std::string out(to_string(code));
    out += ": ";
    out += message;
    if (index) {
        out += " (index ";
        out += std::to_string(*index);
        out += ")";
    }
    return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(compose(code, message, index)), code_(code), index_(index) {}

}  // namespace hysid
