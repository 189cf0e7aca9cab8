#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gliofuse {

enum class ErrorCode {
    TruncatedFile,
    BadMagic,
    BadHeader,
    UnsupportedDatatype,
    DimOverflow,
    NonFiniteValue,
    EmptyVolume,
    EmptySlice,
    DimMismatch,
    WrongArity,
    EmptyRoi,
    EmptyMask,
    TooFewRows,
    KTooLarge,
    DegenerateLabels,
    WidthMismatch,
    ClassTooSmall,
    LengthMismatch,
    OneClassOnly,
    ZeroVariance,
    TooFew,
    SchemaMismatch,
    MissingInput,
    InvalidConfig,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::DimOverflow: return "DimOverflow";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyVolume: return "EmptyVolume";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class; the message carries context.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by derive_rois when a region has no voxels; `roi()` is 1, 2 or 3.
class EmptyRoiError : public Error {
public:
    explicit EmptyRoiError(int roi)
        : Error(ErrorCode::EmptyRoi, "ROI" + std::to_string(roi) + " has no voxels"), roi_(roi)
    {
    }

    [[nodiscard]] int roi() const noexcept { return roi_; }

private:
    int roi_;
};

} // namespace gliofuse
