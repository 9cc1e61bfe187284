#pragma once

#include <stdexcept>
#include <string>

namespace eitnoise {

// Numeric values are mirrored by eitn_status in the public C header.
enum class ErrorCode {
    InvalidArgument = 1,
    Config = 2,
    NoSteadyState = 3,
    NonStationary = 4,
    GainMedium = 5,
    UndampedResonance = 6,
    NotPositiveSemidefinite = 7,
    Unstable = 8,
    GuardViolated = 9,
    UnknownPair = 10,
    ProvenanceMismatch = 11,
    Io = 12,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace eitnoise
