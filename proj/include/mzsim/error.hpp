#pragma once

#include <stdexcept>
#include <string>

namespace mzsim {

enum class ErrorCode {
    InvalidInput,
    LevelMismatch,
    UnknownVariant,
    MissingField,
    NonConvergence,
    SingularJacobian,
    SingularSystem,
    NoFloorSurface,
    RankDeficient,
    UnfittedMap,
    WeatherGap,
    Schema,
    Semantic,
    MissingSeries,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mzsim
