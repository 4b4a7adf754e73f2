#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace touchloc {

enum class ErrorKind {
    InvalidAction,
    EmptySurface,
    EmptyInput,
    InconsistentObservation,
    NoFeasiblePose,
    StartInCollision,
    AmbiguousGoal,
    DeadEnd,
    NoInformativeAction,
    MismatchedScenarioSets,
    InvalidScenario,
    Io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidAction: return "InvalidAction";
        case ErrorKind::EmptySurface: return "EmptySurface";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::InconsistentObservation: return "InconsistentObservation";
        case ErrorKind::NoFeasiblePose: return "NoFeasiblePose";
        case ErrorKind::StartInCollision: return "StartInCollision";
        case ErrorKind::AmbiguousGoal: return "AmbiguousGoal";
        case ErrorKind::DeadEnd: return "DeadEnd";
        case ErrorKind::NoInformativeAction: return "NoInformativeAction";
        case ErrorKind::MismatchedScenarioSets: return "MismatchedScenarioSets";
        case ErrorKind::InvalidScenario: return "InvalidScenario";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace touchloc
