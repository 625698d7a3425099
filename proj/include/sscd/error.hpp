#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sscd {

enum class ErrorKind {
    Index,
    IncompleteLabels,
    ConstantVariable,
    Grid,
    EmptyData,
    Kind,
    Param,
    Degree,
    NoLabels,
    Solve,
    Cv,
    Cycle,
    DegenerateVariable,
    Class,
    Io,
    Parse,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Index: return "IndexError";
        case ErrorKind::IncompleteLabels: return "IncompleteLabels";
        case ErrorKind::ConstantVariable: return "ConstantVariable";
        case ErrorKind::Grid: return "GridError";
        case ErrorKind::EmptyData: return "EmptyData";
        case ErrorKind::Kind: return "KindError";
        case ErrorKind::Param: return "ParamError";
        case ErrorKind::Degree: return "DegreeError";
        case ErrorKind::NoLabels: return "NoLabels";
        case ErrorKind::Solve: return "SolveError";
        case ErrorKind::Cv: return "CvError";
        case ErrorKind::Cycle: return "CycleError";
        case ErrorKind::DegenerateVariable: return "DegenerateVariable";
        case ErrorKind::Class: return "ClassError";
        case ErrorKind::Io: return "IoError";
        case ErrorKind::Parse: return "ParseError";
    }
    return "Error";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sscd
