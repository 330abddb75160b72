#pragma once

#include <stdexcept>
#include <string>

namespace hardylab {

enum class ErrorKind {
    InvalidArgument,
    BudgetExceeded,
    EmptyWindow,
    SubResolutionScale,
    ZeroTestFunction,
    NotACover,
    SubResolutionWitness,
    MixedDomain,
    MissingEstimate,
    PositiveMeasure,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace hardylab
