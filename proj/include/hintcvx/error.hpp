#pragma once

#include <stdexcept>
#include <string>

namespace hintcvx {

enum class ErrorKind {
    InvalidArgument,  // parameter out of range, malformed config
    GridMismatch,     // functions/operators living on different grids
    RankDeficient,    // singular operator handed to a solver
    IterationLimit,   // CG or outer loop ran out of iterations
    Diverged,         // non-finite energy or gradient
    Precondition,     // e.g. certificate requested for u outside K
    MountainPassGeometry,
    Internal
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hintcvx
