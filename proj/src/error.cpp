#include "hintcvx/error.hpp"

namespace hintcvx {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::GridMismatch: return "grid-mismatch";
        case ErrorKind::RankDeficient: return "rank-deficient";
        case ErrorKind::IterationLimit: return "iteration-limit";
        case ErrorKind::Diverged: return "diverged";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::MountainPassGeometry: return "mountain-pass-geometry";
        case ErrorKind::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace hintcvx
