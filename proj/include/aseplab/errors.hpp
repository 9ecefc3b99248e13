#pragma once

#include <stdexcept>
#include <string>

namespace aseplab {

// Caller violated a documented precondition. CLI maps this to exit code 1.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its tolerance. Exit code 2.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace aseplab
