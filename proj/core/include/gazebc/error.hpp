#pragma once

#include <stdexcept>

namespace gazebc {

// Exit-code mapping used by the CLI: ValidationError -> 1, ComputeError -> 2,
// IoError -> 3.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gazebc
