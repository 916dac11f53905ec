#pragma once

#include <stdexcept>

namespace cfs {

// Degenerate or malformed input data (maps to CLI exit code 2).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver failed to reach its required accuracy (maps to CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cfs
