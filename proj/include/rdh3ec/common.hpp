// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rdh3ec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File and stream problems: short files, unreadable paths, bad magic.
struct IoError : Error {
    using Error::Error;
};

// Rejected configuration or arguments (bad dimensions, out-of-range qp, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Payload does not fit the host stream. Carries the largest repetition
// factor that would have fit.
struct CapacityError : Error {
    int max_alpha;
    CapacityError(const std::string& msg, int feasible_alpha)
        : Error(msg), max_alpha(feasible_alpha) {}
};

// Marked data is not something the embedder can produce: corruption or a
// mismatched stream.
struct IntegrityError : Error {
    using Error::Error;
};

} // namespace rdh3ec
