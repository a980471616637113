#pragma once

#include <stdexcept>
#include <string>

namespace traplab {

// Thrown when an event or step cap is exhausted before an experiment can
// finish; the CLI maps it to its resource-cap exit code.
struct cap_error : std::runtime_error {
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace traplab
