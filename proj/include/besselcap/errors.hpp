#pragma once

#include <stdexcept>
#include <string>

namespace besselcap {

/// Kernel-form translation is undefined when some x_i * t_i = 0; callers are
/// expected to fall back to the theta form (or the exact degenerate shortcut).
struct DegenerateKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Primal capacity discretization cannot see the sample set.
struct RefineGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prescribed-gauge Cantor construction failed to bracket a level.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace besselcap
