#pragma once

#include <cmath>

#include "selfsim/ifs.hpp"

namespace selfsim::testing {

// The two reference systems used throughout: lambda = 0.35 e^{i rad 1},
// square translations, uniform and skewed weights.
inline IfsSystem sys_a() {
    cplx lambda = std::polar(0.35, 1.0);
    return validate_system(lambda, {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}},
                           {0.25, 0.25, 0.25, 0.25});
}

inline IfsSystem sys_b() {
    cplx lambda = std::polar(0.35, 1.0);
    return validate_system(lambda, {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}, {0.4, 0.3, 0.2, 0.1});
}

}  // namespace selfsim::testing
