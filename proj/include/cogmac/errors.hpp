#pragma once

#include <stdexcept>
#include <string>

namespace cogmac {

// Invalid inputs, configs or preconditions. CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: quadrature non-convergence, iteration caps. Exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cogmac
