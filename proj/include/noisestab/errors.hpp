#pragma once

#include <stdexcept>
#include <string>

namespace noisestab {

/// Raised when a numerical procedure cannot deliver its postcondition
/// (quadrature budget exhausted, non-finite state, Newton divergence, ...).
/// Domain violations of preconditions use std::invalid_argument instead.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace noisestab
