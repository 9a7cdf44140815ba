#pragma once

#include <stdexcept>
#include <string>

namespace hopflab {

// bad input; maps to exit code 2
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// solver / precondition failures inside a module; exit code 3
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hopflab
