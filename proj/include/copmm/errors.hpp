#pragma once

#include <stdexcept>

namespace copmm {

/// Violated precondition or malformed configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fewer usable responses than the recovery threshold. CLI exit code 3.
class BelowThresholdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace copmm
