#pragma once

#include <stdexcept>
#include <string>

namespace qslab {

// Raised when inputs break a documented precondition. CLI exit code 2.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an iteration fails to reach its stopping rule. CLI exit code 3.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qslab
