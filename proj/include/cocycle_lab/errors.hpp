#pragma once

// Error taxonomy shared by all modules. The CLI maps these onto exit codes.

#include <stdexcept>
#include <string>

namespace cocycle_lab {

// Input outside an operation's domain (bad CF coefficient, h > radius, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// The requested quantity cannot be resolved inside the precision budget.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// KAM smallness gate violated before a step.
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A rotation-number lower bound needed by the rotation-backward step fails.
struct CertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation was called with data violating its own precondition.
struct MisuseError : std::logic_error {
    using std::logic_error::logic_error;
};

// Numerical pipeline failed in a way that should not happen for valid input.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A slack-adjusted bound check failed and the caller asked for strict mode.
struct BoundViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cocycle_lab
