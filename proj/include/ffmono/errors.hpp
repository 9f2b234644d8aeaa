#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ffmono {

// Two failure families: validation errors are caller mistakes (bad input,
// violated precondition), numerical errors are honest failures of a numerical
// procedure at the requested tolerance. The CLI maps them to distinct exit
// codes.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class validation_error : public error {
public:
    using error::error;
};

class numerical_error : public error {
public:
    using error::error;
};

#define FFMONO_VALIDATION_ERROR(type, code)                                  \
    struct type : validation_error {                                         \
        explicit type(const std::string& w) : validation_error(code, w) {}   \
    }

#define FFMONO_NUMERICAL_ERROR(type, code)                                   \
    struct type : numerical_error {                                          \
        explicit type(const std::string& w) : numerical_error(code, w) {}    \
    }

FFMONO_VALIDATION_ERROR(invalid_potential, "InvalidPotential");
FFMONO_VALIDATION_ERROR(invalid_config, "InvalidConfig");
FFMONO_VALIDATION_ERROR(invalid_loop, "InvalidLoop");
FFMONO_VALIDATION_ERROR(not_singular, "NotSingular");
FFMONO_VALIDATION_ERROR(not_critical, "NotCritical");
FFMONO_VALIDATION_ERROR(basis_mismatch, "BasisMismatch");
FFMONO_VALIDATION_ERROR(not_unimodular, "NotUnimodular");
FFMONO_VALIDATION_ERROR(path_invalid, "PathInvalid");

FFMONO_NUMERICAL_ERROR(chart_exit, "ChartExit");
FFMONO_NUMERICAL_ERROR(tolerance_failure, "ToleranceFailure");
FFMONO_NUMERICAL_ERROR(no_oscillation, "NoOscillation");
FFMONO_NUMERICAL_ERROR(degenerate_root, "DegenerateRoot");
FFMONO_NUMERICAL_ERROR(non_convergence, "NonConvergence");
FFMONO_NUMERICAL_ERROR(loop_too_close, "LoopTooClose");
FFMONO_NUMERICAL_ERROR(verification_failure, "VerificationFailure");
FFMONO_NUMERICAL_ERROR(inconsistent_generators, "InconsistentGenerators");
FFMONO_NUMERICAL_ERROR(branch_ambiguity, "BranchAmbiguity");
FFMONO_NUMERICAL_ERROR(non_integer_holonomy, "NonIntegerHolonomy");
FFMONO_NUMERICAL_ERROR(indeterminate_classification, "IndeterminateClassification");
FFMONO_NUMERICAL_ERROR(cutoff_too_low, "CutoffTooLow");
FFMONO_NUMERICAL_ERROR(quadrature_failure, "QuadratureFailure");
FFMONO_NUMERICAL_ERROR(cell_tracking_lost, "CellTrackingLost");

#undef FFMONO_VALIDATION_ERROR
#undef FFMONO_NUMERICAL_ERROR

}  // namespace ffmono
