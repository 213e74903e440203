#pragma once

#include <stdexcept>
#include <string>

namespace fracsource {

// Stable process exit codes, one per error class. The CLI maps a caught
// exception to the code of its class; 0 is success, 1 is reserved for
// unexpected failures.
enum class ErrorCode : int {
    ok = 0,
    unexpected = 1,
    parse = 2,
    validation = 3,
    order_mismatch = 4,
    zero_finding = 5,
    quadrature = 6,
    non_convergent = 7,
    io = 8,
    singular_system = 9,
    ill_conditioned = 10,
    selection_failed = 11,
    singular_intensity = 12,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

#define FRACSOURCE_DEFINE_ERROR(NAME, CODE)                                   \
    class NAME : public Error {                                               \
    public:                                                                   \
        explicit NAME(const std::string& what) : Error(ErrorCode::CODE, what) {} \
    }

FRACSOURCE_DEFINE_ERROR(ParseError, parse);
FRACSOURCE_DEFINE_ERROR(ValidationError, validation);
FRACSOURCE_DEFINE_ERROR(OrderMismatch, order_mismatch);
FRACSOURCE_DEFINE_ERROR(ZeroFindingFailed, zero_finding);
FRACSOURCE_DEFINE_ERROR(QuadratureFailure, quadrature);
FRACSOURCE_DEFINE_ERROR(NonConvergent, non_convergent);
FRACSOURCE_DEFINE_ERROR(IOError, io);
FRACSOURCE_DEFINE_ERROR(SingularSystem, singular_system);
FRACSOURCE_DEFINE_ERROR(IllConditioned, ill_conditioned);
FRACSOURCE_DEFINE_ERROR(SelectionFailed, selection_failed);
FRACSOURCE_DEFINE_ERROR(SingularIntensity, singular_intensity);

#undef FRACSOURCE_DEFINE_ERROR

} // namespace fracsource
