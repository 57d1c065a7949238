#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define BERGMAN_ERROR(Name)            \
    class Name : public Error {        \
    public:                            \
        using Error::Error;            \
    };

BERGMAN_ERROR(InvalidArgument)
BERGMAN_ERROR(DomainError)
BERGMAN_ERROR(BranchCutError)
BERGMAN_ERROR(DimensionError)
BERGMAN_ERROR(UnsupportedOrderError)
BERGMAN_ERROR(SingularEvaluationError)
BERGMAN_ERROR(OverflowError)
BERGMAN_ERROR(SamplingError)
BERGMAN_ERROR(IntegrationError)
BERGMAN_ERROR(ConvergenceError)
BERGMAN_ERROR(ParseError)
BERGMAN_ERROR(NoClosedFormError)
BERGMAN_ERROR(BoundaryError)

#undef BERGMAN_ERROR

} // namespace bergman
