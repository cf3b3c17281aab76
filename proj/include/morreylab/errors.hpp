#pragma once
#include <stdexcept>
#include <string>

namespace morreylab {

// Every library failure derives from Error so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MORREYLAB_ERROR(Name)                                                  \
    struct Name : Error {                                                      \
        using Error::Error;                                                    \
    }

MORREYLAB_ERROR(OrderingViolation);
MORREYLAB_ERROR(AlphaRangeViolation);
MORREYLAB_ERROR(IntegerLambdaGamma);
MORREYLAB_ERROR(ConfigError);
MORREYLAB_ERROR(DomainError);
MORREYLAB_ERROR(CapacityError);
MORREYLAB_ERROR(NonIntegerLambda);
MORREYLAB_ERROR(IntegerLambda);
MORREYLAB_ERROR(DegenerateProfile);
MORREYLAB_ERROR(NegativeFieldError);
MORREYLAB_ERROR(NonIntegrableHint);
MORREYLAB_ERROR(BudgetExceeded);
MORREYLAB_ERROR(TailDivergence);
MORREYLAB_ERROR(DimensionError);
MORREYLAB_ERROR(EmptySupport);
MORREYLAB_ERROR(ZeroDenominator);
MORREYLAB_ERROR(NotMonotone);
MORREYLAB_ERROR(UnknownField);
MORREYLAB_ERROR(UnknownScenario);

#undef MORREYLAB_ERROR

} // namespace morreylab
