#pragma once

#include <stdexcept>
#include <string>

namespace ggamma {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GGAMMA_ERROR(Name)                      \
    class Name : public Error {                 \
    public:                                     \
        explicit Name(const std::string& what)  \
            : Error(#Name ": " + what) {}       \
    }

GGAMMA_ERROR(InadmissibleSpec);
GGAMMA_ERROR(QuadratureFailure);
GGAMMA_ERROR(NonFiniteIntegrand);
GGAMMA_ERROR(BadCount);
GGAMMA_ERROR(EmptyWindow);
GGAMMA_ERROR(NotQuasiconcave);
GGAMMA_ERROR(DegenerateRatio);
GGAMMA_ERROR(ClassificationFailure);
GGAMMA_ERROR(OutOfScope);
GGAMMA_ERROR(NonFinitePhi);
GGAMMA_ERROR(ExponentDegenerate);
GGAMMA_ERROR(NonFinite);
GGAMMA_ERROR(NonPositive);
GGAMMA_ERROR(WrongMonotonicity);
GGAMMA_ERROR(EmptyCovering);
GGAMMA_ERROR(NotMonotone);
GGAMMA_ERROR(ConfigError);
GGAMMA_ERROR(EmptyBatch);
GGAMMA_ERROR(IoError);

#undef GGAMMA_ERROR

}  // namespace ggamma
