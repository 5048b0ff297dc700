#pragma once

#include <cmath>
#include <limits>

#include "ggamma/errors.hpp"

namespace ggamma {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// (0, L) with L possibly infinite; an infinite interval is computed on (0, L_trunc).
struct Domain {
    double L = 1.0;
    double L_trunc = 1e6;

    Domain() = default;
    explicit Domain(double length, double trunc = 1e6) : L(length), L_trunc(trunc)
    {
        if (!(L > 0)) throw InadmissibleSpec("interval length must be positive");
        if (!(L_trunc > 0) || !std::isfinite(L_trunc))
            throw InadmissibleSpec("truncation length must be positive and finite");
    }
    bool infinite() const { return !std::isfinite(L); }
    double effective() const { return infinite() ? L_trunc : L; }
    Domain truncated_at(double trunc) const { return Domain(L, trunc); }
    bool operator==(const Domain&) const = default;
};

}  // namespace ggamma
