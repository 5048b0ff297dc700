#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ggamma/errors.hpp"

namespace ggamma {

// Nonnegative step function: value values[j] on [edges[j], edges[j+1]), zero
// outside [edges.front(), edges.back()).
struct TestFunction {
    std::vector<double> edges;
    std::vector<double> values;

    bool operator==(const TestFunction&) const = default;

    void validate() const
    {
        if (edges.size() != values.size() + 1 || values.empty())
            throw InadmissibleSpec("step function needs one more edge than values");
        for (std::size_t j = 0; j + 1 < edges.size(); ++j)
            if (!(edges[j + 1] > edges[j]) || !(edges[j] >= 0)) throw InadmissibleSpec("step edges must increase");
        for (double v : values)
            if (!(v >= 0) || !std::isfinite(v)) throw InadmissibleSpec("step values must be finite and nonnegative");
    }

    double operator()(double t) const
    {
        if (t < edges.front() || t >= edges.back()) return 0;
        const auto j = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), t) - edges.begin()) - 1;
        return values[j];
    }

    // ∫_t^∞ h, exact
    double tail(double t) const
    {
        double s = 0;
        for (std::size_t j = values.size(); j-- > 0;) {
            const double lo = edges[j], hi = edges[j + 1];
            if (hi <= t) break;
            s += values[j] * (hi - std::max(lo, t));
        }
        return s;
    }

    TestFunction scaled(double c) const
    {
        TestFunction h = *this;
        for (auto& v : h.values) v *= c;
        return h;
    }

    bool is_zero() const
    {
        return std::all_of(values.begin(), values.end(), [](double v) { return v == 0; });
    }
};

inline TestFunction indicator(double a, double b) { return {{a, b}, {1.0}}; }

}  // namespace ggamma
