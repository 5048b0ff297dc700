#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ggamma/parallel.hpp"

namespace ggamma {

struct AscentOptions {
    int max_sweeps = 400;
    double min_gain = 1e-10;  // relative improvement per sweep below which we stop
};

struct AscentResult {
    double value = 0;
    std::vector<double> x;
};

// Multiplicative coordinate ascent for positively homogeneous objectives.
// Non-finite objective values count as no improvement.
inline AscentResult coordinate_ascent(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> x, const AscentOptions& o = {})
{
    static constexpr std::array<double, 4> factors = {2.0, 0.5, 1.1, 1 / 1.1};
    double best = f(x);
    if (!std::isfinite(best)) best = 0;
    for (int sweep = 0; sweep < o.max_sweeps; ++sweep) {
        const double before = best;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double m : factors) {
                const double old = x[i];
                x[i] = old * m;
                const double v = f(x);
                if (std::isfinite(v) && v > best)
                    best = v;
                else
                    x[i] = old;
            }
        }
        if (!(best > before * (1 + o.min_gain))) break;
    }
    return {best, std::move(x)};
}

// Random positive start with log-uniform entries over six decades.
inline std::vector<double> log_uniform_start(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3 * std::log(10.0), 3 * std::log(10.0));
    std::vector<double> x(n);
    for (auto& v : x) v = std::exp(u(rng));
    return x;
}

struct MultistartOptions {
    int restarts = 32;
    std::uint64_t seed = 1;
    AscentOptions ascent;
    unsigned jobs = 1;
};

// Best of coordinate ascent runs from the given fixed starts followed by
// `restarts` random ones seeded seed, seed+1, ...
inline AscentResult multistart(const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
                               const std::vector<std::vector<double>>& fixed, const MultistartOptions& o)
{
    const std::size_t total = fixed.size() + static_cast<std::size_t>(std::max(o.restarts, 0));
    auto runs = parallel_map(total, o.jobs, [&](std::size_t i) {
        auto x0 = i < fixed.size() ? fixed[i] : log_uniform_start(dim, o.seed + (i - fixed.size()));
        return coordinate_ascent(f, std::move(x0), o.ascent);
    });
    AscentResult best;
    for (auto& r : runs)
        if (r.value > best.value || best.x.empty()) best = std::move(r);
    return best;
}

}  // namespace ggamma
