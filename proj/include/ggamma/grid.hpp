#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/domain.hpp"
#include "ggamma/errors.hpp"

namespace ggamma {

enum class GridMode { logarithmic, linear, hybrid };

inline const char* to_string(GridMode m)
{
    switch (m) {
    case GridMode::logarithmic: return "log";
    case GridMode::linear: return "linear";
    case GridMode::hybrid: return "hybrid";
    }
    return "?";
}

inline GridMode grid_mode_from_string(const std::string& s)
{
    if (s == "log" || s == "logarithmic") return GridMode::logarithmic;
    if (s == "linear") return GridMode::linear;
    if (s == "hybrid") return GridMode::hybrid;
    throw BadCount("unknown grid mode '" + s + "'");
}

struct Grid {
    std::vector<double> points;
    GridMode mode = GridMode::logarithmic;
    double upper = 1.0;  // right end of the computational interval

    std::size_t size() const { return points.size(); }
    double front() const { return points.front(); }
    double back() const { return points.back(); }
};

inline constexpr double grid_margin = 1e-8;

// Lower end of the logarithmic span.  For infinite intervals the span also
// reaches down to 1e-8 so that the neighbourhood of 0 is resolved.
inline double grid_low(const Domain& d)
{
    const double Le = d.effective();
    return d.infinite() ? std::min(Le * grid_margin, grid_margin) : Le * grid_margin;
}

inline Grid build_grid(const Domain& d, int n, GridMode mode = GridMode::logarithmic)
{
    if (n < 8) {
        std::ostringstream os;
        os << "grid needs at least 8 points, got " << n;
        throw BadCount(os.str());
    }
    const double Le = d.effective();
    Grid g;
    g.mode = mode;
    g.upper = Le;
    g.points.resize(static_cast<std::size_t>(n));
    auto geometric = [](double lo, double hi, int count, int i) {
        return lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    };
    switch (mode) {
    case GridMode::linear:
        for (int i = 0; i < n; ++i) g.points[static_cast<std::size_t>(i)] = Le * (i + 1) / (n + 1);
        break;
    case GridMode::logarithmic: {
        const double lo = grid_low(d), hi = Le * (1 - grid_margin);
        for (int i = 0; i < n; ++i) g.points[static_cast<std::size_t>(i)] = geometric(lo, hi, n, i);
        g.points.back() = hi;
        break;
    }
    case GridMode::hybrid: {
        if (d.infinite()) return build_grid(d, n, GridMode::logarithmic);
        // geometric towards 0 on the left half, geometric towards L on the right half
        const int left = n / 2, right = n - left;
        const double lo = grid_low(d), mid = 0.5 * Le;
        for (int i = 0; i < left; ++i) g.points[static_cast<std::size_t>(i)] = geometric(lo, mid, left + 1, i);
        for (int i = 0; i < right; ++i)
            g.points[static_cast<std::size_t>(left + i)] =
                Le - geometric(mid, Le * grid_margin, right, i);
        break;
    }
    }
    return g;
}

// Inserts 2*depth points between `around` and its grid neighbours, halving the
// distance each time.
inline Grid refine(const Grid& g, double around, int depth)
{
    Grid out = g;
    const auto& p = g.points;
    auto it = std::lower_bound(p.begin(), p.end(), around);
    double left = it == p.begin() ? around * 0.5 : *(it - 1);
    auto jt = std::upper_bound(p.begin(), p.end(), around);
    double right = jt == p.end() ? 0.5 * (around + g.upper) : *jt;
    for (int k = 1; k <= depth; ++k) {
        const double f = std::ldexp(1.0, -k);
        out.points.push_back(around - (around - left) * f);
        out.points.push_back(around + (right - around) * f);
    }
    std::sort(out.points.begin(), out.points.end());
    out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
    out.points.erase(std::remove_if(out.points.begin(), out.points.end(),
                                    [&](double x) { return !(x > 0 && x < g.upper); }),
                     out.points.end());
    return out;
}

inline constexpr double default_esup_tol = 1e-6;

struct EsupOptions {
    double tol = default_esup_tol;
    int max_refine = 60;
    // Probe the one-sided limit at an open end of the window when the grid
    // maximum sits at that end.  right_end is the finite domain end (0 = off).
    bool limit_left = false;
    double right_end = 0;
};

struct EsupResult {
    double value = -infinity;
    double argmax = 0;
    double grid_value = -infinity;  // before any endpoint probing
    bool limit_used = false;
    bool limit_converged = true;
    bool diverged = false;  // the endpoint probes grow without a visible ceiling
};

namespace detail {

// Neville extrapolation of (s_i, y_i) to s = 0.
inline double neville_at_zero(const std::vector<double>& s, const std::vector<double>& y)
{
    std::vector<double> p = y;
    const std::size_t n = s.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = (s[i + m] * p[i] - s[i] * p[i + 1]) / (s[i + m] - s[i]);
    return p[0];
}

// Limit of f along t(y) as y -> infinity, from probes y0*c_j, extrapolated in 1/y.
template <class F, class Map>
void endpoint_limit(F& f, Map to_t, double y0, double y_max, double tol, EsupResult& r)
{
    static constexpr std::array<double, 11> mult = {1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32};
    std::vector<double> s, y;
    for (double c : mult) {
        const double yy = y0 * c;
        if (yy > y_max) break;
        const double t = to_t(yy);
        double v;
        try {
            v = f(t);
        } catch (const Error&) {
            break;  // probe fell outside what the integrand can resolve
        }
        if (!std::isfinite(v) || !(v > 0)) break;
        s.push_back(1 / yy);
        y.push_back(v);
    }
    if (y.size() < 3) return;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] > y[i - 1])) {
            r.value = std::max(r.value, *std::max_element(y.begin(), y.end()));
            return;
        }
    r.limit_used = true;
    const double top = y.back();
    const std::size_t n = y.size();
    const std::size_t m = std::min<std::size_t>(6, n);
    std::vector<double> s1(s.end() - static_cast<long>(m), s.end()), y1(y.end() - static_cast<long>(m), y.end());
    std::vector<double> s2(s1.begin() + 1, s1.end()), y2(y1.begin() + 1, y1.end());
    const double e1 = neville_at_zero(s1, y1), e2 = neville_at_zero(s2, y2);
    if (std::isfinite(e1) && e1 >= top && std::abs(e1 - e2) <= 10 * tol * std::abs(e1)) {
        r.value = std::max(r.value, e1);
    } else {
        r.limit_converged = false;
        r.value = std::max(r.value, top);
        // Growth like y^k or e^{εy} keeps its log-log slope; a convergent tail
        // such as c - d·y^{-1/2} loses a visible share of it at every probe.
        if (n >= 3) {
            auto slope = [&](std::size_t i) { return std::log(y[i] / y[i - 1]) / std::log(s[i - 1] / s[i]); };
            const double prev = slope(n - 2), last = slope(n - 1);
            if (last > 0.01 && last >= 0.95 * prev) {
                r.value = infinity;
                r.diverged = true;
            }
        }
    }
}

}  // namespace detail

// Grid maximum of f over the open window (a, b), followed by bracketing
// refinement around the maximiser until the relative gain drops below tol.
template <class F>
EsupResult esup_detailed(F&& f, double a, double b, const Grid& g, const EsupOptions& o = {})
{
    const auto& p = g.points;
    auto first = std::upper_bound(p.begin(), p.end(), a);
    auto last = std::lower_bound(p.begin(), p.end(), b);
    if (first >= last) {
        std::ostringstream os;
        os << "no grid point in (" << a << ", " << b << ")";
        throw EmptyWindow(os.str());
    }
    EsupResult r;
    std::size_t best = 0;
    const auto i0 = static_cast<std::size_t>(first - p.begin());
    const auto i1 = static_cast<std::size_t>(last - p.begin());
    for (std::size_t i = i0; i < i1; ++i) {
        const double v = f(p[i]);
        if (std::isnan(v)) continue;
        if (v > r.value) {
            r.value = v;
            r.argmax = p[i];
            best = i;
        }
    }
    if (r.value == -infinity) {
        r.argmax = p[i0];
        return r;
    }
    if (!std::isfinite(r.value)) return r;
    const double first_pt = p[i0];
    double lo = best > i0 ? p[best - 1] : a;
    double hi = best + 1 < i1 ? p[best + 1] : b;
    double x = r.argmax;
    auto mid = [](double u, double v) {
        if (u > 0 && v / u > 4) return std::sqrt(u * v);
        return 0.5 * (u + v);
    };
    // refinement probes that the integrand cannot resolve are simply not taken,
    // as with the endpoint probes below
    auto probe = [&f](double t) {
        try {
            return static_cast<double>(f(t));
        } catch (const Error&) {
            return -infinity;
        }
    };
    int quiet = 0;
    for (int it = 0; it < o.max_refine && quiet < 2; ++it) {
        const double m1 = lo > 0 ? mid(lo, x) : 0.5 * x;
        const double m2 = mid(x, hi);
        const double before = r.value;
        const double f1 = (m1 > a && m1 < x) ? probe(m1) : -infinity;
        const double f2 = (m2 < b && m2 > x) ? probe(m2) : -infinity;
        if (f1 > r.value && f1 >= f2) {
            hi = x;
            x = m1;
            r.value = f1;
        } else if (f2 > r.value) {
            lo = x;
            x = m2;
            r.value = f2;
        } else {
            if (m1 > a && m1 < x) lo = m1;
            if (m2 < b && m2 > x) hi = m2;
        }
        if (!std::isfinite(r.value)) break;
        quiet = (r.value - before <= o.tol * std::abs(r.value)) ? quiet + 1 : 0;
    }
    r.argmax = x;
    r.grid_value = r.value;
    if (o.limit_left && a <= 0 && x <= first_pt) {
        const double ref = std::isfinite(b) && b > 0 ? b : g.upper;
        const double y0 = std::log(ref / first_pt);
        if (y0 > 0)
            detail::endpoint_limit(f, [ref](double y) { return ref * std::exp(-y); }, y0, 230.0, o.tol, r);
    }
    const double last_pt = p[i1 - 1];
    if (o.right_end > 0 && b >= o.right_end && x >= last_pt) {
        const double L = o.right_end;
        const double y0 = std::log(L / (L - last_pt));
        const double y_max = std::log(1 / (8 * std::numeric_limits<double>::epsilon()));
        if (y0 > 0 && y0 < y_max)
            detail::endpoint_limit(f, [L](double y) { return L - L * std::exp(-y); }, y0, y_max, o.tol, r);
    }
    return r;
}

template <class F>
double esup_on(F&& f, double a, double b, const Grid& g, const EsupOptions& o = {})
{
    return esup_detailed(std::forward<F>(f), a, b, g, o).value;
}

}  // namespace ggamma
