#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/errors.hpp"
#include "ggamma/grid.hpp"

namespace ggamma {

using RealFn = std::function<double(double)>;

inline constexpr double default_mono_tol = 1e-9;
inline constexpr double default_covering_a = 109;

struct Violation {
    double t = 0;
    std::string what;
};

struct QuasiconcavityReport {
    bool ok = true;
    std::vector<Violation> violations;
};

// h nondecreasing and h/rho nonincreasing on consecutive grid points.
inline QuasiconcavityReport is_quasiconcave(const RealFn& h, const RealFn& rho, const Grid& grid,
                                            double tol = default_mono_tol)
{
    QuasiconcavityReport rep;
    const auto& x = grid.points;
    double hp = 0, qp = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hv = h(x[i]), rv = rho(x[i]);
        if (!(hv > 0) || !(rv > 0) || !std::isfinite(hv) || !std::isfinite(rv)) {
            rep.ok = false;
            rep.violations.push_back({x[i], "h or rho not positive and finite"});
            continue;
        }
        const double qv = hv / rv;
        if (i > 0) {
            if (hv < hp * (1 - tol)) {
                rep.ok = false;
                rep.violations.push_back({x[i], "h decreases"});
            }
            if (qv > qp * (1 + tol)) {
                rep.ok = false;
                rep.violations.push_back({x[i], "h/rho increases"});
            }
        }
        hp = hv;
        qp = qv;
    }
    return rep;
}

// Points x_N < ... < x_M, stored from index N.  x_N = 0 unless the left end is
// a truncated infinite one; x_M is the interval end unless truncated on the right.
struct CoveringSequence {
    std::vector<double> points;
    int N = 0;
    double a = default_covering_a;
    bool left_truncated = false;   // N = -inf, cut at the grid minimum
    bool right_truncated = false;  // M = +inf, cut at the grid maximum
    double end = 1;                // the interval end L (effective)
    std::vector<int> z1, z2;

    int M() const { return N + static_cast<int>(points.size()) - 1; }
    double x(int k) const { return points.at(static_cast<std::size_t>(k - N)); }
    bool in_z1(int k) const { return std::find(z1.begin(), z1.end(), k) != z1.end(); }
    bool operator==(const CoveringSequence&) const = default;
};

namespace detail {

// Sampled h and rho/h on the grid, both nondecreasing for quasiconcave h.
struct Sampled {
    const RealFn& h;
    const RealFn& rho;
    std::vector<double> x, hv, gv;

    Sampled(const RealFn& h_, const RealFn& r_, const Grid& g) : h(h_), rho(r_), x(g.points)
    {
        for (double t : x) {
            const double hh = h(t);
            hv.push_back(hh);
            gv.push_back(rho(t) / hh);
        }
    }
    double g(double t) const { return rho(t) / h(t); }
};

// First t > from with f(t) >= target; f nondecreasing.  Returns -1 if none on the grid.
template <class F>
double first_crossing_up(const std::vector<double>& x, const std::vector<double>& fv, F f, double from, double target)
{
    auto start = std::upper_bound(x.begin(), x.end(), from) - x.begin();
    std::size_t i = static_cast<std::size_t>(start);
    while (i < x.size() && fv[i] < target) ++i;
    if (i == x.size()) return -1;
    double lo = i == static_cast<std::size_t>(start) ? from : x[i - 1], hi = x[i];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(m) >= target ? hi : lo) = m;
    }
    return hi;
}

// Last t < from with f(t) <= target; f nondecreasing.  Returns -1 if none on the grid.
template <class F>
double last_crossing_down(const std::vector<double>& x, const std::vector<double>& fv, F f, double from, double target)
{
    auto stop = std::lower_bound(x.begin(), x.end(), from) - x.begin();
    if (stop == 0) return -1;
    std::size_t i = static_cast<std::size_t>(stop);
    while (i > 0 && fv[i - 1] > target) --i;
    if (i == 0) return -1;
    double lo = x[i - 1], hi = i == static_cast<std::size_t>(stop) ? from : x[i];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(m) <= target ? lo : hi) = m;
    }
    return lo;
}

}  // namespace detail

// Variation of h and rho/h over the k-th interval [x_{k-1}, x_k], using the
// grid where an end is 0 or L.
struct IntervalVariation {
    double h_ratio, g_ratio;
};

inline IntervalVariation interval_variation(const CoveringSequence& cs, int k, const RealFn& h, const RealFn& rho,
                                            const Grid& grid)
{
    double lo = cs.x(k - 1), hi = cs.x(k);
    if (!(lo > 0)) lo = std::min(grid.front(), hi);
    if (!(hi < cs.end)) hi = std::max(grid.back(), lo);
    const double h0 = h(lo), h1 = h(hi);
    const double g0 = rho(lo) / h0, g1 = rho(hi) / h1;
    return {h1 / h0, g1 / g0};
}

// Z2 when rho/h varies by at most a on the interval (ties included), else Z1
// when h does; anything else is a construction error.
inline CoveringSequence classify_Z(CoveringSequence cs, const RealFn& h, const RealFn& rho, const Grid& grid,
                                   double tol = default_mono_tol)
{
    cs.z1.clear();
    cs.z2.clear();
    for (int k = cs.N + 1; k <= cs.M(); ++k) {
        const auto v = interval_variation(cs, k, h, rho, grid);
        if (v.g_ratio <= cs.a * (1 + tol))
            cs.z2.push_back(k);
        else if (v.h_ratio <= cs.a * (1 + tol))
            cs.z1.push_back(k);
        else {
            std::ostringstream os;
            os << "interval " << k << " = [" << cs.x(k - 1) << ", " << cs.x(k) << "]: h varies by " << v.h_ratio
               << " and rho/h by " << v.g_ratio << ", both above a = " << cs.a;
            throw ClassificationFailure(os.str());
        }
    }
    return cs;
}

struct CoveringOptions {
    double mono_tol = default_mono_tol;
    double decade_drop = 1e-3;  // relative change over the outermost decade that marks an infinite end
    bool infinite_end = false;  // the interval is a truncated half-line
};

// Greedy two-sided scan from a fixed seed.  Each step moves to
// the first point where both h and rho/h have changed by the factor a.
inline CoveringSequence build_covering_sequence(const RealFn& h, const RealFn& rho, double a, const Grid& grid,
                                                const CoveringOptions& opt = {})
{
    if (!(a > 1)) {
        std::ostringstream os;
        os << "covering ratio a = " << a << " must exceed 1";
        throw DegenerateRatio(os.str());
    }
    const auto qc = is_quasiconcave(h, rho, grid, opt.mono_tol);
    if (!qc.ok) {
        std::ostringstream os;
        os << qc.violations.size() << " monotonicity violations, first at t = " << qc.violations.front().t << " ("
           << qc.violations.front().what << ")";
        throw NotQuasiconcave(os.str());
    }
    const detail::Sampled s(h, rho, grid);
    const double lo = grid.front(), hi = grid.back();
    // seed at the middle of a bounded interval, at 1 on a half-line
    const double t0 = std::clamp(opt.infinite_end ? 1.0 : 0.5 * grid.upper, lo, hi);
    auto gfun = [&](double t) { return s.g(t); };

    std::vector<double> right;
    bool right_trunc = false;
    for (double x = t0;;) {
        const double th = detail::first_crossing_up(s.x, s.hv, h, x, a * h(x));
        const double tg = detail::first_crossing_up(s.x, s.gv, gfun, x, a * s.g(x));
        if (th < 0 || tg < 0) {
            if (opt.infinite_end && hi / 10 > lo) {
                const double hb = h(hi / 10), gb = s.g(hi / 10);
                right_trunc = h(hi) > hb * (1 + opt.decade_drop) && s.g(hi) > gb * (1 + opt.decade_drop);
            }
            right.push_back(right_trunc ? hi : grid.upper);
            break;
        }
        x = std::max(th, tg);
        right.push_back(x);
    }

    std::vector<double> left;
    bool left_trunc = false;
    for (double x = t0;;) {
        const double th = detail::last_crossing_down(s.x, s.hv, h, x, h(x) / a);
        const double tg = detail::last_crossing_down(s.x, s.gv, gfun, x, s.g(x) / a);
        if (th < 0 || tg < 0) {
            if (10 * lo < hi) {
                const double ha = h(10 * lo), ga = s.g(10 * lo);
                left_trunc = h(lo) < ha * (1 - opt.decade_drop) && s.g(lo) < ga * (1 - opt.decade_drop);
            }
            left.push_back(left_trunc ? lo : 0.0);
            break;
        }
        x = std::min(th, tg);
        left.push_back(x);
    }

    CoveringSequence cs;
    cs.a = a;
    cs.end = grid.upper;
    cs.left_truncated = left_trunc;
    cs.right_truncated = right_trunc;
    cs.N = -static_cast<int>(left.size());
    cs.points.assign(left.rbegin(), left.rend());
    cs.points.push_back(t0);
    cs.points.insert(cs.points.end(), right.begin(), right.end());
    return classify_Z(std::move(cs), h, rho, grid, opt.mono_tol);
}

struct PropertyCheck {
    std::string name;
    bool ok = true;
    double margin = 0;  // worst slack found; negative means violated
    std::string detail;
};

struct CoveringReport {
    bool ok = true;
    std::vector<PropertyCheck> checks;
    const PropertyCheck* failed() const
    {
        for (const auto& c : checks)
            if (!c.ok) return &c;
        return nullptr;
    }
};

// Checks the six covering properties plus structural invariants on the grid
// refined by three extra points per covering interval.
inline CoveringReport verify_covering_properties(const CoveringSequence& cs, const RealFn& h, const RealFn& rho,
                                                 double a, const Grid& grid, double tol = 1e-8)
{
    CoveringReport rep;
    auto add = [&](PropertyCheck c) {
        if (!c.ok) rep.ok = false;
        rep.checks.push_back(std::move(c));
    };
    auto g = [&](double t) { return rho(t) / h(t); };
    const int N = cs.N, M = cs.M();
    const double end = cs.end;

    PropertyCheck st{"structure", true, 0, ""};
    if (cs.points.size() < 2 || N > 0 || M < 0) {
        st.ok = false;
        st.detail = "need N <= 0 <= M and at least two points";
    }
    for (std::size_t i = 1; i < cs.points.size(); ++i)
        if (!(cs.points[i] > cs.points[i - 1])) {
            st.ok = false;
            st.detail = "points not increasing";
        }
    {
        std::vector<int> all = cs.z1;
        all.insert(all.end(), cs.z2.begin(), cs.z2.end());
        std::sort(all.begin(), all.end());
        std::vector<int> want;
        for (int k = N + 1; k <= M; ++k) want.push_back(k);
        if (all != want) {
            st.ok = false;
            st.detail = "Z1 and Z2 do not partition N+1..M";
        }
    }
    add(st);
    if (!st.ok) return rep;

    // sample points: grid plus three interior points per interval
    std::vector<double> sample = grid.points;
    for (int k = N + 1; k <= M; ++k) {
        double l = cs.x(k - 1), r = cs.x(k);
        if (!(l > 0)) l = std::min(grid.front(), r) * 0.5;
        if (!(r < end)) r = std::max(grid.back(), l);
        for (double f : {0.25, 0.5, 0.75}) sample.push_back(l + f * (r - l));
    }
    for (double x : cs.points)
        if (x > 0 && x < end) sample.push_back(x);
    std::sort(sample.begin(), sample.end());
    sample.erase(std::unique(sample.begin(), sample.end()), sample.end());
    auto in = [&](double t, double l, double r) { return t >= l && t <= r; };

    {
        PropertyCheck c{"right end", true, 0, ""};
        const double xm = cs.x(M);
        if (!cs.right_truncated && std::abs(xm - end) > 1e-12 * end) {
            c.ok = false;
            c.detail = "M is finite but x_M != L";
        }
        if (cs.right_truncated) {
            const double t1 = grid.back(), t0 = t1 / 10;
            if (!(h(t1) > h(t0) && g(t1) > g(t0))) {
                c.ok = false;
                c.detail = "right end marked infinite but h or rho/h is not growing";
            }
        }
        add(c);
    }
    {
        PropertyCheck c{"left end", true, 0, ""};
        const double xn = cs.x(N);
        if (!cs.left_truncated && xn != 0) {
            c.ok = false;
            c.detail = "N is finite but x_N != 0";
        }
        if (cs.left_truncated) {
            const double t0 = grid.front(), t1 = 10 * t0;
            if (!(h(t0) < h(t1) && g(t0) < g(t1))) {
                c.ok = false;
                c.detail = "left end marked infinite but h or rho/h is not decaying";
            }
        }
        add(c);
    }
    {
        PropertyCheck c{"growth", true, infinity, ""};
        for (int k = N + 2; k <= M - 1; ++k) {
            const double rh = h(cs.x(k)) / (a * h(cs.x(k - 1))), rg = g(cs.x(k)) / (a * g(cs.x(k - 1)));
            const double m = std::min(rh, rg) - 1;
            c.margin = std::min(c.margin, m);
            if (m < -tol) {
                c.ok = false;
                std::ostringstream os;
                os << "a h(x_{k-1}) <= h(x_k) or its rho/h analogue fails at k = " << k;
                c.detail = os.str();
            }
        }
        add(c);
    }
    // within [l, r]: f(ref)/a <= f(t) <= f(ref) (down = true) or f(ref) <= f(t) <= a f(ref)
    auto band = [&](auto&& f, double ref_t, double l, double r, bool down) {
        const double fr = f(ref_t);
        double worst = infinity;
        for (double t : sample) {
            if (!in(t, l, r)) continue;
            const double v = f(t);
            const double lo = down ? fr / a : fr, hi = down ? fr : a * fr;
            worst = std::min({worst, v / lo - 1, 1 - v / hi});
        }
        return worst;
    };
    {
        PropertyCheck c{"interval band", true, infinity, ""};
        for (int k = N + 2; k <= M - 1; ++k) {
            const double l = cs.x(k - 1), r = cs.x(k);
            const double m = std::max(band(h, r, l, r, true), band(g, r, l, r, true));
            c.margin = std::min(c.margin, m);
            if (m < -tol) {
                c.ok = false;
                std::ostringstream os;
                os << "neither h nor rho/h stays within factor a on interval " << k;
                c.detail = os.str();
            }
        }
        add(c);
    }
    if (!cs.right_truncated && M - 1 >= N) {
        PropertyCheck c{"last interval", true, infinity, ""};
        const double l = cs.x(M - 1);
        if (l > 0) {
            const double m = std::max(band(h, l, l, end, false), band(g, l, l, end, false));
            c.margin = m;
            if (m < -tol) {
                c.ok = false;
                c.detail = "neither h nor rho/h stays within factor a on [x_{M-1}, L)";
            }
        }
        add(c);
    }
    if (!cs.left_truncated && N + 1 <= M) {
        PropertyCheck c{"first interval", true, infinity, ""};
        const double r = cs.x(N + 1);
        if (r < end) {
            const double m = std::max(band(h, r, 0, r, true), band(g, r, 0, r, true));
            c.margin = m;
            if (m < -tol) {
                c.ok = false;
                c.detail = "neither h nor rho/h stays within factor a on (0, x_{N+1}]";
            }
        }
        add(c);
    }
    return rep;
}

}  // namespace ggamma
