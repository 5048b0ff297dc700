#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

#include "ggamma/errors.hpp"

namespace ggamma {

inline constexpr double default_quad_tol = 1e-9;

struct QuadOptions {
    double tol = default_quad_tol;
    int max_intervals = 4000;
    std::vector<double> splits;  // interior points where f may be non-smooth
};

// Fixed Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n)
{
    GaussRule r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 1;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2 / ((1 - z * z) * pp * pp);
    }
    return r;
}

namespace detail {

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
double checked(F& f, double x)
{
    double y = f(x);
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os << "integrand is " << y << " at " << x;
        throw NonFiniteIntegrand(os.str());
    }
    return y;
}

// QUADPACK-style 15-point Kronrod panel with embedded 7-point Gauss estimate.
template <class F>
Panel gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = checked(f, c);
    double resk = fc * gk_w[7], resg = fc * g_w[3], resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk_x[j];
        f1[j] = checked(f, c - dx);
        f2[j] = checked(f, c + dx);
        resk += gk_w[j] * (f1[j] + f2[j]);
        resabs += gk_w[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += g_w[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = gk_w[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += gk_w[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    resk *= h;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    double err = std::abs((resk - resg * h));
    if (resasc != 0 && err != 0) err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps))
        err = std::max(err, 50 * eps * resabs);
    return {a, b, resk, err};
}

// Global adaptive bisection over an initial partition.
template <class F>
double adaptive(F& f, const std::vector<double>& cuts, double rel_tol, double abs_tol, int budget)
{
    std::priority_queue<Panel> heap;
    double total = 0, err = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        Panel p = gk15(f, cuts[i], cuts[i + 1]);
        total += p.value;
        err += p.err;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<Panel> frozen;
    while (!heap.empty() && err > std::max(rel_tol * std::abs(total), abs_tol)) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b) || (p.b - p.a) < 16 * eps * std::max(std::abs(p.a), std::abs(p.b))) {
            frozen.push_back(p);  // cannot split further
            continue;
        }
        if (count >= budget) {
            std::ostringstream os;
            os << "budget of " << budget << " panels exhausted on [" << cuts.front() << ", "
               << cuts.back() << "], estimate " << total << " +- " << err;
            throw QuadratureFailure(os.str());
        }
        Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    if (!frozen.empty() && err > std::max(rel_tol * std::abs(total), abs_tol)) {
        // only unsplittable panels remain; accept if they are a roundoff-level share
        double ferr = 0;
        for (const auto& p : frozen) ferr += p.err;
        if (ferr > 1e3 * std::max(rel_tol * std::abs(total), abs_tol))
            throw QuadratureFailure("panels shrank to machine resolution without convergence");
    }
    return total;
}

inline std::vector<double> sorted_cuts(double a, double b, const std::vector<double>& splits)
{
    std::vector<double> cuts{a};
    for (double s : splits)
        if (s > a && s < b) cuts.push_back(s);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

// Integral over [a, b] with 0 < a: uses the log variable when the range spans decades.
template <class F>
double integrate_positive(F& f, double a, double b, const QuadOptions& o, double abs_tol)
{
    if (b / a <= 8) return adaptive(f, sorted_cuts(a, b, o.splits), o.tol, abs_tol, o.max_intervals);
    auto g = [&f](double x) {
        const double s = std::exp(x);
        return f(s) * s;
    };
    const double la = std::log(a), lb = std::log(b);
    std::vector<double> cuts{la};
    const int pieces = static_cast<int>(std::ceil(lb - la));
    for (int i = 1; i < pieces; ++i) cuts.push_back(la + (lb - la) * i / pieces);
    for (double s : o.splits)
        if (s > a && s < b) cuts.push_back(std::log(s));
    cuts.push_back(lb);
    std::sort(cuts.begin(), cuts.end());
    cuts.front() = la;
    cuts.back() = lb;
    return adaptive(g, cuts, o.tol, abs_tol, o.max_intervals);
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of f over (a, b).  a == 0 is treated as a
// possibly singular endpoint: the integral over (0, c] is taken in the log
// variable on chunks of doubling length with an exponential tail estimate.
template <class F>
double integrate(F&& f, double a, double b, const QuadOptions& o = {})
{
    if (!(b > a)) {
        if (a == b) return 0.0;
        return -integrate(f, b, a, o);
    }
    if (!std::isfinite(b)) throw QuadratureFailure("infinite upper limit; truncate first");
    if (a > 0) return detail::integrate_positive(f, a, b, o, 0.0);
    if (a < 0) return detail::adaptive(f, detail::sorted_cuts(a, b, o.splits), o.tol, 0.0, o.max_intervals);

    double c = b;
    for (double s : o.splits)
        if (s > 0 && s < c) c = s;
    double total = 0;
    if (c < b) {
        QuadOptions rest = o;
        total = detail::integrate_positive(f, c, b, rest, 0.0);
    }
    auto g = [&f](double x) {
        const double s = std::exp(x);
        return f(s) * s;
    };
    const double top = std::log(c);
    double hi = top, len = 1.0;
    double g_prev = g(top);
    while (true) {
        const double lo = hi - len;
        if (lo < -740.0)
            throw QuadratureFailure("integrand does not decay near 0 (divergent integral?)");
        double part;
        try {
            part = detail::adaptive(g, {lo, hi}, o.tol, o.tol * std::abs(total) * 0.1, o.max_intervals);
        } catch (const NonFiniteIntegrand& e) {
            throw QuadratureFailure(std::string("non-finite integrand near 0: ") + e.what());
        }
        total += part;
        const double g_lo = g(lo);
        if (!std::isfinite(g_lo)) throw QuadratureFailure("integrand blows up near 0");
        if (g_lo == 0 && g_prev == 0) break;
        if (g_lo > 0 && g_prev > 0) {
            const double alpha = std::log(g_prev / g_lo) / len;
            if (alpha > 0) {
                const double tail = g_lo / alpha;
                if (tail <= 0.1 * o.tol * std::abs(total)) {
                    total += tail;
                    break;
                }
            }
        } else if (g_lo == 0) {
            break;
        }
        g_prev = g_lo;
        hi = lo;
        len *= 2;
    }
    return total;
}

template <class F>
double integrate(F&& f, double a, double b, double tol)
{
    QuadOptions o;
    o.tol = tol;
    return integrate(std::forward<F>(f), a, b, o);
}

}  // namespace ggamma
