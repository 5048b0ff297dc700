#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/covering.hpp"
#include "ggamma/errors.hpp"
#include "ggamma/optimize.hpp"
#include "ggamma/params.hpp"
#include "ggamma/profile.hpp"
#include "ggamma/quadrature.hpp"
#include "ggamma/step_function.hpp"

namespace ggamma {

// Finite sequence indexed first, first+1, ...
struct RealSeq {
    int first = 0;
    std::vector<double> values;

    int last() const { return first + static_cast<int>(values.size()) - 1; }
    double operator[](int k) const { return values.at(static_cast<std::size_t>(k - first)); }
    std::size_t size() const { return values.size(); }
    bool operator==(const RealSeq&) const = default;
};

struct DiscreteReport {
    double lhs = 0, rhs = 0, ratio = 1;
    RealSeq witness;
};

enum class Monotonicity { increasing, decreasing, neither };

struct MonotoneClass {
    Monotonicity kind = Monotonicity::neither;
    double rho = 1;  // inf of consecutive ratios if increasing, sup if decreasing
    double min_ratio = 1, max_ratio = 1;
};

inline MonotoneClass is_strongly_monotone(const RealSeq& s)
{
    for (double v : s.values)
        if (!(v > 0) || !std::isfinite(v)) throw NonPositive("strong monotonicity needs positive finite entries");
    MonotoneClass c;
    if (s.size() < 2) return c;
    c.min_ratio = infinity;
    c.max_ratio = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double q = s.values[i] / s.values[i - 1];
        c.min_ratio = std::min(c.min_ratio, q);
        c.max_ratio = std::max(c.max_ratio, q);
    }
    if (c.min_ratio > 1) {
        c.kind = Monotonicity::increasing;
        c.rho = c.min_ratio;
    } else if (c.max_ratio < 1) {
        c.kind = Monotonicity::decreasing;
        c.rho = c.max_ratio;
    }
    return c;
}

enum class EquivalenceForm { increasing_sum_sum, increasing_sum_sup, increasing_sup_sum, decreasing_sum_sum,
                             decreasing_sup_sum };

inline const char* to_string(EquivalenceForm f)
{
    switch (f) {
    case EquivalenceForm::increasing_sum_sum: return "increasing_sum_sum";
    case EquivalenceForm::increasing_sum_sup: return "increasing_sum_sup";
    case EquivalenceForm::increasing_sup_sum: return "increasing_sup_sum";
    case EquivalenceForm::decreasing_sum_sum: return "decreasing_sum_sum";
    case EquivalenceForm::decreasing_sup_sum: return "decreasing_sup_sum";
    }
    return "?";
}

// Both sides of one of the five sum/sup equivalences for strongly monotone
// weights rho_k.  lhs is the side with the inner tail (or head) sum.
inline DiscreteReport strong_monotone_equivalence(const RealSeq& rho, const RealSeq& a, double p, EquivalenceForm form)
{
    if (rho.size() != a.size() || rho.first != a.first) throw InadmissibleSpec("sequences must share their index range");
    if (!(p > 0)) throw InadmissibleSpec("p must be positive");
    for (double v : a.values)
        if (!(v >= 0) || !std::isfinite(v)) throw InadmissibleSpec("a_k must be finite and nonnegative");
    const auto mc = is_strongly_monotone(rho);
    const bool want_inc = form == EquivalenceForm::increasing_sum_sum || form == EquivalenceForm::increasing_sum_sup ||
                          form == EquivalenceForm::increasing_sup_sum;
    if (mc.kind != (want_inc ? Monotonicity::increasing : Monotonicity::decreasing))
        throw WrongMonotonicity(std::string(to_string(form)) + " needs a strongly " +
                                (want_inc ? "increasing" : "decreasing") + " rho");
    const std::size_t n = a.size();
    std::vector<double> inner(n);
    if (want_inc) {
        double acc = 0;
        for (std::size_t i = n; i-- > 0;) {
            acc = form == EquivalenceForm::increasing_sum_sup ? std::max(acc, a.values[i]) : acc + a.values[i];
            inner[i] = acc;
        }
    } else {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) inner[i] = acc += a.values[i];
    }
    const bool sup_outer = form == EquivalenceForm::increasing_sup_sum || form == EquivalenceForm::decreasing_sup_sum;
    DiscreteReport r;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = rho.values[i] * std::pow(inner[i], p), rr = rho.values[i] * std::pow(a.values[i], p);
        r.lhs = sup_outer ? std::max(r.lhs, l) : r.lhs + l;
        r.rhs = sup_outer ? std::max(r.rhs, rr) : r.rhs + rr;
    }
    r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 1.0;
    r.witness = a;
    return r;
}

namespace detail {

inline void check_pair(const RealSeq& a, const RealSeq& b)
{
    if (a.size() != b.size() || a.first != b.first || a.size() == 0)
        throw InadmissibleSpec("a and b must be nonempty and share their index range");
    for (const auto* s : {&a, &b})
        for (double v : s->values)
            if (!(v >= 0) || !std::isfinite(v)) throw InadmissibleSpec("a_k and b_k must be finite and nonnegative");
}

}  // namespace detail

// Closed form equivalent to the optimal constant of the weighted discrete
// Hardy inequality  (Σ_k (Σ_{i<=k} x_i^r b_i)^{q/r} a_k)^{1/q} <= D (Σ x_k^p)^{1/p}.
inline double discrete_hardy_D(const RealSeq& a, const RealSeq& b, const ParamTriple& par)
{
    validate(par);
    detail::check_pair(a, b);
    const double p = par.p, q = par.q, r = par.r;
    if (p > q) throw OutOfScope("discrete Hardy formula needs p <= q");
    const std::size_t n = a.size();
    std::vector<double> tail(n);
    double acc = 0;
    for (std::size_t i = n; i-- > 0;) tail[i] = acc += a.values[i];
    double D = 0;
    if (p <= r) {
        for (std::size_t k = 0; k < n; ++k) D = std::max(D, std::pow(tail[k], 1 / q) * std::pow(b.values[k], 1 / r));
    } else {
        double head = 0;
        for (std::size_t k = 0; k < n; ++k) {
            head += std::pow(b.values[k], p / (p - r));
            D = std::max(D, std::pow(tail[k], 1 / q) * std::pow(head, (p - r) / (p * r)));
        }
    }
    return D;
}

inline double discrete_hardy_ratio(const RealSeq& a, const RealSeq& b, const ParamTriple& par,
                                   const std::vector<double>& x)
{
    const double p = par.p, q = par.q, r = par.r;
    double head = 0, lhs = 0, rhs = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        head += std::pow(x[k], r) * b.values[k];
        lhs += std::pow(head, q / r) * a.values[k];
        rhs += std::pow(x[k], p);
    }
    if (!(rhs > 0)) return 0;
    return std::pow(lhs, 1 / q) / std::pow(rhs, 1 / p);
}

// Lower bound on the Hardy constant by direct search.  Unit vectors and the
// constant sequence are tried before `trials` random starts.
inline DiscreteReport discrete_hardy_bruteforce(const RealSeq& a, const RealSeq& b, const ParamTriple& par, int trials,
                                                std::uint64_t seed = 1, unsigned jobs = 1)
{
    validate(par);
    detail::check_pair(a, b);
    const std::size_t n = a.size();
    std::vector<std::vector<double>> fixed;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> e(n, 0.0);
        e[k] = 1;
        fixed.push_back(e);
    }
    fixed.emplace_back(n, 1.0);
    MultistartOptions mo;
    mo.restarts = std::max(trials, 0);
    mo.seed = seed;
    mo.jobs = jobs;
    mo.ascent.max_sweeps = 200;
    auto f = [&](const std::vector<double>& x) { return discrete_hardy_ratio(a, b, par, x); };
    const auto best = multistart(f, n, fixed, mo);
    DiscreteReport rep;
    rep.ratio = best.value;
    rep.witness = {a.first, best.x};
    const double p = par.p, q = par.q, r = par.r;
    double head = 0;
    for (std::size_t k = 0; k < n; ++k) {
        head += std::pow(best.x[k], r) * b.values[k];
        rep.lhs += std::pow(head, q / r) * a.values[k];
        rep.rhs += std::pow(best.x[k], p);
    }
    rep.lhs = std::pow(rep.lhs, 1 / q);
    rep.rhs = std::pow(rep.rhs, 1 / p);
    return rep;
}

// Dense ordered sample of one covering interval: cell ends from the profile
// nodes (plus any extra breaks) and 4 Gauss points per cell.  `weight` is the
// Gauss weight at Gauss points and 0 at cell ends.
class Window {
public:
    Window(const Profile& pr, double a, double b, const std::vector<double>& extra = {}) : pr_(pr), a_(a), b_(b)
    {
        const double lo = std::max(a, pr.x(0));
        std::vector<double> ends{lo};
        for (double x : pr.nodes())
            if (x > lo && x < b) ends.push_back(x);
        for (double x : extra)
            if (x > lo && x < b) ends.push_back(x);
        ends.push_back(b);
        std::sort(ends.begin(), ends.end());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
        static const GaussRule g = gauss_legendre(4);
        t_.push_back(ends[0]);
        w_.push_back(0);
        for (std::size_t i = 1; i < ends.size(); ++i) {
            const double c = 0.5 * (ends[i - 1] + ends[i]), h = 0.5 * (ends[i] - ends[i - 1]);
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                t_.push_back(c + h * g.x[k]);
                w_.push_back(h * g.w[k]);
            }
            t_.push_back(ends[i]);
            w_.push_back(0);
        }
        D0_ = a > 0 ? pr.Delta(a) : 0.0;
        Omb_ = b < pr.end() ? pr.Omega(b) : 0.0;
        for (double t : t_) {
            phi_.push_back(pr.phi(t));
            D_.push_back(std::max(pr.Delta(t) - D0_, 0.0));
        }
    }

    std::size_t size() const { return t_.size(); }
    double t(std::size_t i) const { return t_[i]; }
    double weight(std::size_t i) const { return w_[i]; }
    double phi(std::size_t i) const { return phi_[i]; }
    // ∫_a^t δ
    double Dloc(std::size_t i) const { return D_[i]; }
    double Dloc_at(double s) const { return std::max(pr_.Delta(s) - D0_, 0.0); }
    // ∫_t^b Δ^{-q/r} w
    double omega_loc(std::size_t i) const { return std::max(pr_.Omega(t_[i]) - Omb_, 0.0); }
    double a() const { return a_; }
    double b() const { return b_; }
    const Profile& profile() const { return pr_; }

    // Σ weight·f over Gauss points: ∫_a^b f
    template <class F>
    double total(F&& f) const
    {
        double s = 0;
        for (std::size_t i = 0; i < t_.size(); ++i)
            if (w_[i] > 0) s += w_[i] * f(i);
        return s;
    }

    // C[i] = ∫_{t_0}^{t_i} f for a pointwise density f(s), 4-point Gauss per gap
    template <class F>
    std::vector<double> cumulative(F&& f) const
    {
        static const GaussRule g = gauss_legendre(4);
        std::vector<double> c(t_.size(), 0.0);
        for (std::size_t i = 1; i < t_.size(); ++i) {
            const double m = 0.5 * (t_[i - 1] + t_[i]), h = 0.5 * (t_[i] - t_[i - 1]);
            double s = 0;
            for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(m + h * g.x[k]);
            c[i] = c[i - 1] + s * h;
        }
        return c;
    }

private:
    const Profile& pr_;
    double a_, b_;
    std::vector<double> t_, w_, phi_, D_;
    double D0_ = 0, Omb_ = 0;
};

// Local Hardy quantity of one covering interval, via the closed forms for
// r >= 1 and r < 1.
inline double local_B(const Window& win, const ParamTriple& par)
{
    const double p = par.p, r = par.r;
    if (!(win.b() > win.a())) return 0;
    double v = 0;
    if (r >= 1) {
        for (std::size_t i = 0; i < win.size(); ++i)
            v = std::max(v, std::pow(win.Dloc(i), 1 / r) * std::pow(win.phi(i), -1 / p));
    } else {
        const auto& pr = win.profile();
        const double J = win.total([&](std::size_t i) {
            return std::pow(win.Dloc(i), r / (1 - r)) * pr.weights().delta(win.t(i)) *
                   std::pow(win.phi(i), -r / (p * (1 - r)));
        });
        v = std::pow(J, (1 - r) / r);
    }
    if (!std::isfinite(v)) throw NonFinite("local_B is not finite");
    return v;
}

inline double local_B(double a, double b, const Profile& pr)
{
    if (!(b > a)) return 0;
    return local_B(Window(pr, a, b), pr.params());
}

struct LocalBruteOptions {
    int pieces = 24;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

// Lower bound on the local Hardy quantity over step functions supported in
// (a, b):  (∫_a^b (∫_s^b h)^r δ)^{1/r} / ∫_a^b h φ^{1/p}.
inline double local_B_bruteforce(double a, double b, const Profile& pr, int trials, const LocalBruteOptions& o = {})
{
    if (trials <= 0 || !(b > a)) return 0;
    const double p = pr.params().p, r = pr.params().r;
    const double lo = std::max(a, pr.x(0));
    // pieces: geometric from lo plus dyadic refinement toward b
    std::vector<double> e{lo, b};
    const int half = std::max(o.pieces / 2, 1);
    for (int j = 1; j < half; ++j) e.push_back(lo * std::pow(b / lo, static_cast<double>(j) / half));
    for (int j = 1; j < half; ++j) e.push_back(b - (b - lo) * std::pow(0.5, j));
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end(), [](double x, double y) { return std::abs(x - y) <= 1e-15 * y; }), e.end());
    const std::size_t P = e.size() - 1;

    static const GaussRule g = gauss_legendre(8);
    struct Node {
        std::size_t piece;
        double s, wd;  // point and Gauss weight times δ(s)
    };
    std::vector<Node> nodes;
    std::vector<double> mass(P);  // ∫_piece φ^{1/p}
    for (std::size_t j = 0; j < P; ++j) {
        const double l = e[j], h = e[j + 1];
        if (h / l > 4) {
            // log variable keeps δ singularities at lo under control
            const double ll = std::log(l), lh = std::log(h), c = 0.5 * (ll + lh), hw = 0.5 * (lh - ll);
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                const double s = std::exp(c + hw * g.x[k]);
                nodes.push_back({j, s, hw * g.w[k] * s * pr.weights().delta(s)});
            }
        } else {
            const double c = 0.5 * (l + h), hw = 0.5 * (h - l);
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                const double s = c + hw * g.x[k];
                nodes.push_back({j, s, hw * g.w[k] * pr.weights().delta(s)});
            }
        }
        mass[j] = pr.panel([&](double s) { return std::pow(pr.phi(s), 1 / p); }, l, h);
    }
    auto ratio = [&](const std::vector<double>& c) {
        std::vector<double> tail(P + 1, 0.0);
        for (std::size_t j = P; j-- > 0;) tail[j] = tail[j + 1] + c[j] * (e[j + 1] - e[j]);
        double num = 0, den = 0;
        for (const auto& n : nodes) {
            const double H = tail[n.piece + 1] + c[n.piece] * (e[n.piece + 1] - n.s);
            num += std::pow(H, r) * n.wd;
        }
        for (std::size_t j = 0; j < P; ++j) den += c[j] * mass[j];
        return den > 0 ? std::pow(num, 1 / r) / den : 0.0;
    };
    std::vector<std::vector<double>> fixed;
    for (std::size_t j = 0; j < P; ++j) {
        std::vector<double> x(P, 0.0);
        x[j] = 1;
        fixed.push_back(x);
    }
    MultistartOptions mo;
    mo.restarts = trials;
    mo.seed = o.seed;
    mo.jobs = o.jobs;
    mo.ascent.max_sweeps = 200;
    return multistart(ratio, P, fixed, mo).value;
}

inline const std::vector<std::string>& cij_labels()
{
    static const std::vector<std::string> l = {"C11", "C12", "C13", "C14", "C15", "C16", "C21",
                                               "C22", "C31", "C32", "C33", "C34", "C41"};
    return l;
}

struct CijResult {
    double value = 0;
    int argk = 0;
    bool converged = true;  // false when a truncated end carries visible weight
};

namespace detail {

inline void require_cij(const std::string& which, const ParamTriple& par)
{
    const double p = par.p, q = par.q, r = par.r;
    auto bad = [&](const char* why) {
        std::ostringstream os;
        os << which << " is defined only for " << why << " (p=" << p << " q=" << q << " r=" << r << ")";
        throw OutOfScope(os.str());
    };
    if (std::find(cij_labels().begin(), cij_labels().end(), which) == cij_labels().end())
        throw OutOfScope("unknown constant label '" + which + "'");
    if ((which == "C13" || which == "C32") && !(r < 1)) bad("r < 1");
    if ((which == "C14" || which == "C15") && !(q < 1)) bad("q < 1");
    if (which == "C16" && !(q < 1 && r < 1)) bad("q < 1 and r < 1");
    if (which == "C33" && !(1 <= r && r < p)) bad("1 <= r < p");
    if (which == "C34" && !(r < p && r < 1)) bad("r < p and r < 1");
    if (which == "C22" && !(r < p)) bad("r < p");
}

}  // namespace detail

// Evaluator for the discrete constants over one covering sequence.  Windows
// are built lazily and cached.
class DiscreteConstants {
public:
    DiscreteConstants(const CoveringSequence& cs, const Profile& pr) : cs_(cs), pr_(pr) {}

    const Window& window(int k) const
    {
        auto it = cache_.find(k);
        if (it == cache_.end()) it = cache_.emplace(k, Window(pr_, cs_.x(k - 1), cs_.x(k))).first;
        return it->second;
    }

    CijResult compute(const std::string& which) const
    {
        const ParamTriple& par = pr_.params();
        detail::require_cij(which, par);
        const double p = par.p, q = par.q, r = par.r;
        const int N = cs_.N, M = cs_.M();
        const bool inner = which[1] == '1';  // C1j: sup over N+1..M
        const int kmax = inner ? M : M - 1;
        if (kmax < N + 1) {
            std::ostringstream os;
            os << which << " needs an interior index but the covering has N=" << N << " M=" << M;
            throw EmptyCovering(os.str());
        }
        const auto& ws = pr_.weights();

        CijResult res;
        std::vector<double> terms;  // per-k summands for head-sum labels
        double head = 0;
        for (int k = N + 1; k <= kmax; ++k) {
            const Window& W = window(k);
            const std::size_t n = W.size();
            double v = 0;
            auto Dr = [&](std::size_t i) { return W.Dloc(i); };
            auto a_dens = [&](double s) {
                return std::pow(pr_.Delta(s), -q / r) * ws.w(s) * std::pow(W.Dloc_at(s), q / r);
            };
            auto j_dens = [&](double s) {
                return std::pow(W.Dloc_at(s), r / (1 - r)) * ws.delta(s) * std::pow(pr_.phi(s), -r / (p * (1 - r)));
            };
            auto J_total = [&] {
                return W.total([&](std::size_t i) {
                    return std::pow(Dr(i), r / (1 - r)) * ws.delta(W.t(i)) * std::pow(W.phi(i), -r / (p * (1 - r)));
                });
            };
            const double xk = cs_.x(k);
            const double Om_k = xk < pr_.end() ? pr_.Omega(xk) : 0.0;
            const double phi_k = pr_.phi(std::min(xk, W.t(n - 1)));

            if (which == "C11") {
                double run = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    run = std::max(run, std::pow(Dr(i), 1 / r) * std::pow(W.phi(i), -1 / p));
                    v = std::max(v, std::pow(W.omega_loc(i), 1 / q) * run);
                }
            } else if (which == "C12") {
                const auto A = W.cumulative(a_dens);
                for (std::size_t i = 0; i < n; ++i) v = std::max(v, std::pow(A[i], 1 / q) * std::pow(W.phi(i), -1 / p));
            } else if (which == "C13") {
                const auto J = W.cumulative(j_dens);
                for (std::size_t i = 0; i < n; ++i)
                    v = std::max(v, std::pow(W.omega_loc(i), 1 / q) * std::pow(J[i], (1 - r) / r));
            } else if (which == "C14") {
                const double e = q / (1 - q);
                std::vector<double> run(n);
                double m = 0;
                for (std::size_t i = 0; i < n; ++i)
                    run[i] = m = std::max(m, std::pow(Dr(i), q / (r * (1 - q))) * std::pow(W.phi(i), -q / (p * (1 - q))));
                const double s = W.total([&](std::size_t i) {
                    const double t = W.t(i);
                    return std::pow(W.omega_loc(i), e) * ws.w(t) * std::pow(pr_.Delta(t), -q / r) * run[i];
                });
                v = std::pow(s, (1 - q) / q);
            } else if (which == "C15") {
                const double e = q / (1 - q);
                const auto A = W.cumulative(a_dens);
                const double s = W.total([&](std::size_t i) {
                    const double t = W.t(i);
                    return std::pow(A[i], e) * std::pow(pr_.Delta(t), -q / r) * ws.w(t) * std::pow(Dr(i), q / r) *
                           std::pow(W.phi(i), -q / (p * (1 - q)));
                });
                v = std::pow(s, (1 - q) / q);
            } else if (which == "C16") {
                const double e = q / (1 - q);
                const auto J = W.cumulative(j_dens);
                const double s = W.total([&](std::size_t i) {
                    const double t = W.t(i);
                    return std::pow(W.omega_loc(i), e) * std::pow(pr_.Delta(t), -q / r) * ws.w(t) *
                           std::pow(J[i], q * (1 - r) / (r * (1 - q)));
                });
                v = std::pow(s, (1 - q) / q);
            } else if (which == "C21") {
                v = std::pow(Om_k, 1 / q) * std::pow(Dr(n - 1), 1 / r) * std::pow(phi_k, -1 / p);
            } else if (which == "C22") {
                const double term = std::pow(Dr(n - 1), p / (p - r)) * std::pow(phi_k, -r / (p - r));
                terms.push_back(term);
                head += term;
                v = std::pow(Om_k, 1 / q) * std::pow(head, (p - r) / (p * r));
            } else if (which == "C31") {
                double m = 0;
                for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::pow(Dr(i), 1 / r) * std::pow(W.phi(i), -1 / p));
                v = std::pow(Om_k, 1 / q) * m;
            } else if (which == "C32") {
                v = std::pow(Om_k, 1 / q) * std::pow(J_total(), (1 - r) / r);
            } else if (which == "C33") {
                double m = 0;
                for (std::size_t i = 0; i < n; ++i)
                    m = std::max(m, std::pow(Dr(i), p / (p - r)) * std::pow(W.phi(i), -r / (p - r)));
                terms.push_back(m);
                head += m;
                v = std::pow(Om_k, 1 / q) * std::pow(head, (p - r) / (p * r));
            } else if (which == "C34") {
                const double term = std::pow(J_total(), p * (1 - r) / (p - r));
                terms.push_back(term);
                head += term;
                v = std::pow(Om_k, 1 / q) * std::pow(head, (p - r) / (p * r));
            } else {  // C41
                const double wk = ws.w.primitive(xk) - (cs_.x(k - 1) > 0 ? ws.w.primitive(cs_.x(k - 1)) : 0.0);
                v = std::pow(wk, 1 / q) * std::pow(phi_k, -1 / p);
            }
            if (std::isnan(v)) throw NonFinite(which + " is NaN at k = " + std::to_string(k));
            if (v > res.value || k == N + 1) {
                res.value = v;
                res.argk = k;
            }
        }
        // truncated ends: flag when the optimum sits next to them or the head
        // sum is dominated by its first terms
        if (cs_.left_truncated) {
            if (res.argk <= N + 3) res.converged = false;
            if (!terms.empty()) {
                const std::size_t upto = static_cast<std::size_t>(res.argk - N);
                double first3 = 0, all = 0;
                for (std::size_t i = 0; i < upto && i < terms.size(); ++i) {
                    all += terms[i];
                    if (i < 3) first3 += terms[i];
                }
                if (all > 0 && first3 > 0.01 * all && upto > 3) res.converged = false;
            }
        }
        if (cs_.right_truncated && res.argk >= kmax - 2) res.converged = false;
        return res;
    }

private:
    const CoveringSequence& cs_;
    const Profile& pr_;
    mutable std::map<int, Window> cache_;
};

inline double compute_Cij(const CoveringSequence& cs, const Profile& pr, const std::string& which)
{
    return DiscreteConstants(cs, pr).compute(which).value;
}

// Left sides of the four block inequalities M1..M4 and their common right side.
struct DiscretizedForms {
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0, rhs = 0;
};

inline DiscretizedForms discretized_forms(const TestFunction& h, const CoveringSequence& cs, const Profile& pr)
{
    h.validate();
    const double p = pr.params().p, q = pr.params().q, r = pr.params().r;
    const auto& ws = pr.weights();
    const int N = cs.N, M = cs.M();
    DiscretizedForms out;
    if (h.is_zero()) return out;

    std::vector<double> hk, dk, om, wk, Ik;  // per k = N+1..M, index k-N-1
    double s1 = 0, rhs = 0;
    for (int k = N + 1; k <= M; ++k) {
        const double a = cs.x(k - 1), b = cs.x(k);
        const Window W(pr, a, b, h.edges);
        const double tb = h.tail(b);
        auto H = [&](double s) { return std::max(h.tail(s) - tb, 0.0); };
        // M1: inner ∫_a^t H^r δ, outer in t
        const auto inner = W.cumulative([&](double s) { return std::pow(H(s), r) * ws.delta(s); });
        s1 += W.total([&](std::size_t i) {
            const double t = W.t(i);
            return std::pow(inner[i] / pr.Delta(t), q / r) * ws.w(t);
        });
        Ik.push_back(inner.back());
        rhs += std::pow(W.total([&](std::size_t i) { return std::pow(W.phi(i), 1 / p) * h(W.t(i)); }), p);
        hk.push_back(H(a));  // ∫_{x_{k-1}}^{x_k} h
        dk.push_back(W.Dloc(W.size() - 1));
        const double Oa = a > 0 ? pr.Omega(a) : pr.Omega(pr.x(0));
        const double Ob = b < pr.end() ? pr.Omega(b) : 0.0;
        om.push_back(std::max(Oa - Ob, 0.0));  // ∫_{x_{k-1}}^{x_k} Δ^{-q/r} w
        wk.push_back(ws.w.primitive(b) - (a > 0 ? ws.w.primitive(a) : 0.0));
    }
    const std::size_t K = hk.size();
    // h over [x_j, x_{j+1}] is hk[j+1-N-1] = hk[j-N]
    double s2 = 0, s3 = 0, s4 = 0;
    double headI = 0;
    for (std::size_t k = 0; k + 1 < K; ++k) {  // k indexes N+1..M-1
        headI += Ik[k];
        s2 += std::pow(headI, q / r) * om[k + 1];
        double inner = 0;
        for (std::size_t i = 0; i <= k; ++i) {
            double hs = 0;
            for (std::size_t j = i; j <= k; ++j) hs += hk[j + 1];
            inner += std::pow(hs, r) * dk[i];
        }
        s3 += std::pow(inner, q / r) * om[k + 1];
        double tail = 0;
        for (std::size_t i = k; i + 1 < K; ++i) tail += hk[i + 1];
        s4 += std::pow(tail, q) * wk[k];
    }
    out.m1 = std::pow(s1, 1 / q);
    out.m2 = std::pow(s2, 1 / q);
    out.m3 = std::pow(s3, 1 / q);
    out.m4 = std::pow(s4, 1 / q);
    out.rhs = std::pow(rhs, 1 / p);
    for (double v : {out.m1, out.m2, out.m3, out.m4, out.rhs})
        if (!std::isfinite(v)) throw NonFinite("discretized forms produced a non-finite value");
    return out;
}

}  // namespace ggamma
