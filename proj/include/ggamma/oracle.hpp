#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/covering.hpp"
#include "ggamma/discrete.hpp"
#include "ggamma/errors.hpp"
#include "ggamma/functionals.hpp"
#include "ggamma/optimize.hpp"
#include "ggamma/params.hpp"
#include "ggamma/profile.hpp"
#include "ggamma/quadrature.hpp"
#include "ggamma/step_function.hpp"
#include "ggamma/weights.hpp"

namespace ggamma {

// Nonincreasing profile f on (0, end) given as linear pieces; f = 0 past the
// last piece.
struct LinearPieces {
    struct Piece {
        double a, b, fa, fb;
    };
    std::vector<Piece> pieces;
};

// f(s) = ∫_s^∞ h for a step function h
inline LinearPieces tail_profile(const TestFunction& h)
{
    LinearPieces f;
    const double c0 = h.tail(0);
    if (h.edges.front() > 0) f.pieces.push_back({0, h.edges.front(), c0, c0});
    for (std::size_t j = 0; j < h.values.size(); ++j)
        f.pieces.push_back({h.edges[j], h.edges[j + 1], h.tail(h.edges[j]), h.tail(h.edges[j + 1])});
    return f;
}

// (∫_0^L ((1/Δ(t)) ∫_0^t f^r δ)^{q/r} w(t) dt)^{1/q} with Δ the primitive of
// `inner` and w = `outer`.  Constant pieces use closed forms; linear pieces
// use nested adaptive quadrature.
inline double gamma_norm(const LinearPieces& f, double r, double q, const Weight& inner, const Weight& outer,
                         double end, double tol = default_quad_tol)
{
    double I = 0, total = 0;
    double last = 0;
    for (const auto& pc : f.pieces) {
        const double a = pc.a, b = std::min(pc.b, end);
        if (!(b > a)) continue;
        last = b;
        const double Da = a > 0 ? inner.primitive(a) : 0.0;
        if (pc.fa == pc.fb) {
            const double cr = std::pow(pc.fa, r);
            if (pc.fa == 0 && I == 0) {
                // nothing accumulated yet and nothing added
            } else if (I == 0 && a == 0) {
                total += std::pow(pc.fa, q) * outer.primitive(b);
            } else {
                auto g = [&](double t) { return std::pow((I + cr * (inner.primitive(t) - Da)) / inner.primitive(t), q / r) * outer(t); };
                total += integrate(g, a, b, QuadOptions{tol, 4000, outer.breakpoints()});
            }
            I += cr * (inner.primitive(b) - Da);
        } else {
            const double slope = (pc.fb - pc.fa) / (pc.b - pc.a);
            auto fr = [&](double s) { return std::pow(std::max(pc.fa + slope * (s - a), 0.0), r) * inner(s); };
            QuadOptions io{tol * 0.1, 4000, inner.breakpoints()};
            auto g = [&](double t) { return std::pow((I + integrate(fr, a, t, io)) / inner.primitive(t), q / r) * outer(t); };
            total += integrate(g, a, b, QuadOptions{tol, 4000, outer.breakpoints()});
            I += integrate(fr, a, b, io);
        }
    }
    if (I > 0 && last < end) {
        auto g = [&](double t) { return std::pow(I / inner.primitive(t), q / r) * outer(t); };
        total += integrate(g, last, end, QuadOptions{tol, 4000, outer.breakpoints()});
    }
    const double v = std::pow(total, 1 / q);
    if (!std::isfinite(v)) throw NonFinite("functional value is not finite");
    return v;
}

inline double functional_lhs(const TestFunction& h, const ParamTriple& par, const WeightSet& ws,
                             double tol = default_quad_tol)
{
    h.validate();
    if (h.is_zero()) return 0;
    return gamma_norm(tail_profile(h), par.r, par.q, ws.delta, ws.w, ws.w.domain().effective(), tol);
}

inline double functional_rhs(const TestFunction& h, const ParamTriple& par, const WeightSet& ws,
                             double tol = default_quad_tol)
{
    h.validate();
    if (h.is_zero()) return 0;
    return gamma_norm(tail_profile(h), 1, par.p, ws.u, ws.v, ws.v.domain().effective(), tol);
}

struct OracleBudget {
    int restarts = 48;
    int iterations = 400;  // ascent sweeps per level
    int pieces = 64;
    double decades = 8;    // pieces span (end·10^-decades, end)
    bool operator==(const OracleBudget&) const = default;
};

struct CEstimate {
    double value = 0;       // lhs/rhs of the witness, recomputed with full quadrature
    double fast_value = 0;  // the optimiser's own value for that witness
    TestFunction witness;
    OracleBudget budget;
    std::uint64_t seed = 1;
};

namespace detail {

// Ratio evaluator for step functions on fixed pieces: 2 log-cells per piece,
// 2 Gauss points per cell, midpoint rule for the running inner integral.
class FastRatio {
public:
    FastRatio(const ParamTriple& par, const WeightSet& ws, std::vector<double> edges) : par_(par), e_(std::move(edges))
    {
        const double lo = e_.front();
        lhs_.init(ws.delta, ws.w, lo, par.r, par.q);
        rhs_.init(ws.u, ws.v, lo, 1.0, par.p);
        static const GaussRule g = gauss_legendre(2);
        for (std::size_t j = 0; j + 1 < e_.size(); ++j) {
            const double la = std::log(e_[j]), lb = std::log(e_[j + 1]);
            for (int c = 0; c < 2; ++c) {
                const double ca = la + (lb - la) * c / 2, cb = la + (lb - la) * (c + 1) / 2;
                const double m = 0.5 * (ca + cb), hw = 0.5 * (cb - ca);
                for (std::size_t k = 0; k < g.x.size(); ++k) {
                    const double t = std::exp(m + hw * g.x[k]), dt = hw * g.w[k] * t;
                    piece_.push_back(j);
                    t_.push_back(t);
                    lhs_.add(ws.delta, ws.w, t, dt);
                    rhs_.add(ws.u, ws.v, t, dt);
                }
            }
        }
    }

    const std::vector<double>& edges() const { return e_; }

    double operator()(const std::vector<double>& c) const
    {
        const std::size_t P = c.size();
        std::vector<double> tail(P + 1, 0.0);
        for (std::size_t j = P; j-- > 0;) tail[j] = tail[j + 1] + c[j] * (e_[j + 1] - e_[j]);
        const double den = rhs_.eval(tail, c, piece_, t_, e_);
        if (!(den > 0)) return 0;
        return lhs_.eval(tail, c, piece_, t_, e_) / den;
    }

private:
    struct Side {
        double r = 1, q = 1, Dlo = 0, Wlo = 0;
        std::vector<double> in_w, out_w, D;
        void init(const Weight& inner, const Weight& outer, double lo, double r_, double q_)
        {
            r = r_;
            q = q_;
            Dlo = inner.primitive(lo);
            Wlo = outer.primitive(lo);
        }
        void add(const Weight& inner, const Weight& outer, double t, double dt)
        {
            in_w.push_back(inner(t) * dt);
            out_w.push_back(outer(t) * dt);
            D.push_back(inner.primitive(t));
        }
        double eval(const std::vector<double>& tail, const std::vector<double>& c, const std::vector<std::size_t>& piece,
                    const std::vector<double>& t, const std::vector<double>& e) const
        {
            const double T0 = tail[0];
            double I = std::pow(T0, r) * Dlo, s = std::pow(T0, q) * Wlo;
            for (std::size_t n = 0; n < t.size(); ++n) {
                const std::size_t j = piece[n];
                const double f = tail[j + 1] + c[j] * (e[j + 1] - t[n]);
                const double inc = std::pow(f, r) * in_w[n];
                s += std::pow((I + 0.5 * inc) / D[n], q / r) * out_w[n];
                I += inc;
            }
            return std::pow(s, 1 / q);
        }
    };

    ParamTriple par_;
    std::vector<double> e_;
    std::vector<std::size_t> piece_;
    std::vector<double> t_;
    Side lhs_, rhs_;
};

inline std::vector<double> log_edges(double lo, double end, int pieces)
{
    std::vector<double> e(static_cast<std::size_t>(pieces) + 1);
    for (int j = 0; j <= pieces; ++j) e[static_cast<std::size_t>(j)] = lo * std::pow(end / lo, static_cast<double>(j) / pieces);
    e.back() = end;
    return e;
}

}  // namespace detail

// Lower bound on C by maximising lhs/rhs over step functions on a log grid of
// pieces.  Each restart climbs through piece counts 8, 16, ... up to
// budget.pieces, upsampling its optimum at every level.
inline CEstimate estimate_C(const ParamTriple& par, const WeightSet& ws, const OracleBudget& budget = {},
                            std::uint64_t seed = 1, unsigned jobs = 1, double tol = default_quad_tol)
{
    validate(par);
    if (budget.pieces < 1 || budget.restarts < 1) throw BadCount("oracle budget needs at least one piece and one restart");
    const double end = ws.w.domain().effective();
    const double lo = end * std::pow(10.0, -budget.decades);
    std::vector<int> levels;
    for (int P = std::min(8, budget.pieces); P < budget.pieces; P *= 2) levels.push_back(P);
    levels.push_back(budget.pieces);
    std::vector<detail::FastRatio> evals;
    for (int P : levels) evals.emplace_back(par, ws, detail::log_edges(lo, end, P));

    AscentOptions ao;
    ao.max_sweeps = budget.iterations;
    struct Run {
        double fast = 0;
        std::vector<double> c;
    };
    auto runs = parallel_map(static_cast<std::size_t>(budget.restarts), jobs, [&](std::size_t i) {
        std::vector<double> c = i == 0 ? std::vector<double>(static_cast<std::size_t>(levels[0]), 1.0)
                                       : log_uniform_start(static_cast<std::size_t>(levels[0]), seed + i);
        Run run;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (l > 0) {
                // each coarse piece splits into a whole number of fine pieces
                const std::size_t f = static_cast<std::size_t>(levels[l] / levels[l - 1]);
                std::vector<double> up;
                for (double v : c) up.insert(up.end(), f, v);
                up.resize(static_cast<std::size_t>(levels[l]), c.back());
                c = std::move(up);
            }
            auto res = coordinate_ascent([&](const std::vector<double>& x) { return evals[l](x); }, c, ao);
            c = std::move(res.x);
            run.fast = res.value;
        }
        run.c = std::move(c);
        return run;
    });

    CEstimate best;
    best.budget = budget;
    best.seed = seed;
    bool any = false;
    const auto& edges = evals.back().edges();
    for (const auto& run : runs) {
        TestFunction h{edges, run.c};
        const double rhs = functional_rhs(h, par, ws, tol);
        if (!(rhs > 0)) continue;
        const double v = functional_lhs(h, par, ws, tol) / rhs;
        if (!any || v > best.value) {
            best.value = v;
            best.fast_value = run.fast;
            best.witness = std::move(h);
            any = true;
        }
    }
    if (!any) throw DegenerateRatio("the right-hand side vanished for every tested function");
    return best;
}

// Both sides of the original embedding for f* and of the reduced form for
// (f*)^{r1}.  The reduced sides should equal the original ones raised to r1.
struct RearrangementSides {
    double orig_lhs = 0, orig_rhs = 0;        // target space, source space
    double reduced_lhs = 0, reduced_rhs = 0;  // after reduction
    double lhs_error = 0, rhs_error = 0;      // relative mismatch of reduced vs original^r1
};

inline RearrangementSides rearrangement_form(const TestFunction& fstar, const OriginalParams& o,
                                             double tol = default_quad_tol)
{
    fstar.validate();
    for (std::size_t j = 1; j < fstar.values.size(); ++j)
        if (fstar.values[j] > fstar.values[j - 1]) throw NotMonotone("f* must be nonincreasing");
    const auto& e = o.exps;
    const double end = o.w1.domain().effective();
    LinearPieces f, g;
    if (fstar.edges.front() > 0) {
        // f* is taken constant to the left of its first edge
        f.pieces.push_back({0, fstar.edges.front(), fstar.values[0], fstar.values[0]});
        g.pieces.push_back({0, fstar.edges.front(), std::pow(fstar.values[0], e.r1), std::pow(fstar.values[0], e.r1)});
    }
    for (std::size_t j = 0; j < fstar.values.size(); ++j) {
        const double v = fstar.values[j], vg = std::pow(v, e.r1);
        f.pieces.push_back({fstar.edges[j], fstar.edges[j + 1], v, v});
        g.pieces.push_back({fstar.edges[j], fstar.edges[j + 1], vg, vg});
    }
    RearrangementSides s;
    s.orig_lhs = gamma_norm(f, e.r2, e.q2, o.delta2, o.w2, end, tol);
    s.orig_rhs = gamma_norm(f, e.r1, e.q1, o.delta1, o.w1, end, tol);
    const auto [par, rws] = reduce_parameters(o);
    s.reduced_lhs = gamma_norm(g, par.r, par.q, rws.delta, rws.w, end, tol);
    s.reduced_rhs = gamma_norm(g, 1, par.p, rws.u, rws.v, end, tol);
    auto rel = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    s.lhs_error = rel(s.reduced_lhs, std::pow(s.orig_lhs, e.r1));
    s.rhs_error = rel(s.reduced_rhs, std::pow(s.orig_rhs, e.r1));
    return s;
}

struct DisAntidis {
    double continuous = 0, point_sum = 0, block_sum = 0;
    double ratio_cont_point = 1, ratio_point_block = 1, ratio_cont_block = 1;
};

// The three equivalent forms linking the double integral with kernel
// 1/(U(t)+U(s)) to sums over a covering sequence built for (φ, U^p).
inline DisAntidis dis_antidis_check(const TestFunction& g, const CoveringSequence& cs, const Profile& pr,
                                    double tol = default_quad_tol)
{
    g.validate();
    DisAntidis d;
    if (g.is_zero()) return d;
    const double p = pr.params().p;
    const auto& ws = pr.weights();
    const double end = pr.end();
    // ∫ g(s)/(U0 + U(s)) ds
    auto kernel = [&](double U0) {
        double s = 0;
        for (std::size_t j = 0; j < g.values.size(); ++j) {
            if (g.values[j] == 0) continue;
            s += g.values[j] * integrate([&](double x) { return 1 / (U0 + ws.u.primitive(x)); }, g.edges[j],
                                         std::min(g.edges[j + 1], end), tol);
        }
        return s;
    };
    std::vector<double> splits = ws.v.breakpoints();
    splits.insert(splits.end(), g.edges.begin(), g.edges.end());
    d.continuous = integrate([&](double t) { return std::pow(kernel(ws.u.primitive(t)), p) * ws.v(t); }, 0, end,
                             QuadOptions{tol * 10, 4000, splits});
    for (int k = cs.N; k <= cs.M(); ++k) {
        const double x = std::min(cs.x(k), end);
        if (!(x > 0)) continue;  // φ vanishes at the origin
        d.point_sum += pr.phi(x) * std::pow(kernel(ws.u.primitive(x)), p);
    }
    for (int k = cs.N + 1; k <= cs.M(); ++k) {
        const Window W(pr, cs.x(k - 1), cs.x(k), g.edges);
        const double s = W.total([&](std::size_t i) {
            const double t = W.t(i);
            return std::pow(W.phi(i), 1 / p) / pr.U(t) * g(t);
        });
        d.block_sum += std::pow(s, p);
    }
    for (double v : {d.continuous, d.point_sum, d.block_sum})
        if (!std::isfinite(v)) throw NonFinite("dis/antidiscretization form is not finite");
    auto ratio = [](double a, double b) { return b > 0 ? a / b : (a > 0 ? infinity : 1.0); };
    d.ratio_cont_point = ratio(d.continuous, d.point_sum);
    d.ratio_point_block = ratio(d.point_sum, d.block_sum);
    d.ratio_cont_block = ratio(d.continuous, d.block_sum);
    return d;
}

enum class LemmaCheck { lemma1, lemma2, lemma3, lemma4, R1R2, R3R4 };

inline const char* to_string(LemmaCheck c)
{
    switch (c) {
    case LemmaCheck::lemma1: return "lemma1";
    case LemmaCheck::lemma2: return "lemma2";
    case LemmaCheck::lemma3: return "lemma3";
    case LemmaCheck::lemma4: return "lemma4";
    case LemmaCheck::R1R2: return "R1R2";
    case LemmaCheck::R3R4: return "R3R4";
    }
    return "?";
}

inline LemmaCheck lemma_check_from_string(const std::string& s)
{
    for (auto c : {LemmaCheck::lemma1, LemmaCheck::lemma2, LemmaCheck::lemma3, LemmaCheck::lemma4, LemmaCheck::R1R2,
                   LemmaCheck::R3R4})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown lemma check '" + s + "'");
}

inline constexpr double default_K_check = 1e3;

struct LemmaEntry {
    int index = 0;         // covering index i or k
    double y = 0;          // upper integration point where relevant
    std::string test;      // which test function
    std::string direction; // "upper" (integral <= bound) or "lower"
    double lhs = 0, rhs = 0, ratio = 0;
};

struct LemmaReport {
    LemmaCheck which = LemmaCheck::lemma1;
    bool applicable = true;
    double max_ratio = 0;
    double K_check = default_K_check;
    bool pass = true;
    bool first_in_z2 = true;  // lemma3: N+1 belongs to Z2 when N is finite
    std::vector<LemmaEntry> entries;
};

namespace detail {

struct QTest {
    std::string name;
    std::function<double(double)> h;
};

// members of Q_U(0, y): U^θ for θ = 0, 1/2, 1 and min(U, U(s0))
inline std::vector<QTest> quasiconcave_tests(const Profile& pr, double s0)
{
    const double U0 = pr.U(s0);
    return {{"U^0", [](double) { return 1.0; }},
            {"U^0.5", [&pr](double t) { return std::sqrt(pr.U(t)); }},
            {"U^1", [&pr](double t) { return pr.U(t); }},
            {"min(U,U(s0))", [&pr, U0](double t) { return std::min(pr.U(t), U0); }}};
}

inline double sigma_integral(const Profile& pr, double a, double b, const std::function<double(double)>& h, double e)
{
    if (!(b > a)) return 0;
    const Window W(pr, a, b);
    return W.total([&](std::size_t i) { return pr.sigma(W.t(i)) * std::pow(h(W.t(i)), e); });
}

}  // namespace detail

// Numerical check of the σ-integral estimates used in the antidiscretization
// step, for generic quasiconcave h (lemma1..4) or the two explicit h of R1..R4.
inline LemmaReport antid_lemma_check(const CoveringSequence& cs, const Profile& pr, LemmaCheck which,
                                     double K_check = default_K_check)
{
    const double p = pr.params().p, r = pr.params().r;
    if (!(r < p)) {
        std::ostringstream os;
        os << to_string(which) << " needs r < p (p=" << p << " r=" << r << ")";
        throw OutOfScope(os.str());
    }
    if (which == LemmaCheck::R3R4 && !(r < 1)) throw OutOfScope("R3R4 needs r < 1");
    const double e = p * r / (p - r), fe = -r / (p - r);
    const int N = cs.N, M = cs.M();
    const double lo = pr.x(0);
    LemmaReport rep;
    rep.which = which;
    rep.K_check = K_check;
    auto add = [&](LemmaEntry en) {
        en.ratio = en.rhs > 0 ? en.lhs / en.rhs : (en.lhs > 0 ? infinity : 0.0);
        rep.max_ratio = std::max(rep.max_ratio, en.ratio);
        rep.entries.push_back(std::move(en));
    };
    auto bound = [&](const std::function<double(double)>& h, double t) {
        return std::pow(h(t), e) * std::pow(pr.phi(t), fe);
    };
    // sup over (lo, y] of h^e φ^{fe} on the window sample
    auto head_sup = [&](const std::function<double(double)>& h, double y) {
        if (!(y > lo)) return 0.0;
        const Window W(pr, lo, y);
        double m = 0;
        for (std::size_t i = 0; i < W.size(); ++i) m = std::max(m, std::pow(h(W.t(i)), e) * std::pow(W.phi(i), fe));
        return m;
    };
    auto x = [&](int k) { return std::max(cs.x(k), lo); };

    // two-sided sum estimate over (0, x_k) for a given h
    auto two_sided = [&](int k, const std::string& name, const std::function<double(double)>& h) {
        const double I = detail::sigma_integral(pr, lo, x(k), h, e);
        double s_lower = 0, s_upper = 0;
        for (int i = N + 1; i <= k; ++i) {
            const double b = bound(h, std::min(x(i), pr.end()));
            if (i <= k - 1) s_lower += b;
            s_upper += b;
        }
        const double head = head_sup(h, x(N + 1));
        add({k, x(k), name, "upper", I, s_upper + head, 0});
        if (k - 1 >= N + 1) add({k, x(k), name, "lower", s_lower, I, 0});
    };

    switch (which) {
    case LemmaCheck::lemma1:
    case LemmaCheck::lemma2: {
        const bool z1 = which == LemmaCheck::lemma1;
        for (int i = N + 2; i <= M; ++i) {
            if (cs.in_z1(i) != z1) continue;
            const double a = x(i - 1), b = std::min(x(i), pr.end());
            for (const auto& qt : detail::quasiconcave_tests(pr, std::sqrt(a * b)))
                for (double frac : {0.25, 0.5, 1.0}) {
                    const double y = a + frac * (b - a);
                    const double I = detail::sigma_integral(pr, a, y, qt.h, e);
                    add({i, y, qt.name, "upper", I, z1 ? bound(qt.h, y) : bound(qt.h, a), 0});
                }
        }
        break;
    }
    case LemmaCheck::lemma3: {
        if (cs.left_truncated) {
            rep.applicable = false;
            break;
        }
        rep.first_in_z2 = !cs.in_z1(N + 1);
        const double b = std::min(x(N + 1), pr.end());
        for (const auto& qt : detail::quasiconcave_tests(pr, std::sqrt(lo * b)))
            for (double frac : {1e-4, 1e-2, 0.5, 1.0}) {
                const double y = std::max(frac * b, lo * 2);
                add({N + 1, y, qt.name, "upper", detail::sigma_integral(pr, lo, y, qt.h, e), head_sup(qt.h, y), 0});
            }
        break;
    }
    case LemmaCheck::lemma4:
        for (int k = N + 1; k <= M; ++k)
            for (const auto& qt : detail::quasiconcave_tests(pr, std::sqrt(lo * std::min(x(k), pr.end()))))
                two_sided(k, qt.name, qt.h);
        break;
    case LemmaCheck::R1R2:
        for (int k = N + 1; k <= M - 1; ++k) {
            // h(t) = U(t) sup_{τ∈(t,x_k)} Δ^{1/r}/U, tabulated as a suffix max on the window sample
            const Window W(pr, lo, x(k));
            std::vector<double> ts(W.size()), sm(W.size());
            double m = 0;
            for (std::size_t i = W.size(); i-- > 0;) {
                ts[i] = W.t(i);
                m = std::max(m, std::pow(pr.Delta(ts[i]), 1 / r) / pr.U(ts[i]));
                sm[i] = m;
            }
            auto h = [&, ts, sm](double t) {
                if (t >= ts.back()) return pr.U(t) * std::pow(pr.Delta(t), 1 / r) / pr.U(t);
                const auto it = std::lower_bound(ts.begin(), ts.end(), t);
                const std::size_t i = static_cast<std::size_t>(it - ts.begin());
                double s = sm[std::min(i, sm.size() - 1)];
                s = std::max(s, std::pow(pr.Delta(t), 1 / r) / pr.U(t));
                return pr.U(t) * s;
            };
            two_sided(k, "sup-form", h);
        }
        break;
    case LemmaCheck::R3R4:
        for (int k = N + 1; k <= M - 1; ++k) {
            const double Kx = pr.K(x(k));
            auto h = [&, Kx](double t) {
                const double a = r / (1 - r);
                const double base = (1 - r) * std::pow(pr.Delta(t), 1 / (1 - r)) +
                                    std::pow(pr.U(t), a) * std::max(Kx - pr.K(t), 0.0);
                return std::pow(base, (1 - r) / r);
            };
            two_sided(k, "min-kernel", h);
        }
        break;
    }
    rep.pass = rep.max_ratio <= K_check && rep.first_in_z2;
    return rep;
}

}  // namespace ggamma
