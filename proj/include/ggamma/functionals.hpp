#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/errors.hpp"
#include "ggamma/grid.hpp"
#include "ggamma/params.hpp"
#include "ggamma/profile.hpp"
#include "ggamma/weights.hpp"

namespace ggamma {

struct BValue {
    int index = 0;
    double value = 0;
    double argmax = 0;
    bool limit_used = false;       // value is an extrapolated endpoint limit
    bool limit_converged = true;
};

namespace detail {

inline void require_exponents(int index, const ParamTriple& t)
{
    auto need = [&](bool ok, const char* why) {
        if (!ok) {
            std::ostringstream os;
            os << "B" << index << " needs " << why;
            throw OutOfScope(os.str());
        }
    };
    switch (index) {
    case 3: need(t.r < 1, "r < 1"); break;
    case 4: need(t.r < t.p, "r < p"); break;
    case 5: need(t.r < 1 && t.r < t.p, "r < 1 and r < p"); break;
    case 6: need(t.q < 1, "q < 1"); break;
    case 7: need(t.q < 1, "q < 1"); break;
    case 8: need(t.q < 1 && t.r < 1, "q < 1 and r < 1"); break;
    default: break;
    }
}

// Pointwise quantities B1, B2, B7.
inline double b_pointwise(int index, const Profile& pr, double t)
{
    const ParamTriple& k = pr.params();
    const double ph = pr.phi(t);
    switch (index) {
    case 1: return std::pow(pr.W(t), 1 / k.q) * std::pow(ph, -1 / k.p);
    case 2: return std::pow(pr.Delta(t), 1 / k.r) * std::pow(ph, -1 / k.p) * std::pow(pr.Omega(t), 1 / k.q);
    case 7: return pr.U(t) * std::pow(ph, -1 / k.p) * std::pow(pr.G7(t), (1 - k.q) / k.q);
    }
    return 0;
}

// B3 integrand at t: Ω(t)^{1/q} sup_{s<t} U φ^{-1/p} (∫_s^t k)^{(1-r)/r}
class B3Eval {
public:
    explicit B3Eval(const Profile& pr) : pr_(pr), a_(pr.size())
    {
        const ParamTriple& k = pr.params();
        for (std::size_t i = 0; i < pr.size(); ++i) a_[i] = pr.U_at(i) * std::pow(pr.phi_at(i), -1 / k.p);
    }
    double operator()(double t) const
    {
        const ParamTriple& k = pr_.params();
        const std::size_t j = pr_.locate(t);
        if (j == Profile::npos) return 0;
        const double Kt = pr_.K(t), g = (1 - k.r) / k.r;
        double m = 0;
        for (std::size_t i = 0; i <= j; ++i) {
            const double d = Kt - pr_.K_at(i);
            if (d > 0) m = std::max(m, a_[i] * std::pow(d, g));
        }
        return std::pow(pr_.Omega(t), 1 / k.q) * m;
    }

private:
    const Profile& pr_;
    std::vector<double> a_;
};

// B4 integrand at t: Ω^{1/q} (∫_0^t σ U^e sup_{(s,t)} Δ^{p/(p-r)} U^{-e} ds)^{1/e}, e = pr/(p-r).
// Inside a cell the inner sup is max(D(s), sup over the cells to the right),
// with D taken monotone across one cell.
class B4Eval {
public:
    explicit B4Eval(const Profile& pr) : pr_(pr), P_(pr.size() - 1), Q_(pr.size() - 1), D_(pr.size())
    {
        const ParamTriple& k = pr.params();
        e_ = k.p * k.r / (k.p - k.r);
        for (std::size_t i = 0; i < pr.size(); ++i) D_[i] = dfun(pr.Delta_at(i), pr.U_at(i));
        for (std::size_t i = 0; i + 1 < pr.size(); ++i) {
            P_[i] = pr.panel(Density{this, false}, pr.x(i), pr.x(i + 1));
            Q_[i] = pr.panel(Density{this, true}, pr.x(i), pr.x(i + 1));
        }
    }
    double operator()(double t) const
    {
        const std::size_t j = pr_.locate(t);
        if (j == Profile::npos) return 0;
        double m = dfun(pr_.Delta(t), pr_.U(t));
        double sum = 0;
        if (pr_.x(j) < t) {
            const double b = std::min(t, pr_.end());
            sum = contribution(pr_.panel(Density{this, false}, pr_.x(j), b),
                               pr_.panel(Density{this, true}, pr_.x(j), b), m, std::max(D_[j], m));
            m = std::max(m, D_[j]);
        }
        for (std::size_t i = j; i-- > 0;) {
            sum += contribution(P_[i], Q_[i], m, std::max(D_[i], D_[i + 1]));
            m = std::max(m, D_[i]);
        }
        return std::pow(pr_.Omega(t), 1 / pr_.params().q) * std::pow(sum, 1 / e_);
    }

private:
    const Profile& pr_;
    double e_ = 1;
    std::vector<double> P_, Q_, D_;
    struct Density {
        const B4Eval* self;
        bool with_d;
        double operator()(double s) const
        {
            const double U = self->pr_.U(s);
            const double base = self->pr_.sigma(s) * std::pow(U, self->e_);
            return with_d ? base * self->dfun(self->pr_.Delta(s), U) : base;
        }
    };
    // ∫_cell σU^e max(D, m) given P = ∫σU^e, Q = ∫σU^e D and the cell max of D
    static double contribution(double P, double Q, double m, double dmax)
    {
        return m >= dmax ? P * m : std::max(Q, P * m);
    }
    double dfun(double Dl, double U) const
    {
        const ParamTriple& k = pr_.params();
        return std::pow(Dl, k.p / (k.p - k.r)) * std::pow(U, -e_);
    }
};

// B5 integrand at t: Ω^{1/q} (∫_0^t σ(s) I(s,t)^{p(1-r)/(p-r)} ds)^{1/e} with
// I(s,t) = (1-r)Δ(s)^{1/(1-r)} + U(s)^{r/(1-r)} ∫_s^t k.
// Summed in log space: for r near 1 or near p the individual powers leave the
// double range long before the result does.
class B5Eval {
public:
    explicit B5Eval(const Profile& pr) : pr_(pr)
    {
        const ParamTriple& k = pr.params();
        e_ = k.p * k.r / (k.p - k.r);
        beta_ = k.p * (1 - k.r) / (k.p - k.r);
        static const GaussRule g = gauss_legendre(4);
        const std::size_t n = pr.size();
        cell_start_.resize(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cell_start_[i] = pts_.size();
            const double a = pr.x(i), b = pr.x(i + 1), c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (std::size_t q = 0; q < g.x.size(); ++q) pts_.push_back(node(c + h * g.x[q], h * g.w[q]));
        }
        cell_start_[n - 1] = pts_.size();
    }
    double operator()(double t) const
    {
        const std::size_t j = pr_.locate(t);
        if (j == Profile::npos) return 0;
        const double Kt = pr_.K(t);
        std::vector<double> logs;
        const std::size_t stop = cell_start_[j];
        logs.reserve(stop + 4);
        for (std::size_t i = 0; i < stop; ++i) logs.push_back(log_term(pts_[i], Kt));
        if (pr_.x(j) < t) {
            static const GaussRule g = gauss_legendre(4);
            const double a = pr_.x(j), b = std::min(t, pr_.end()), c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (std::size_t q = 0; q < g.x.size(); ++q) logs.push_back(log_term(node(c + h * g.x[q], h * g.w[q]), Kt));
        }
        double top = -infinity;
        for (double l : logs) top = std::max(top, l);
        if (!(top > -infinity)) return 0;
        if (std::isinf(top)) return infinity;
        double sum = 0;
        for (double l : logs) sum += std::exp(l - top);
        return std::pow(pr_.Omega(t), 1 / pr_.params().q) * std::exp((top + std::log(sum)) / e_);
    }

private:
    struct Node {
        double lws, la, lb, K;  // log(weight·σ), log of the two parts of I, K(s)
    };
    const Profile& pr_;
    double e_ = 1, beta_ = 1;
    std::vector<Node> pts_;
    std::vector<std::size_t> cell_start_;

    Node node(double s, double wt) const
    {
        const double r = pr_.params().r;
        return {std::log(wt) + pr_.log_sigma(s), std::log(1 - r) + std::log(pr_.Delta(s)) / (1 - r),
                r / (1 - r) * std::log(pr_.U(s)), pr_.K(s)};
    }
    double log_term(const Node& n, double Kt) const
    {
        const double dk = Kt - n.K;
        const double lb = dk > 0 ? n.lb + std::log(dk) : -infinity;
        const double hi = std::max(n.la, lb), lo = std::min(n.la, lb);
        if (!(hi > -infinity)) return -infinity;
        return n.lws + beta_ * (hi + std::log1p(std::exp(lo - hi)));
    }
};

// B6 / B8 integrands share the measure dμ = Ω^{q/(1-q)} Δ^{-q/r} w ds = -d[(1-q) Ω^{1/(1-q)}].
// Cell masses are taken relative to Ω(t)^{1/(1-q)} so that nothing overflows;
// the caller multiplies back by Ω(t)^{1/q} after the (1-q)/q power.
class TailMeasure {
public:
    explicit TailMeasure(const Profile& pr) : pr_(pr), logom_(pr.size())
    {
        for (std::size_t i = 0; i < pr.size(); ++i) logom_[i] = std::log(pr.Omega_at(i));
    }
    double log_omega(std::size_t i) const { return i < logom_.size() ? logom_[i] : -infinity; }
    // (1-q)(Ω(a)^{1/(1-q)} - Ω(b)^{1/(1-q)}) / Ω(t)^{1/(1-q)} from log values
    double rel_mass(double log_a, double log_b, double log_t) const
    {
        const double e = 1 / (1 - pr_.params().q);
        return (1 - pr_.params().q) * (std::exp(e * (log_a - log_t)) - std::exp(e * (log_b - log_t)));
    }

private:
    const Profile& pr_;
    std::vector<double> logom_;
};

// B6 integrand at t: U φ^{-1/p} (∫_t^L dμ(s) sup_{(t,s)} Δ^{q/(r(1-q))} U^{-q/(1-q)})^{(1-q)/q}
class B6Eval {
public:
    explicit B6Eval(const Profile& pr) : pr_(pr), mu_(pr), E_(pr.size())
    {
        for (std::size_t i = 0; i < pr.size(); ++i) E_[i] = efun(pr.Delta_at(i), pr.U_at(i));
        const double Lend = pr.end() * (1 - 1e-12);
        E_end_ = efun(pr.Delta(Lend), pr.U(Lend));
    }
    double operator()(double t) const
    {
        const ParamTriple& k = pr_.params();
        const std::size_t j = pr_.locate(t);
        if (j == Profile::npos) return 0;
        const std::size_t n = pr_.size();
        auto right = [&](std::size_t i) { return i + 1 < n ? E_[i + 1] : E_end_; };
        double m = std::max(efun(pr_.Delta(t), pr_.U(t)), right(j));
        const double Om = pr_.Omega(t), lt = std::log(Om);
        double sum = mu_.rel_mass(lt, mu_.log_omega(j + 1), lt) * m;
        for (std::size_t i = j + 1; i < n; ++i) {
            m = std::max(m, right(i));
            sum += mu_.rel_mass(mu_.log_omega(i), mu_.log_omega(i + 1), lt) * m;
        }
        return pr_.U(t) * std::pow(pr_.phi(t), -1 / k.p) * std::pow(Om, 1 / k.q) * std::pow(sum, (1 - k.q) / k.q);
    }

private:
    const Profile& pr_;
    TailMeasure mu_;
    std::vector<double> E_;
    double E_end_ = 0;
    double efun(double Dl, double U) const
    {
        const ParamTriple& k = pr_.params();
        return std::pow(Dl, k.q / (k.r * (1 - k.q))) * std::pow(U, -k.q / (1 - k.q));
    }
};

// B8 integrand at t: U φ^{-1/p} (∫_t^L dμ(s) (∫_t^s k)^{q(1-r)/(r(1-q))})^{(1-q)/q}.
// 4-point Gauss in every cell; weights kept as logs relative to Ω(t)^{1/(1-q)}.
class B8Eval {
public:
    explicit B8Eval(const Profile& pr) : pr_(pr)
    {
        const std::size_t n = pr.size();
        cell_start_.resize(n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            cell_start_[i] = pts_.size();
            const double b = i + 1 < n ? pr.x(i + 1) : pr.end();
            add_cell(pr.x(i), b);
        }
        cell_start_[n] = pts_.size();
    }
    double operator()(double t) const
    {
        const ParamTriple& k = pr_.params();
        const std::size_t j = pr_.locate(t);
        if (j == Profile::npos || !(t < pr_.end())) return 0;
        const double g = k.q * (1 - k.r) / (k.r * (1 - k.q));
        const double Kt = pr_.K(t), Om = pr_.Omega(t), lt = std::log(Om) / (1 - k.q);
        double sum = 0;
        auto add = [&](const Node& nd) {
            const double d = nd.K - Kt;
            if (d > 0) sum += std::exp(nd.logw - lt) * std::pow(d, g);
        };
        const double b = j + 1 < pr_.size() ? pr_.x(j + 1) : pr_.end();
        for (const Node& nd : cell(t, b)) add(nd);
        for (std::size_t i = cell_start_[j + 1]; i < pts_.size(); ++i) add(pts_[i]);
        return pr_.U(t) * std::pow(pr_.phi(t), -1 / k.p) * std::pow(Om, 1 / k.q) * std::pow(sum, (1 - k.q) / k.q);
    }

private:
    struct Node {
        double logw, K;  // log of quadrature weight times dμ/ds; ∫_{x_0}^s k
    };
    const Profile& pr_;
    std::vector<Node> pts_;
    std::vector<std::size_t> cell_start_;

    std::vector<Node> cell(double a, double b) const
    {
        static const GaussRule g = gauss_legendre(4);
        const double q = pr_.params().q;
        std::vector<Node> out;
        if (!(b > a)) return out;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            const double s = c + h * g.x[k];
            const double lw = std::log(h * g.w[k] * pr_.omega_density(s)) + q / (1 - q) * std::log(pr_.Omega(s));
            out.push_back({lw, pr_.K(s)});
        }
        return out;
    }
    void add_cell(double a, double b)
    {
        for (const Node& nd : cell(a, b)) pts_.push_back(nd);
    }
};

}  // namespace detail

inline BValue compute_B(int index, const Profile& pr, const Grid& grid, const EsupOptions& base = {})
{
    if (index < 1 || index > 8) {
        std::ostringstream os;
        os << "B index " << index << " outside 1..8";
        throw OutOfScope(os.str());
    }
    const ParamTriple& k = pr.params();
    detail::require_exponents(index, k);
    EsupOptions o = base;
    const double L = pr.end();
    EsupResult res;
    auto run = [&](auto&& f) { res = esup_detailed(f, 0.0, L, grid, o); };
    if (index == 1 || index == 2 || index == 7) {
        o.limit_left = true;
        o.right_end = pr.weights().domain().infinite() ? 0.0 : L;
        run([&](double t) { return detail::b_pointwise(index, pr, t); });
    } else {
        o.limit_left = false;
        o.right_end = 0;
        switch (index) {
        case 3: run(detail::B3Eval(pr)); break;
        case 4: run(detail::B4Eval(pr)); break;
        case 5: run(detail::B5Eval(pr)); break;
        case 6: run(detail::B6Eval(pr)); break;
        case 8: run(detail::B8Eval(pr)); break;
        }
    }
    // a strictly growing, non-extrapolable endpoint sequence far above the
    // grid maximum is read as divergence
    if (res.limit_used && !res.limit_converged && res.value > 1e3 * res.grid_value) res.value = infinity;
    if (std::isnan(res.value)) {
        std::ostringstream os;
        os << "B" << index << " evaluated to NaN near t = " << res.argmax;
        throw NonFinite(os.str());
    }
    return {index, res.value, res.argmax, res.limit_used, res.limit_converged};
}

inline double compute_B(int index, const ParamTriple& par, const WeightSet& ws, const Grid& grid,
                        const EsupOptions& o = {}, double quad_tol = default_quad_tol)
{
    Profile::Options po;
    po.quad_tol = quad_tol;
    const Profile pr(par, ws, grid, po);
    return compute_B(index, pr, grid, o).value;
}

// Original four-weight embedding data.
struct OriginalParams {
    OriginalExponents exps;
    Weight w1, w2, delta1, delta2;
};

// Original embedding data to the reduced form: u = δ1, δ = δ2, v = w1, w = w2.
inline std::pair<ParamTriple, WeightSet> reduce_parameters(const OriginalParams& o)
{
    return {reduce_exponents(o.exps), WeightSet(o.delta1, o.delta2, o.w1, o.w2)};
}

}  // namespace ggamma
