#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ggamma/errors.hpp"
#include "ggamma/grid.hpp"
#include "ggamma/params.hpp"
#include "ggamma/quadrature.hpp"
#include "ggamma/weights.hpp"

namespace ggamma {

// Integral of the tail ∫_t^L U^{-p} v, plus its behaviour near a truncated
// infinite end.  Shared by phi() and Profile.
namespace detail {

template <class F>
double tail_integral(F&& f, double t, double end, const std::vector<double>& splits, double tol)
{
    QuadOptions o;
    o.tol = tol;
    o.splits = splits;
    return integrate(f, t, end, o);
}

// Divergence heuristic for a truncated infinite interval: the last decade
// contributes about as much as the one before it.
template <class F>
void check_truncated_tail(F&& f, const Domain& d, const std::vector<double>& splits, double tol, const char* what)
{
    if (!d.infinite()) return;
    const double Lt = d.effective();
    const double last = tail_integral(f, Lt / 10, Lt, splits, tol);
    const double prev = tail_integral(f, Lt / 100, Lt / 10, splits, tol);
    if (last > 0 && last >= 0.8 * prev) {
        std::ostringstream os;
        os << what << " does not decay at the truncation point " << Lt << " (last decade " << last
           << ", previous " << prev << ")";
        throw NonFinitePhi(os.str());
    }
}

}  // namespace detail

struct PhiParts {
    double U, V, T, value;  // value = V + U^p T
};

inline PhiParts phi_parts(const ParamTriple& par, const WeightSet& ws, double t, double tol = default_quad_tol)
{
    const Domain& d = ws.domain();
    const double p = par.p;
    auto g = [&](double s) { return std::pow(ws.u.primitive(s), -p) * ws.v(s); };
    const auto br = ws.breakpoints();
    detail::check_truncated_tail(g, d, br, tol, "the integral of U^-p v");
    PhiParts r;
    r.U = ws.u.primitive(t);
    r.V = ws.v.primitive(t);
    r.T = detail::tail_integral(g, t, d.effective(), br, tol);
    r.value = r.V + std::pow(r.U, p) * r.T;
    if (!std::isfinite(r.value) || !(r.value > 0)) {
        std::ostringstream os;
        os << "phi(" << t << ") = " << r.value;
        throw NonFinitePhi(os.str());
    }
    return r;
}

// φ(t) = V(t) + U(t)^p ∫_t^L U^{-p} v
inline double phi(const ParamTriple& par, const WeightSet& ws, double t, double tol = default_quad_tol)
{
    return phi_parts(par, ws, t, tol).value;
}

// The defining min-kernel form, for cross-checking the split form.
inline double phi_min_kernel(const ParamTriple& par, const WeightSet& ws, double t, double tol = default_quad_tol)
{
    const double p = par.p, Ut = std::pow(ws.u.primitive(t), p);
    QuadOptions o;
    o.tol = tol;
    o.splits = ws.breakpoints();
    o.splits.push_back(t);
    auto f = [&](double s) {
        const double Us = std::pow(ws.u.primitive(s), p);
        return std::min(Ut, Us) * ws.v(s) / Us;
    };
    return integrate(f, 0.0, ws.domain().effective(), o);
}

// σ(t) = φ^{-r/(p-r)-2} V T U^{p-1} u
inline double sigma(const ParamTriple& par, const WeightSet& ws, double t, double tol = default_quad_tol)
{
    const double p = par.p, r = par.r;
    if (p == r) throw ExponentDegenerate("sigma needs p != r");
    const PhiParts f = phi_parts(par, ws, t, tol);
    return std::pow(f.value, -r / (p - r) - 2) * f.V * f.T * std::pow(f.U, p - 1) * ws.u(t);
}

// Tabulated primitives and tails on a node set that contains the grid, all
// weight breakpoints and a geometric extension towards 0.  Values between
// nodes come from an 8-point Gauss panel on the partial cell.
class Profile {
public:
    struct Options {
        double quad_tol = default_quad_tol;
        double extension = 1e-6;  // nodes continue down to grid_min * extension
        int per_decade = 16;
    };

    Profile(const ParamTriple& par, const WeightSet& ws, const Grid& grid) : Profile(par, ws, grid, Options{}) {}

    Profile(const ParamTriple& par, const WeightSet& ws, const Grid& grid, const Options& opt)
        : par_(par), ws_(ws), opt_(opt), end_(ws.domain().effective())
    {
        validate(par_);
        build_nodes(grid);
        const std::size_t n = x_.size();
        U_.resize(n);
        D_.resize(n);
        V_.resize(n);
        W_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            U_[i] = ws_.u.primitive(x_[i]);
            D_[i] = ws_.delta.primitive(x_[i]);
            V_[i] = ws_.v.primitive(x_[i]);
            W_[i] = ws_.w.primitive(x_[i]);
        }
        detail::check_truncated_tail([this](double s) { return t_density(s); }, ws_.domain(), ws_.breakpoints(),
                                     opt_.quad_tol, "the integral of U^-p v");
        T_ = right_cumulative([this](double s) { return t_density(s); });
        Om_ = right_cumulative([this](double s) { return omega_density(s); });
        if (par_.q < 1) G7_ = right_cumulative([this](double s) { return g7_density(s); });
        if (par_.r < 1) K_ = left_cumulative([this](double s) { return k_density(s); });
        Phi_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            Phi_[i] = V_[i] + std::pow(U_[i], par_.p) * T_[i];
            if (!std::isfinite(Phi_[i]) || !(Phi_[i] > 0)) {
                std::ostringstream os;
                os << "phi(" << x_[i] << ") = " << Phi_[i];
                throw NonFinitePhi(os.str());
            }
        }
    }

    const ParamTriple& params() const { return par_; }
    const WeightSet& weights() const { return ws_; }
    double end() const { return end_; }
    double quad_tol() const { return opt_.quad_tol; }
    const std::vector<double>& nodes() const { return x_; }
    std::size_t size() const { return x_.size(); }

    // node tables
    double x(std::size_t i) const { return x_[i]; }
    double U_at(std::size_t i) const { return U_[i]; }
    double Delta_at(std::size_t i) const { return D_[i]; }
    double V_at(std::size_t i) const { return V_[i]; }
    double W_at(std::size_t i) const { return W_[i]; }
    double T_at(std::size_t i) const { return T_[i]; }
    double Omega_at(std::size_t i) const { return Om_[i]; }
    double phi_at(std::size_t i) const { return Phi_[i]; }
    double G7_at(std::size_t i) const { return G7_.at(i); }
    double K_at(std::size_t i) const { return K_.at(i); }

    // pointwise
    double U(double t) const { return ws_.u.primitive(t); }
    double Delta(double t) const { return ws_.delta.primitive(t); }
    double V(double t) const { return ws_.v.primitive(t); }
    double W(double t) const { return ws_.w.primitive(t); }
    double T(double t) const { return right_eval(T_, t, [this](double s) { return t_density(s); }); }
    double Omega(double t) const { return right_eval(Om_, t, [this](double s) { return omega_density(s); }); }
    double G7(double t) const { return right_eval(G7_, t, [this](double s) { return g7_density(s); }); }
    double K(double t) const { return left_eval(K_, t, [this](double s) { return k_density(s); }); }
    double K_end() const { return K_end_; }
    double phi(double t) const { return V(t) + std::pow(U(t), par_.p) * T(t); }
    double sigma(double t) const
    {
        const double p = par_.p, r = par_.r;
        if (p == r) throw ExponentDegenerate("sigma needs p != r");
        const double Ut = U(t), Vt = V(t), Tt = T(t);
        const double ph = Vt + std::pow(Ut, p) * Tt;
        return std::pow(ph, -r / (p - r) - 2) * Vt * Tt * std::pow(Ut, p - 1) * ws_.u(t);
    }
    // log σ(t); the power of φ over- or underflows when r is close to p
    double log_sigma(double t) const
    {
        const double p = par_.p, r = par_.r;
        if (p == r) throw ExponentDegenerate("sigma needs p != r");
        const double Ut = U(t), Vt = V(t), Tt = T(t);
        const double ph = Vt + std::pow(Ut, p) * Tt;
        return (-r / (p - r) - 2) * std::log(ph) + std::log(Vt) + std::log(Tt) + (p - 1) * std::log(Ut) +
               std::log(ws_.u(t));
    }

    // index of the last node <= t, or npos when t is below every node
    std::size_t locate(double t) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        if (it == x_.begin()) return npos;
        return static_cast<std::size_t>(it - x_.begin()) - 1;
    }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // ∫_a^b f for a cell-interior piece; f must be smooth on (a, b)
    template <class F>
    double panel(F&& f, double a, double b) const
    {
        if (!(b > a)) return 0.0;
        if (a > 0 && b / a <= 1.5) {
            static const GaussRule g = gauss_legendre(8);
            const double c = 0.5 * (a + b), h = 0.5 * (b - a);
            double s = 0;
            for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(c + h * g.x[k]);
            return s * h;
        }
        return integrate(f, a, b, opt_.quad_tol);
    }

    double t_density(double s) const { return std::pow(ws_.u.primitive(s), -par_.p) * ws_.v(s); }
    double omega_density(double s) const
    {
        return std::pow(ws_.delta.primitive(s), -par_.q / par_.r) * ws_.w(s);
    }
    double g7_density(double s) const
    {
        const double e = par_.q / (1 - par_.q);
        return std::pow(ws_.w.primitive(s) / ws_.u.primitive(s), e) * ws_.w(s);
    }
    double k_density(double s) const
    {
        const double e = par_.r / (1 - par_.r);
        return std::pow(ws_.delta.primitive(s) / ws_.u.primitive(s), e) * ws_.delta(s);
    }

private:
    ParamTriple par_;
    WeightSet ws_;
    Options opt_;
    double end_;
    std::vector<double> x_, U_, D_, V_, W_, T_, Om_, G7_, K_, Phi_;
    double K_end_ = 0;  // ∫ k from the first node to the end of the interval

    void build_nodes(const Grid& grid)
    {
        if (grid.points.empty()) throw BadCount("empty grid");
        x_ = grid.points;
        for (double b : ws_.breakpoints()) x_.push_back(b);
        const double lo = grid.points.front();
        const int ext = static_cast<int>(std::ceil(-std::log10(opt_.extension) * opt_.per_decade));
        for (int k = 1; k <= ext; ++k) x_.push_back(lo * std::pow(10.0, -static_cast<double>(k) / opt_.per_decade));
        std::sort(x_.begin(), x_.end());
        x_.erase(std::unique(x_.begin(), x_.end()), x_.end());
        x_.erase(std::remove_if(x_.begin(), x_.end(), [this](double t) { return !(t > 0 && t < end_); }), x_.end());
        if (x_.size() < 2) throw BadCount("profile needs at least two nodes inside (0, L)");
    }

    template <class F>
    std::vector<double> right_cumulative(F f) const
    {
        const std::size_t n = x_.size();
        std::vector<double> c(n);
        c[n - 1] = integrate(f, x_[n - 1], end_, opt_.quad_tol);
        for (std::size_t i = n - 1; i-- > 0;) c[i] = c[i + 1] + integrate(f, x_[i], x_[i + 1], opt_.quad_tol);
        return c;
    }

    template <class F>
    std::vector<double> left_cumulative(F f)
    {
        const std::size_t n = x_.size();
        std::vector<double> c(n);
        c[0] = 0;
        for (std::size_t i = 1; i < n; ++i) c[i] = c[i - 1] + integrate(f, x_[i - 1], x_[i], opt_.quad_tol);
        K_end_ = c[n - 1] + integrate(f, x_[n - 1], end_, opt_.quad_tol);
        return c;
    }

    template <class F>
    double right_eval(const std::vector<double>& c, double t, F f) const
    {
        if (c.empty()) throw OutOfScope("table not built for these exponents");
        if (!(t < end_)) return 0.0;
        const std::size_t i = locate(t);
        if (i == npos) return c[0] + integrate(f, t, x_[0], opt_.quad_tol);
        if (x_[i] == t) return c[i];
        if (i + 1 == x_.size()) return integrate(f, t, end_, opt_.quad_tol);
        return c[i + 1] + panel(f, t, x_[i + 1]);
    }

    template <class F>
    double left_eval(const std::vector<double>& c, double t, F f) const
    {
        if (c.empty()) throw OutOfScope("table not built for these exponents");
        if (!(t < end_)) return K_end_;
        const std::size_t i = locate(t);
        if (i == npos) return -integrate(f, t, x_[0], opt_.quad_tol);
        if (x_[i] == t) return c[i];
        if (i + 1 == x_.size()) return c[i] + integrate(f, x_[i], t, opt_.quad_tol);
        return c[i] + panel(f, x_[i], t);
    }
};

}  // namespace ggamma
