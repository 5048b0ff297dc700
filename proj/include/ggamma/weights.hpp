#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/domain.hpp"
#include "ggamma/errors.hpp"
#include "ggamma/grid.hpp"
#include "ggamma/quadrature.hpp"

namespace ggamma {

enum class WeightKind { power, powerlog, piecewise, table };

inline const char* to_string(WeightKind k)
{
    switch (k) {
    case WeightKind::power: return "power";
    case WeightKind::powerlog: return "powerlog";
    case WeightKind::piecewise: return "piecewise";
    case WeightKind::table: return "table";
    }
    return "?";
}

// power:     scale * t^alpha
// powerlog:  scale * t^alpha * (1 + |log t|)^beta
// piecewise: scale * values[i] on (breaks[i-1], breaks[i]), values.size() == breaks.size() + 1
// table:     scale * linear interpolation of (points, values), constant outside the samples
struct WeightSpec {
    WeightKind kind = WeightKind::power;
    double alpha = 0;
    double beta = 0;
    std::vector<double> breaks;
    std::vector<double> points;
    std::vector<double> values;
    double scale = 1;

    static WeightSpec power(double a, double s = 1) { return {WeightKind::power, a, 0, {}, {}, {}, s}; }
    static WeightSpec powerlog(double a, double b, double s = 1)
    {
        return {WeightKind::powerlog, a, b, {}, {}, {}, s};
    }
    static WeightSpec piecewise(std::vector<double> br, std::vector<double> vals, double s = 1)
    {
        return {WeightKind::piecewise, 0, 0, std::move(br), {}, std::move(vals), s};
    }
    static WeightSpec table(std::vector<double> pts, std::vector<double> vals, double s = 1)
    {
        return {WeightKind::table, 0, 0, {}, std::move(pts), std::move(vals), s};
    }
    bool operator==(const WeightSpec&) const = default;
};

class Weight {
public:
    Weight() : Weight(WeightSpec::power(0), Domain(1.0)) {}

    // Structural checks only; admissibility is the job of make_weight / check_admissible.
    Weight(WeightSpec spec, Domain dom) : spec_(std::move(spec)), dom_(dom)
    {
        if (!std::isfinite(spec_.scale)) throw InadmissibleSpec("scale must be finite");
        switch (spec_.kind) {
        case WeightKind::power:
            if (!std::isfinite(spec_.alpha)) throw InadmissibleSpec("alpha must be finite");
            break;
        case WeightKind::powerlog:
            if (!std::isfinite(spec_.alpha) || !std::isfinite(spec_.beta))
                throw InadmissibleSpec("alpha and beta must be finite");
            if (spec_.alpha > -1) build_powerlog_table();
            break;
        case WeightKind::piecewise:
            if (spec_.values.size() != spec_.breaks.size() + 1)
                throw InadmissibleSpec("piecewise weight needs one more value than breakpoints");
            if (!std::is_sorted(spec_.breaks.begin(), spec_.breaks.end()) ||
                std::adjacent_find(spec_.breaks.begin(), spec_.breaks.end()) != spec_.breaks.end())
                throw InadmissibleSpec("piecewise breakpoints must be strictly increasing");
            if (!spec_.breaks.empty() && !(spec_.breaks.front() > 0))
                throw InadmissibleSpec("piecewise breakpoints must lie in (0, L)");
            cumulative_.assign(1, 0.0);
            for (std::size_t i = 0; i < spec_.breaks.size(); ++i) {
                const double lo = i == 0 ? 0.0 : spec_.breaks[i - 1];
                cumulative_.push_back(cumulative_.back() + spec_.values[i] * (spec_.breaks[i] - lo));
            }
            break;
        case WeightKind::table:
            if (spec_.points.empty() || spec_.points.size() != spec_.values.size())
                throw InadmissibleSpec("table weight needs matching nonempty points and values");
            if (!std::is_sorted(spec_.points.begin(), spec_.points.end()) ||
                std::adjacent_find(spec_.points.begin(), spec_.points.end()) != spec_.points.end() ||
                !(spec_.points.front() > 0))
                throw InadmissibleSpec("table points must be positive and strictly increasing");
            cumulative_.assign(1, spec_.values[0] * spec_.points[0]);
            for (std::size_t i = 0; i + 1 < spec_.points.size(); ++i)
                cumulative_.push_back(cumulative_.back() + 0.5 * (spec_.values[i] + spec_.values[i + 1]) *
                                                               (spec_.points[i + 1] - spec_.points[i]));
            break;
        }
    }

    const WeightSpec& spec() const { return spec_; }
    const Domain& domain() const { return dom_; }

    double operator()(double t) const { return value_right(t); }
    double value(double t) const { return value_right(t); }
    double value_right(double t) const { return spec_.scale * raw(t, false); }
    double value_left(double t) const { return spec_.scale * raw(t, true); }

    // int_0^t of the weight; +inf when the weight is not integrable at 0.
    double primitive(double t) const
    {
        if (!(t > 0)) return 0.0;
        return spec_.scale * raw_primitive(t);
    }

    // Points where the weight is not smooth.
    std::vector<double> breakpoints() const
    {
        std::vector<double> b;
        const double Le = dom_.effective();
        auto keep = [&](double x) {
            if (x > 0 && x < Le) b.push_back(x);
        };
        if (spec_.kind == WeightKind::piecewise)
            for (double x : spec_.breaks) keep(x);
        if (spec_.kind == WeightKind::table)
            for (double x : spec_.points) keep(x);
        if (spec_.kind == WeightKind::powerlog) keep(1.0);
        return b;
    }

    Weight scaled(double factor) const
    {
        Weight c = *this;
        c.spec_.scale *= factor;
        return c;
    }

    bool operator==(const Weight& o) const { return spec_ == o.spec_ && dom_ == o.dom_; }

private:
    WeightSpec spec_;
    Domain dom_;
    std::vector<double> cumulative_;  // piecewise / table / powerlog node primitives (unscaled)
    static constexpr double pl_step = 0.125;
    static constexpr int pl_lo = -640;  // node index of exp(-80)

    double raw(double t, bool left) const
    {
        switch (spec_.kind) {
        case WeightKind::power: return std::pow(t, spec_.alpha);
        case WeightKind::powerlog:
            return std::pow(t, spec_.alpha) * std::pow(1 + std::abs(std::log(t)), spec_.beta);
        case WeightKind::piecewise: {
            const auto& br = spec_.breaks;
            auto it = left ? std::lower_bound(br.begin(), br.end(), t) : std::upper_bound(br.begin(), br.end(), t);
            return spec_.values[static_cast<std::size_t>(it - br.begin())];
        }
        case WeightKind::table: {
            const auto& x = spec_.points;
            const auto& y = spec_.values;
            if (t <= x.front()) return y.front();
            if (t >= x.back()) return y.back();
            const auto i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
            const double s = (t - x[i]) / (x[i + 1] - x[i]);
            return y[i] + s * (y[i + 1] - y[i]);
        }
        }
        return 0;
    }

    double pl_node(int j) const { return std::exp(pl_step * j); }

    void build_powerlog_table()
    {
        auto f = [this](double s) { return raw(s, false); };
        const int hi = static_cast<int>(std::ceil(std::log(dom_.effective()) / pl_step)) + 1;
        cumulative_.clear();
        cumulative_.push_back(integrate(f, 0.0, pl_node(pl_lo)));
        for (int j = pl_lo; j < hi; ++j)
            cumulative_.push_back(cumulative_.back() + integrate(f, pl_node(j), pl_node(j + 1)));
    }

    double raw_primitive(double t) const
    {
        switch (spec_.kind) {
        case WeightKind::power:
            if (spec_.alpha <= -1) return infinity;
            return std::pow(t, spec_.alpha + 1) / (spec_.alpha + 1);
        case WeightKind::powerlog: {
            if (spec_.alpha <= -1) return infinity;
            auto f = [this](double s) { return raw(s, false); };
            const double x = std::log(t) / pl_step;
            if (x < pl_lo) return integrate(f, 0.0, t);
            const int j = std::min(static_cast<int>(std::floor(x)), pl_lo + static_cast<int>(cumulative_.size()) - 1);
            const auto idx = static_cast<std::size_t>(j - pl_lo);
            if (idx + 1 >= cumulative_.size()) {
                const double base = pl_node(pl_lo + static_cast<int>(cumulative_.size()) - 1);
                return cumulative_.back() + integrate(f, base, t);
            }
            return cumulative_[idx] + integrate(f, pl_node(j), t);
        }
        case WeightKind::piecewise: {
            const auto& br = spec_.breaks;
            const auto i = static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), t) - br.begin());
            const double lo = i == 0 ? 0.0 : br[i - 1];
            return cumulative_[i] + spec_.values[i] * (t - lo);
        }
        case WeightKind::table: {
            const auto& x = spec_.points;
            const auto& y = spec_.values;
            if (t <= x.front()) return y.front() * t;
            if (t >= x.back()) return cumulative_.back() + y.back() * (t - x.back());
            const auto i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
            const double yt = y[i] + (t - x[i]) / (x[i + 1] - x[i]) * (y[i + 1] - y[i]);
            return cumulative_[i] + 0.5 * (y[i] + yt) * (t - x[i]);
        }
        }
        return 0;
    }
};

inline Weight make_weight(const WeightSpec& spec, const Domain& dom)
{
    auto bad = [](const std::string& m) { throw InadmissibleSpec(m); };
    if (!(spec.scale > 0)) bad("scale must be positive");
    switch (spec.kind) {
    case WeightKind::power:
    case WeightKind::powerlog:
        if (!(spec.alpha > -1)) {
            std::ostringstream os;
            os << "exponent alpha = " << spec.alpha << " <= -1 makes the primitive diverge at 0";
            bad(os.str());
        }
        break;
    case WeightKind::piecewise:
        for (double v : spec.values)
            if (!(v > 0) || !std::isfinite(v)) bad("piecewise values must be positive");
        break;
    case WeightKind::table:
        for (double v : spec.values)
            if (!(v > 0) || !std::isfinite(v)) bad("tabulated values must be positive");
        break;
    }
    return Weight(spec, dom);
}

inline double primitive(const Weight& w, double t) { return w.primitive(t); }

struct WeightSet {
    Weight u, delta, v, w;

    WeightSet() = default;
    WeightSet(Weight u_, Weight delta_, Weight v_, Weight w_)
        : u(std::move(u_)), delta(std::move(delta_)), v(std::move(v_)), w(std::move(w_))
    {
        const Domain& d = u.domain();
        if (!(delta.domain() == d && v.domain() == d && w.domain() == d))
            throw InadmissibleSpec("all four weights must share one domain");
    }
    const Domain& domain() const { return u.domain(); }

    std::vector<double> breakpoints() const
    {
        std::vector<double> b;
        for (const Weight* x : {&u, &delta, &v, &w}) {
            auto bx = x->breakpoints();
            b.insert(b.end(), bx.begin(), bx.end());
        }
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }
    bool operator==(const WeightSet&) const = default;
};

inline WeightSet unit_weights(const Domain& dom = Domain(1.0))
{
    const Weight one = make_weight(WeightSpec::power(0), dom);
    return {one, one, one, one};
}

struct AdmissibilityReport {
    bool ok = true;
    std::vector<std::string> failures;
};

inline AdmissibilityReport check_admissible(const WeightSet& ws, const Grid& grid)
{
    AdmissibilityReport rep;
    const char* names[] = {"u", "delta", "v", "w"};
    const Weight* ptr[] = {&ws.u, &ws.delta, &ws.v, &ws.w};
    for (int k = 0; k < 4; ++k) {
        const Weight& wt = *ptr[k];
        auto flag = [&](const std::string& what, double t, double val) {
            std::ostringstream os;
            os << names[k] << ": " << what << " at t = " << t << " (" << val << ")";
            rep.failures.push_back(os.str());
            rep.ok = false;
        };
        std::vector<double> probe = grid.points;
        if (wt.spec().kind == WeightKind::table) probe.insert(probe.end(), wt.spec().points.begin(), wt.spec().points.end());
        bool pos_bad = false;
        for (double t : probe) {
            const double x = wt(t);
            if (!(x > 0) || !std::isfinite(x)) {
                flag("weight not positive", t, x);
                pos_bad = true;
                break;
            }
        }
        if (pos_bad) continue;
        for (double t : grid.points) {
            double P;
            try {
                P = wt.primitive(t);
            } catch (const Error& e) {
                flag(std::string("primitive failed: ") + e.what(), t, 0);
                break;
            }
            if (!std::isfinite(P) || !(P > 0)) {
                flag("primitive not finite and positive", t, P);
                break;
            }
        }
    }
    return rep;
}

}  // namespace ggamma
