#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggamma/covering.hpp"
#include "ggamma/discrete.hpp"
#include "ggamma/functionals.hpp"
#include "ggamma/oracle.hpp"
#include "ggamma/parallel.hpp"

namespace ggamma {

struct ReportSettings {
    int grid_n = 512;
    GridMode grid_mode = GridMode::logarithmic;
    double esup_tol = default_esup_tol;
    double quad_tol = default_quad_tol;
    double a = default_covering_a;
    OracleBudget budget;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool discrete = true;     // also evaluate the discrete constants of the case
    bool alternates = true;   // on a case boundary, also sum the neighbouring cases' B's
    bool operator==(const ReportSettings&) const = default;
};

struct EmbeddingReport {
    ParamTriple params;
    CaseId case_id;
    std::map<int, BValue> b_values;
    double b_sum = 0;
    bool b_sum_infinite = false;
    std::map<std::string, double> c_values;  // discrete constants of the case
    CEstimate c_estimate;
    double ratio = 0;  // NaN when b_sum is infinite
    std::map<std::string, double> alternate_b_sums;
    std::optional<double> tail_change;  // relative change of b_sum when the truncation shrinks tenfold
    bool unbounded_consistent = false;
    std::vector<std::string> flags;
    ReportSettings settings;
    Domain domain;
};

namespace detail {

inline std::map<int, BValue> b_values_for(const std::vector<int>& idx, const ParamTriple& par, const WeightSet& ws,
                                          const ReportSettings& s)
{
    const Grid grid = build_grid(ws.domain(), s.grid_n, s.grid_mode);
    Profile::Options po;
    po.quad_tol = s.quad_tol;
    const Profile pr(par, ws, grid, po);
    EsupOptions eo;
    eo.tol = s.esup_tol;
    auto vals = parallel_map(idx.size(), s.jobs, [&](std::size_t i) { return compute_B(idx[i], pr, grid, eo); });
    std::map<int, BValue> out;
    for (auto& v : vals) out[v.index] = v;
    return out;
}

inline double sum_of(const std::map<int, BValue>& b)
{
    double s = 0;
    for (const auto& [k, v] : b) s += v.value;
    return s;
}

inline constexpr double boundary_nudge = 1e-3;

inline std::optional<ParamTriple> nudge_into(const ParamTriple& t, Case c)
{
    for (double dr : {-boundary_nudge, boundary_nudge, 0.0})
        for (double dq : {0.0, -boundary_nudge, boundary_nudge}) {
            const ParamTriple m{t.p, t.q * (1 + dq), t.r * (1 + dr)};
            if (m.p <= m.q && strict_case(m.p, m.q, m.r) == c) return m;
        }
    return std::nullopt;
}

inline WeightSet retruncated(const WeightSet& ws, double trunc)
{
    const Domain d = ws.domain().truncated_at(trunc);
    return {make_weight(ws.u.spec(), d), make_weight(ws.delta.spec(), d), make_weight(ws.v.spec(), d),
            make_weight(ws.w.spec(), d)};
}

}  // namespace detail

inline EmbeddingReport embedding_constant_bounds(const ParamTriple& par, const WeightSet& ws,
                                                 const ReportSettings& s = {})
{
    EmbeddingReport rep;
    rep.params = par;
    rep.settings = s;
    rep.domain = ws.domain();
    rep.case_id = classify_case(par);

    rep.b_values = detail::b_values_for(rep.case_id.required, par, ws, s);
    rep.b_sum = detail::sum_of(rep.b_values);
    rep.b_sum_infinite = !std::isfinite(rep.b_sum);
    for (const auto& [k, v] : rep.b_values) {
        if (!std::isfinite(v.value)) rep.flags.push_back("B" + std::to_string(k) + " infinite");
        else if (v.limit_used && !v.limit_converged)
            rep.flags.push_back("B" + std::to_string(k) + " endpoint limit not converged");
    }

    if (s.alternates) {
        for (Case c : rep.case_id.alternates) {
            // the neighbouring formulas are usually undefined on the boundary itself,
            // so they are evaluated just inside their own case
            const auto moved = detail::nudge_into(par, c);
            if (!moved) continue;
            try {
                const double alt_sum = detail::sum_of(detail::b_values_for(required_B(c), *moved, ws, s));
                rep.alternate_b_sums[to_string(c)] = alt_sum;
                if (std::isfinite(alt_sum) && std::isfinite(rep.b_sum) && alt_sum > 0 && rep.b_sum > 0) {
                    const double f = std::max(alt_sum / rep.b_sum, rep.b_sum / alt_sum);
                    if (f > 100) rep.flags.push_back(std::string("alternate case ") + to_string(c) + " disagrees");
                }
            } catch (const OutOfScope&) {
            }
        }
    }

    if (ws.domain().infinite() && !rep.b_sum_infinite) {
        const WeightSet shorter = detail::retruncated(ws, ws.domain().L_trunc / 10);
        const double b10 = detail::sum_of(detail::b_values_for(rep.case_id.required, par, shorter, s));
        rep.tail_change = std::abs(rep.b_sum - b10) / rep.b_sum;
        if (*rep.tail_change > 0.01) rep.flags.push_back("truncation sensitive");
    }

    if (s.discrete) {
        const Grid grid = build_grid(ws.domain(), s.grid_n, s.grid_mode);
        Profile::Options po;
        po.quad_tol = s.quad_tol;
        const Profile pr(par, ws, grid, po);
        try {
            CoveringOptions co;
            co.infinite_end = ws.domain().infinite();
            const auto cs = build_covering_sequence([&](double t) { return pr.phi(t); },
                                                    [&](double t) { return std::pow(pr.U(t), par.p); }, s.a, grid, co);
            const DiscreteConstants dc(cs, pr);
            for (const auto& l : required_C(rep.case_id.tag)) {
                try {
                    rep.c_values[l] = dc.compute(l).value;
                } catch (const EmptyCovering&) {
                    rep.flags.push_back(l + " skipped: covering too short");
                }
            }
        } catch (const NotQuasiconcave& e) {
            rep.flags.push_back(std::string("covering skipped: ") + e.what());
        }
    }

    rep.c_estimate = estimate_C(par, ws, s.budget, s.seed, s.jobs, s.quad_tol);
    if (rep.b_sum_infinite) {
        // an infinite characterisation should come with an estimate that keeps growing
        const double start = rep.c_estimate.value;
        double last = start;
        for (auto [pieces, decades] : {std::pair{16, 8.0}, {32, 16.0}, {64, 32.0}, {128, 64.0}}) {
            OracleBudget b = s.budget;
            b.pieces = pieces;
            b.decades = decades;
            b.restarts = std::min(b.restarts, 8);
            const CEstimate e = estimate_C(par, ws, b, s.seed, s.jobs, s.quad_tol);
            last = std::max(last, e.value);
            if (e.value > rep.c_estimate.value) rep.c_estimate = e;
            if (last > 10 * start) break;
        }
        rep.unbounded_consistent = last > 10 * start;
        rep.flags.push_back(rep.unbounded_consistent ? "unbounded-consistent" : "b_sum infinite but estimate bounded");
        rep.ratio = std::nan("");
    } else {
        rep.ratio = rep.b_sum / rep.c_estimate.value;
    }
    return rep;
}

inline nlohmann::json number_or_null(double x)
{
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline nlohmann::json to_json(const EmbeddingReport& r)
{
    using nlohmann::json;
    json B = json::object();
    for (const auto& [k, v] : r.b_values) B["B" + std::to_string(k)] = number_or_null(v.value);
    json C = json::object();
    for (const auto& [k, v] : r.c_values) C[k] = number_or_null(v);
    json alt = json::object();
    for (const auto& [k, v] : r.alternate_b_sums) alt[k] = number_or_null(v);
    json alts = json::array();
    for (Case c : r.case_id.alternates) alts.push_back(to_string(c));
    const auto& w = r.c_estimate.witness;
    const auto& s = r.settings;
    return {
        {"case", to_string(r.case_id.tag)},
        {"alternates", alts},
        {"params", {{"p", r.params.p}, {"q", r.params.q}, {"r", r.params.r}}},
        {"B", B},
        {"b_sum", number_or_null(r.b_sum)},
        {"C", C},
        {"c_estimate", r.c_estimate.value},
        {"ratio", number_or_null(r.ratio)},
        {"alternate_b_sums", alt},
        {"tail_change", r.tail_change ? json(*r.tail_change) : json(nullptr)},
        {"unbounded_consistent", r.unbounded_consistent},
        {"flags", r.flags},
        {"witness", {{"edges", w.edges}, {"values", w.values}}},
        {"provenance",
         {{"grid_n", s.grid_n},
          {"grid_mode", to_string(s.grid_mode)},
          {"esup_tol", s.esup_tol},
          {"quad_tol", s.quad_tol},
          {"a", s.a},
          {"seed", s.seed},
          {"L", number_or_null(r.domain.L)},
          {"L_trunc", r.domain.L_trunc},
          {"budget",
           {{"restarts", r.c_estimate.budget.restarts},
            {"iterations", r.c_estimate.budget.iterations},
            {"pieces", r.c_estimate.budget.pieces},
            {"decades", r.c_estimate.budget.decades}}}}},
    };
}

}  // namespace ggamma
