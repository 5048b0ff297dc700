// Acceptance battery.  Prints one PASS/FAIL line per criterion, with indented
// detail lines underneath.  Arguments select criteria: "2", "5", or "1:iv" for
// one case of the bracket battery; no arguments runs everything.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/report.hpp"

using namespace ggamma;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;
};

std::string num(double x, int digits = 4)
{
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

std::string describe(const WeightSpec& s)
{
    std::ostringstream os;
    switch (s.kind) {
    case WeightKind::power: os << "t^" << s.alpha; break;
    case WeightKind::powerlog: os << "t^" << s.alpha << "(1+|log t|)^" << s.beta; break;
    case WeightKind::piecewise: {
        os << "pw{";
        for (std::size_t i = 0; i < s.values.size(); ++i) os << (i ? "," : "") << s.values[i];
        os << "}";
        break;
    }
    case WeightKind::table: os << "table"; break;
    }
    return os.str();
}

const std::vector<WeightSpec>& weight_pool()
{
    static const std::vector<WeightSpec> pool = {
        WeightSpec::power(-0.5),
        WeightSpec::power(0),
        WeightSpec::power(0.5),
        WeightSpec::power(1),
        WeightSpec::power(2),
        WeightSpec::piecewise({0.5}, {1, 3}),
        WeightSpec::piecewise({0.2, 0.6}, {2, 0.5, 1}),
        WeightSpec::powerlog(0.5, 1),
        WeightSpec::powerlog(0, -1),
    };
    return pool;
}

const Domain unit(1.0);

WeightSet weights_of(const std::array<WeightSpec, 4>& s)
{
    return {make_weight(s[0], unit), make_weight(s[1], unit), make_weight(s[2], unit), make_weight(s[3], unit)};
}

std::array<WeightSpec, 4> draw_weights(std::mt19937_64& rng)
{
    const auto& pool = weight_pool();
    std::array<WeightSpec, 4> s;
    for (auto& x : s) x = pool[rng() % pool.size()];
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------

const std::vector<std::pair<std::string, ParamTriple>>& bracket_triples()
{
    static const std::vector<std::pair<std::string, ParamTriple>> t = {
        {"i", {1, 2, 1.5}},   {"ii", {0.5, 2, 0.7}},  {"iii", {2, 3, 1.5}},   {"iv", {1, 2, 0.5}},
        {"v", {0.5, 0.8, 2}}, {"vi", {0.4, 0.8, 0.6}}, {"vii", {0.5, 0.8, 0.3}},
    };
    return t;
}

Outcome bracket_case(const std::string& tag, const ParamTriple& par)
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    ReportSettings s;  // default grid and oracle budget
    s.discrete = false;
    s.alternates = false;
    std::mt19937_64 rng(std::hash<std::string>{}(tag) % 1000 + 11);
    const auto need = classify_case(par).required;
    std::vector<double> ratios;
    std::set<std::string> families;
    int infinite = 0, draws = 0;
    while (ratios.size() < 20 && draws < 600) {
        ++draws;
        const auto spec = draw_weights(rng);
        const WeightSet ws = weights_of(spec);
        double bsum;
        try {
            bsum = detail::sum_of(detail::b_values_for(need, par, ws, s));
        } catch (const NonFinitePhi&) {
            continue;
        }
        if (!std::isfinite(bsum)) {
            ++infinite;
            continue;
        }
        const auto rep = embedding_constant_bounds(par, ws, s);
        ratios.push_back(rep.ratio);
        for (const auto& w : spec) families.insert(describe(w));
        const bool in = rep.ratio >= 1.0 / 200 && rep.ratio <= 200;
        if (!in) out.pass = false;
        out.details.push_back("case " + tag + " u=" + describe(spec[0]) + " delta=" + describe(spec[1]) +
                              " v=" + describe(spec[2]) + " w=" + describe(spec[3]) + " b_sum=" + num(rep.b_sum) +
                              " C>=" + num(rep.c_estimate.value) + " ratio=" + num(rep.ratio) + (in ? "" : "  OUTSIDE"));
    }
    const double secs = seconds_since(t0);
    const double lo = ratios.empty() ? 0 : *std::min_element(ratios.begin(), ratios.end());
    const double hi = ratios.empty() ? 0 : *std::max_element(ratios.begin(), ratios.end());
    if (ratios.size() < 20 || hi / lo > 50 || secs > 600) out.pass = false;
    out.summary = "case " + tag + " (p,q,r)=(" + num(par.p) + "," + num(par.q) + "," + num(par.r) +
                  "): " + std::to_string(ratios.size()) + " instances, ratio in [" + num(lo) + ", " + num(hi) +
                  "], max/min " + num(hi / lo) + ", " + std::to_string(infinite) +
                  " non-embedding draws skipped, " + std::to_string(families.size()) + " weight families, " +
                  num(secs, 3) + " s";
    return out;
}

Outcome theorem_bracket(const std::string& only)
{
    Outcome out;
    std::vector<std::string> parts;
    for (const auto& [tag, par] : bracket_triples()) {
        if (!only.empty() && only != tag) continue;
        Outcome c = bracket_case(tag, par);
        out.pass = out.pass && c.pass;
        out.details.push_back(c.summary + (c.pass ? "" : "  FAIL"));
        for (auto& d : c.details) out.details.push_back("  " + d);
        parts.push_back(tag);
    }
    if (parts.empty()) {
        out.pass = false;
        out.summary = "unknown case '" + only + "'";
        return out;
    }
    out.summary = "theorem bracket, b_sum/C in [1/200, 200] and max/min <= 50 per triple (cases";
    for (const auto& p : parts) out.summary += " " + p;
    out.summary += ")";
    return out;
}

// 2 -------------------------------------------------------------------------

Outcome reduction_identity()
{
    Outcome out;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0, 1);
    const double alphas[] = {-0.5, 0, 0.5, 1};
    auto pw = [&] { return make_weight(WeightSpec::power(alphas[rng() % 4]), unit); };
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // every fourth trial is from the r1 = 2 battery
        const double r1 = trial % 4 == 0 ? 2 : 0.5 + 3 * U(rng);
        const OriginalExponents e{r1, r1 * (0.5 + 2 * U(rng)), 0.5 + 3 * U(rng), 0.5 + 3 * U(rng)};
        const OriginalParams o{e, pw(), pw(), pw(), pw()};
        const int pieces = 1 + static_cast<int>(rng() % 8);
        std::vector<double> edges{0}, vals;
        for (int j = 0; j < pieces; ++j) edges.push_back(edges.back() + (0.2 + U(rng)) / pieces);
        for (double& x : edges) x = std::min(x, 1.0);
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (std::size_t j = 0; j + 1 < edges.size(); ++j) vals.push_back(0.01 + 2 * U(rng));
        std::sort(vals.rbegin(), vals.rend());
        const auto s = rearrangement_form({edges, vals}, o);
        worst = std::max({worst, s.lhs_error, s.rhs_error});
    }
    out.pass = worst <= 1e-6;
    out.summary = "reduction identity, 100 random nonincreasing step f*, worst relative error " + num(worst, 3);
    return out;
}

// 3 -------------------------------------------------------------------------

Outcome bennett()
{
    Outcome out;
    const std::vector<ParamTriple> regimes = {{1, 1, 1}, {1, 2, 3}, {0.5, 1, 2}, {2, 3, 1}, {1, 2, 0.5}, {0.7, 0.9, 0.3}};
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> LN(0, 1);
    double worst_K = 0;
    for (const auto& par : regimes) {
        double K = 1;
        for (int inst = 0; inst < 200; ++inst) {
            const std::size_t n = 1 + rng() % 8;
            RealSeq a{0, {}}, b{0, {}};
            for (std::size_t i = 0; i < n; ++i) {
                a.values.push_back(LN(rng));
                b.values.push_back(LN(rng));
            }
            const double D = discrete_hardy_D(a, b, par);
            const double bf = discrete_hardy_bruteforce(a, b, par, 12, 100 + static_cast<std::uint64_t>(inst)).ratio;
            K = std::max({K, D / bf, bf / D});
        }
        worst_K = std::max(worst_K, K);
        out.details.push_back("(p,q,r)=(" + num(par.p) + "," + num(par.q) + "," + num(par.r) + ") K=" + num(K));
        if (K > 20) out.pass = false;
    }
    const RealSeq a2{1, {1, 1}}, b2{1, {2, 1}};
    const double D2 = discrete_hardy_D(a2, b2, {1, 1, 1});
    const double bf2 = discrete_hardy_bruteforce(a2, b2, {1, 1, 1}, 64).ratio;
    const bool exact = std::abs(D2 - 4) <= 0.04 && std::abs(bf2 - 4) <= 0.04;
    out.pass = out.pass && exact;
    out.details.push_back("two-term instance: formula " + num(D2, 8) + ", brute force " + num(bf2, 8));
    out.summary = "Bennett discrete Hardy, 6 regimes x 200 instances, worst K " + num(worst_K) +
                  " (<= 20), two-term value " + num(bf2, 6);
    return out;
}

// 4 -------------------------------------------------------------------------

Outcome strong_monotone()
{
    Outcome out;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    const EquivalenceForm forms[] = {EquivalenceForm::increasing_sum_sum, EquivalenceForm::increasing_sum_sup,
                                     EquivalenceForm::increasing_sup_sum, EquivalenceForm::decreasing_sum_sum,
                                     EquivalenceForm::decreasing_sup_sum};
    int lower_violations = 0, upper_violations = 0;
    double worst = 0;  // largest lhs/rhs relative to the bound
    for (int trial = 0; trial < 500; ++trial) {
        const EquivalenceForm form = forms[trial % 5];
        const bool inc = trial % 5 < 3;
        const std::size_t n = 2 + rng() % 9;
        const double p = 0.3 + 2.7 * U(rng);
        RealSeq rho{0, {std::exp(4 * U(rng) - 2)}}, a{0, {}};
        for (std::size_t i = 1; i < n; ++i) {
            const double step = 1.5 + 2.5 * U(rng);
            rho.values.push_back(rho.values.back() * (inc ? step : 1 / step));
        }
        for (std::size_t i = 0; i < n; ++i) a.values.push_back(U(rng) < 0.15 ? 0.0 : std::exp(3 * U(rng) - 1.5));
        const MonotoneClass mc = is_strongly_monotone(rho);
        const double ratio_min = inc ? mc.rho : 1 / mc.rho;
        const auto r = strong_monotone_equivalence(rho, a, p, form);
        if (r.lhs < r.rhs * (1 - 1e-12)) ++lower_violations;
        const double bound = std::pow(1 - 1 / ratio_min, -std::max(p, 1.0)) * 4;
        if (r.rhs > 0) {
            worst = std::max(worst, (r.lhs / r.rhs) / bound);
            if (r.lhs / r.rhs > bound) ++upper_violations;
        }
    }
    out.pass = lower_violations == 0 && upper_violations == 0;
    out.summary = "strong monotonicity, 500 sequences: " + std::to_string(lower_violations) + " lhs<rhs, " +
                  std::to_string(upper_violations) + " above the bound, largest (lhs/rhs)/bound " + num(worst);
    return out;
}

// 5 -------------------------------------------------------------------------

Outcome covering_contract()
{
    Outcome out;
    std::mt19937_64 rng(5);
    const double as[] = {2, 10, 109};
    const double ps[] = {0.5, 1, 2};
    int built = 0, failed = 0, skipped = 0;
    const Grid grid = build_grid(unit, 512);
    while (built < 50) {
        const double a = as[built % 3], p = ps[rng() % 3];
        const auto spec = draw_weights(rng);
        const WeightSet ws = weights_of(spec);
        std::unique_ptr<Profile> pr;
        try {
            pr = std::make_unique<Profile>(ParamTriple{p, std::max(p, 1.0), 1}, ws, grid);
        } catch (const NonFinitePhi&) {
            ++skipped;
            continue;
        }
        const RealFn h = [&](double t) { return pr->phi(t); };
        const RealFn rho = [&](double t) { return std::pow(pr->U(t), p); };
        const auto cs = build_covering_sequence(h, rho, a, grid);
        ++built;
        const double e = p;
        const RealFn g = [&](double t) { return rho(t) / h(t); };
        const RealFn hp = [&](double t) { return std::pow(h(t), e); };
        const RealFn rp = [&](double t) { return std::pow(rho(t), e); };
        const std::pair<const char*, CoveringReport> reps[] = {
            {"(h, rho, a)", verify_covering_properties(cs, h, rho, a, grid)},
            {"(rho/h, rho, a)", verify_covering_properties(cs, g, rho, a, grid)},
            {"(h^p, rho^p, a^p)", verify_covering_properties(cs, hp, rp, std::pow(a, e), grid)},
        };
        for (const auto& [name, rep] : reps)
            if (!rep.ok) {
                ++failed;
                const auto* f = rep.failed();
                out.details.push_back(std::string(name) + " a=" + num(a) + " p=" + num(p) + " u=" + describe(spec[0]) +
                                      " v=" + describe(spec[2]) + ": " + (f ? f->name + " " + f->detail : "?"));
            }
    }
    out.pass = failed == 0;
    out.summary = "covering contract, 50 sequences x 3 triples, a in {2, 10, 109}: " + std::to_string(failed) +
                  " failures (" + std::to_string(skipped) + " draws with infinite phi redrawn)";
    return out;
}

// 6 -------------------------------------------------------------------------

Outcome dis_antidis()
{
    Outcome out;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0, 1);
    struct Level {
        Grid grid;
        std::unique_ptr<Profile> pr;
        CoveringSequence cs;
    };
    auto level = [](const ParamTriple& par, const WeightSet& ws, int n) {
        Level l{build_grid(unit, n), nullptr, {}};
        l.pr = std::make_unique<Profile>(par, ws, l.grid);
        const Profile& pr = *l.pr;
        l.cs = build_covering_sequence([&](double t) { return pr.phi(t); },
                                       [&](double t) { return std::pow(pr.U(t), par.p); }, 109, l.grid);
        return l;
    };
    const std::vector<std::pair<ParamTriple, std::array<WeightSpec, 4>>> setups = {
        {{1, 1, 1}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0)}},
        {{2, 2, 1}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0)}},
        {{1, 2, 1}, {WeightSpec::power(1), WeightSpec::power(0), WeightSpec::power(-0.5), WeightSpec::power(0)}},
        {{0.5, 1, 1}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::powerlog(0, -1), WeightSpec::power(0)}},
        {{2, 3, 1}, {WeightSpec::power(0.5), WeightSpec::power(0), WeightSpec::piecewise({0.5}, {1, 3}),
                     WeightSpec::power(0)}},
    };
    double worst = 0;
    int done = 0;
    for (const auto& [par, spec] : setups) {
        const WeightSet ws = weights_of(spec);
        const Level coarse = level(par, ws, 1024), fine = level(par, ws, 2048);
        for (int j = 0; j < 10; ++j, ++done) {
            const int pieces = 1 + static_cast<int>(rng() % 6);
            std::vector<double> edges, vals;
            for (int k = 0; k <= pieces; ++k) edges.push_back(std::pow(10.0, -6 * U(rng)));
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            if (edges.size() < 2) edges = {0.01, 0.5};
            for (std::size_t k = 0; k + 1 < edges.size(); ++k) vals.push_back(std::exp(2 * U(rng) - 1));
            const TestFunction g{edges, vals};
            const auto c = dis_antidis_check(g, coarse.cs, *coarse.pr), f = dis_antidis_check(g, fine.cs, *fine.pr);
            const double ch = std::max({std::abs(f.ratio_cont_point / c.ratio_cont_point - 1),
                                        std::abs(f.ratio_point_block / c.ratio_point_block - 1),
                                        std::abs(f.ratio_cont_block / c.ratio_cont_block - 1)});
            worst = std::max(worst, ch);
            if (ch > 0.1) {
                out.pass = false;
                out.details.push_back("g #" + std::to_string(done) + " changed by " + num(ch));
            }
        }
        out.details.push_back("(p,q,r)=(" + num(par.p) + "," + num(par.q) + "," + num(par.r) + ") covering M-N=" +
                              std::to_string(coarse.cs.M() - coarse.cs.N) + "/" + std::to_string(fine.cs.M() - fine.cs.N));
    }
    out.summary = "dis/antidiscretization, 50 random g, a = 109, n=1024 vs 2048: largest ratio change " +
                  num(worst * 100, 3) + "% (<= 10%)";
    return out;
}

// 7 -------------------------------------------------------------------------

Outcome lemma_battery()
{
    Outcome out;
    const std::vector<std::pair<ParamTriple, std::array<WeightSpec, 4>>> setups = {
        {{2, 2, 1}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0)}},
        {{1.5, 2, 0.5}, {WeightSpec::power(0), WeightSpec::power(0.5), WeightSpec::power(1), WeightSpec::power(0)}},
        {{1, 2, 0.5}, {WeightSpec::power(0.5), WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(1)}},
        {{2, 3, 1.5}, {WeightSpec::power(0), WeightSpec::power(1), WeightSpec::piecewise({0.5}, {1, 3}),
                       WeightSpec::power(0)}},
        {{0.8, 1, 0.3}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::powerlog(0, -1), WeightSpec::power(0)}},
        {{3, 3, 2}, {WeightSpec::power(1), WeightSpec::power(0), WeightSpec::power(-0.5), WeightSpec::power(0)}},
    };
    const Grid grid = build_grid(unit, 512);
    double worst = 0;
    int checks = 0;
    for (const auto& [par, spec] : setups) {
        const WeightSet ws = weights_of(spec);
        const Profile pr(par, ws, grid);
        for (double a : {2.0, 10.0}) {
            const auto cs = build_covering_sequence([&](double t) { return pr.phi(t); },
                                                    [&](double t) { return std::pow(pr.U(t), par.p); }, a, grid);
            std::vector<LemmaCheck> which = {LemmaCheck::lemma1, LemmaCheck::lemma2, LemmaCheck::lemma3,
                                             LemmaCheck::lemma4, LemmaCheck::R1R2};
            if (par.r < 1) which.push_back(LemmaCheck::R3R4);
            std::string line = "(p,q,r)=(" + num(par.p) + "," + num(par.q) + "," + num(par.r) + ") a=" + num(a) + ":";
            for (LemmaCheck w : which) {
                const LemmaReport rep = antid_lemma_check(cs, pr, w);
                if (!rep.applicable) {
                    line += std::string(" ") + to_string(w) + "=n/a";
                    continue;
                }
                ++checks;
                worst = std::max(worst, rep.max_ratio);
                if (!rep.pass) out.pass = false;
                line += std::string(" ") + to_string(w) + "=" + num(rep.max_ratio, 3) + (rep.pass ? "" : "!");
            }
            out.details.push_back(line);
        }
    }
    out.summary = "lemma checks, " + std::to_string(checks) + " applicable checks on the r < p battery, worst ratio " +
                  num(worst) + " (K_check = 1e3)";
    return out;
}

// 8 -------------------------------------------------------------------------

Outcome homogeneity()
{
    Outcome out;
    const double lambda = 16, mu = 9, c = 3.5;
    const std::vector<std::pair<ParamTriple, std::array<WeightSpec, 4>>> setups = {
        {{0.5, 0.8, 0.3}, {WeightSpec::power(0), WeightSpec::power(0.5), WeightSpec::power(1),
                           WeightSpec::piecewise({0.5}, {1, 3})}},
        {{2, 2, 1.5}, {WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(0),
                       WeightSpec::piecewise({0.5}, {1, 3})}},
        {{0.5, 0.8, 2}, {WeightSpec::power(0), WeightSpec::power(1.2), WeightSpec::power(0), WeightSpec::power(0)}},
        {{1, 2, 0.5}, {WeightSpec::power(0.5), WeightSpec::power(0), WeightSpec::power(0), WeightSpec::power(1)}},
    };
    const Grid grid = build_grid(unit, 512);
    OracleBudget budget;
    budget.restarts = 6;
    budget.pieces = 32;
    double worst = 0;
    int compared = 0;
    auto check = [&](const std::string& what, double base, double scaled, double factor) {
        if (!std::isfinite(base) || base == 0) return;
        ++compared;
        const double err = std::abs(scaled / base / factor - 1);
        worst = std::max(worst, err);
        if (err > 1e-6) {
            out.pass = false;
            out.details.push_back(what + " off by " + num(err, 3));
        }
    };
    for (const auto& [par, spec] : setups) {
        const WeightSet ws = weights_of(spec);
        WeightSet wl = ws, vm = ws;
        wl.w = ws.w.scaled(lambda);
        vm.v = ws.v.scaled(mu);
        const double fw = std::pow(lambda, 1 / par.q), fv = std::pow(mu, -1 / par.p);
        const Profile p0(par, ws, grid), pw(par, wl, grid), pv(par, vm, grid);
        const std::string tag = "(" + num(par.p) + "," + num(par.q) + "," + num(par.r) + ") ";
        for (int k = 1; k <= 8; ++k) {
            double b0;
            try {
                b0 = compute_B(k, p0, grid).value;
            } catch (const OutOfScope&) {
                continue;
            }
            check(tag + "B" + std::to_string(k) + " w", b0, compute_B(k, pw, grid).value, fw);
            check(tag + "B" + std::to_string(k) + " v", b0, compute_B(k, pv, grid).value, fv);
        }
        // φ scales with v, so the covering built once serves all three profiles
        const auto cs = build_covering_sequence([&](double t) { return p0.phi(t); },
                                                [&](double t) { return std::pow(p0.U(t), par.p); }, 2, grid);
        for (const auto& l : cij_labels()) {
            double c0;
            try {
                c0 = compute_Cij(cs, p0, l);
            } catch (const OutOfScope&) {
                continue;
            } catch (const EmptyCovering&) {
                continue;
            }
            check(tag + l + " w", c0, compute_Cij(cs, pw, l), fw);
            check(tag + l + " v", c0, compute_Cij(cs, pv, l), fv);
        }
        const double e0 = estimate_C(par, ws, budget, 5).value;
        check(tag + "estimate_C w", e0, estimate_C(par, wl, budget, 5).value, fw);
        check(tag + "estimate_C v", e0, estimate_C(par, vm, budget, 5).value, fv);

        // h -> c h is exact
        const TestFunction h{{1e-4, 0.01, 0.3, 0.9}, {2.0, 0.7, 1.3}};
        for (auto side : {&functional_lhs, &functional_rhs}) {
            const double a = (*side)(h, par, ws, default_quad_tol), b = (*side)(h.scaled(c), par, ws, default_quad_tol);
            const double err = std::abs(b / a / c - 1);
            worst = std::max(worst, err);
            ++compared;
            if (err > 1e-12) {
                out.pass = false;
                out.details.push_back(tag + "functional scaling off by " + num(err, 3));
            }
        }
    }
    out.summary = "homogeneity, " + std::to_string(compared) + " scaled quantities (B, C_ij, estimate_C, lhs/rhs), worst "
                  "relative error " + num(worst, 3);
    return out;
}

// 9 -------------------------------------------------------------------------

Outcome closed_forms()
{
    Outcome out;
    const Grid grid = build_grid(unit, 1024);
    const WeightSet ws = unit_weights(unit);
    const Profile p1({1, 1, 1}, ws, grid), p2({2, 2, 1}, ws, grid);
    const std::vector<std::tuple<std::string, double, double>> rows = {
        {"phi(0.5), p=1", p1.phi(0.5), 0.846574},
        {"phi(0.5), p=2", p2.phi(0.5), 0.75},
        {"sigma(0.5), p=2 r=1", p2.sigma(0.5), 0.59259},
        {"B1, p=q=r=1", compute_B(1, p1, grid).value, 1},
        {"B2, p=q=r=1", compute_B(2, p1, grid).value, 1},
    };
    double worst = 0;
    for (const auto& [name, got, want] : rows) {
        const double err = std::abs(got - want);
        worst = std::max(worst, err);
        if (err > 1e-4) out.pass = false;
        out.details.push_back(name + " = " + num(got, 8) + " (reference " + num(want, 8) + ")");
    }
    out.summary = "closed-form regressions, largest deviation " + num(worst, 3) + " (<= 1e-4)";
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::map<std::string, std::function<Outcome(const std::string&)>> criteria = {
        {"1", theorem_bracket},
        {"2", [](const std::string&) { return reduction_identity(); }},
        {"3", [](const std::string&) { return bennett(); }},
        {"4", [](const std::string&) { return strong_monotone(); }},
        {"5", [](const std::string&) { return covering_contract(); }},
        {"6", [](const std::string&) { return dis_antidis(); }},
        {"7", [](const std::string&) { return lemma_battery(); }},
        {"8", [](const std::string&) { return homogeneity(); }},
        {"9", [](const std::string&) { return closed_forms(); }},
    };
    std::vector<std::string> selected(argv + 1, argv + argc);
    if (selected.empty())
        for (const auto& [k, v] : criteria) selected.push_back(k);

    bool all = true;
    for (const auto& sel : selected) {
        const auto colon = sel.find(':');
        const std::string id = sel.substr(0, colon), arg = colon == std::string::npos ? "" : sel.substr(colon + 1);
        const auto it = criteria.find(id);
        if (it == criteria.end()) {
            std::cout << "FAIL criterion " << sel << ": unknown criterion\n";
            all = false;
            continue;
        }
        Outcome o;
        try {
            o = it->second(arg);
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("threw ") + e.what();
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << sel << ": " << o.summary << "\n";
        for (const auto& d : o.details) std::cout << "    " << d << "\n";
        std::cout.flush();
    }
    return all ? 0 : 1;
}
