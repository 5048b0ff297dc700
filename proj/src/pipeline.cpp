#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ggamma/config.hpp"
#include "ggamma/covering.hpp"
#include "ggamma/discrete.hpp"
#include "ggamma/parallel.hpp"
#include "ggamma/profile.hpp"

namespace ggamma {

namespace {

std::string fmt(double x)
{
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// commas, quotes and newlines would break the row
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

}  // namespace

EmbeddingReport run_embed_check(const RunConfig& c)
{
    const auto [par, ws] = resolve(c);
    EmbeddingReport rep = embedding_constant_bounds(par, ws, c.settings);
    if (!c.report_path.empty()) write_text(c.report_path, to_json(rep).dump(2) + "\n");
    if (!c.curves_path.empty())
        export_curves(par, ws, build_grid(ws.domain(), c.settings.grid_n, c.settings.grid_mode), c.curves_path);
    return rep;
}

std::string run_suite(const std::vector<RunConfig>& configs, unsigned jobs)
{
    if (configs.empty()) throw EmptyBatch("the suite has no configurations");
    auto rows = parallel_map(configs.size(), jobs, [&](std::size_t i) {
        RunConfig c = configs[i];
        c.settings.jobs = 1;  // parallelism lives at the row level
        c.report_path.clear();
        c.curves_path.clear();
        std::ostringstream row;
        row << i << ',' << csv_field(c.name) << ',';
        try {
            const EmbeddingReport r = run_embed_check(c);
            row << to_string(r.case_id.tag);
            for (int k = 1; k <= 8; ++k) {
                row << ',';
                if (auto it = r.b_values.find(k); it != r.b_values.end()) row << fmt(it->second.value);
            }
            std::string flags;
            for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
            row << ',' << fmt(r.b_sum) << ',' << fmt(r.c_estimate.value) << ',' << fmt(r.ratio) << ','
                << csv_field(flags) << ',';
        } catch (const std::exception& e) {
            row << ",,,,,,,,,,,,," << csv_field(e.what());
        }
        return row.str();
    });
    std::string out = "index,name,case,B1,B2,B3,B4,B5,B6,B7,B8,b_sum,c_estimate,ratio,flags,error\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
}

void export_curves(const ParamTriple& par, const WeightSet& ws, const Grid& grid, const std::string& path)
{
    validate(par);
    const Profile pr(par, ws, grid);
    const bool with_sigma = par.r < par.p;
    std::ostringstream os;
    os << "t,U,Delta,V,W,phi,sigma\n";
    for (double t : grid.points) {
        os << fmt(t) << ',' << fmt(pr.U(t)) << ',' << fmt(pr.Delta(t)) << ',' << fmt(pr.V(t)) << ',' << fmt(pr.W(t))
           << ',' << fmt(pr.phi(t)) << ',';
        if (with_sigma) os << fmt(pr.sigma(t));
        os << '\n';
    }
    write_text(path, os.str());
}

std::string covering_table(const RunConfig& c)
{
    const auto [par, ws] = resolve(c);
    const Grid grid = build_grid(ws.domain(), c.settings.grid_n, c.settings.grid_mode);
    const Profile pr(par, ws, grid);
    const RealFn h = [&](double t) { return pr.phi(t); };
    const RealFn rho = [&, p = par.p](double t) { return std::pow(pr.U(t), p); };
    CoveringOptions co;
    co.infinite_end = ws.domain().infinite();
    const CoveringSequence cs = build_covering_sequence(h, rho, c.settings.a, grid, co);
    std::ostringstream os;
    os << "k,x_k,h,rho,zone\n";
    for (int k = cs.N; k <= cs.M(); ++k) {
        const double x = cs.x(k);
        os << k << ',' << fmt(x) << ',';
        if (x > 0) os << fmt(h(x)) << ',' << fmt(rho(x));
        else os << ',';
        os << ',';
        if (k > cs.N) os << (cs.in_z1(k) ? "Z1" : "Z2");
        os << '\n';
    }
    return os.str();
}

std::string oracle_summary(const RunConfig& c)
{
    const auto [par, ws] = resolve(c);
    const auto& s = c.settings;
    const CEstimate e = estimate_C(par, ws, s.budget, s.seed, s.jobs, s.quad_tol);
    std::ostringstream os;
    os << "# estimate " << fmt(e.value) << "\n"
       << "# restarts " << e.budget.restarts << " iterations " << e.budget.iterations << " pieces " << e.budget.pieces
       << " decades " << fmt(e.budget.decades) << " seed " << e.seed << " quad_tol " << fmt(s.quad_tol) << "\n"
       << "left,right,value\n";
    const auto& w = e.witness;
    for (std::size_t i = 0; i < w.values.size(); ++i)
        os << fmt(w.edges[i]) << ',' << fmt(w.edges[i + 1]) << ',' << fmt(w.values[i]) << '\n';
    return os.str();
}

std::string hardy_discrete_summary(const std::string& csv, const ParamTriple& par, int trials, std::uint64_t seed,
                                   unsigned jobs)
{
    RealSeq a{1, {}}, b{1, {}};
    std::istringstream in(csv);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x >> y)) {
            if (lineno == 1) continue;  // header
            throw ConfigError("line " + std::to_string(lineno) + ": expected two numbers a,b");
        }
        a.values.push_back(x);
        b.values.push_back(y);
    }
    if (a.values.empty()) throw EmptyBatch("no a,b rows in the input");
    std::ostringstream os;
    os << "D," << fmt(discrete_hardy_D(a, b, par)) << '\n';
    if (trials > 0) {
        const DiscreteReport r = discrete_hardy_bruteforce(a, b, par, trials, seed, jobs);
        os << "bruteforce," << fmt(r.ratio) << '\n';
    }
    return os.str();
}

}  // namespace ggamma
