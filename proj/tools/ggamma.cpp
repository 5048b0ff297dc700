// Command-line driver: init, embed-check, suite, covering, hardy-discrete, oracle, curves.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggamma/config.hpp"

using namespace ggamma;

namespace {

// Flags shared by every config-driven subcommand; unset flags leave the config alone.
struct Overrides {
    std::optional<int> grid_n;
    std::optional<std::string> grid_mode;
    std::optional<double> esup_tol, quad_tol, a;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--grid-n", grid_n, "grid size (>= 8)");
        cmd->add_option("--grid-mode", grid_mode, "log | linear | hybrid");
        cmd->add_option("--esup-tol", esup_tol, "relative tolerance of the refined suprema");
        cmd->add_option("--quad-tol", quad_tol, "quadrature tolerance");
        cmd->add_option("--a", a, "covering ratio (> 1)");
        cmd->add_option("--seed", seed, "oracle seed");
        cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    }

    void apply(RunConfig& c) const
    {
        auto& s = c.settings;
        if (grid_n) {
            if (*grid_n < 8) throw ConfigError("--grid-n must be at least 8");
            s.grid_n = *grid_n;
        }
        if (grid_mode) {
            try {
                s.grid_mode = grid_mode_from_string(*grid_mode);
            } catch (const BadCount&) {
                throw ConfigError("--grid-mode must be log, linear or hybrid");
            }
        }
        if (esup_tol) {
            if (!(*esup_tol > 0)) throw ConfigError("--esup-tol must be positive");
            s.esup_tol = *esup_tol;
        }
        if (quad_tol) {
            if (!(*quad_tol > 0)) throw ConfigError("--quad-tol must be positive");
            s.quad_tol = *quad_tol;
        }
        if (a) {
            if (!(*a > 1)) throw ConfigError("--a must exceed 1");
            s.a = *a;
        }
        if (seed) s.seed = *seed;
        s.jobs = jobs;
    }
};

void emit(const std::string& out, const std::string& text)
{
    if (out.empty()) std::cout << text;
    else write_text(out, text);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Embedding constants between generalised Gamma spaces"};
    app.require_subcommand(1);

    std::string out, config;
    std::vector<std::string> configs;
    Overrides ov;

    auto* init = app.add_subcommand("init", "write a commented config template");
    init->add_option("--out", out, "destination (default stdout)");

    auto* embed = app.add_subcommand("embed-check", "B values, discrete constants and oracle estimate as JSON");
    embed->add_option("config", config, "config file")->required();
    embed->add_option("--out", out, "report path (overrides the config)");
    ov.attach(embed);

    auto* suite = app.add_subcommand("suite", "one CSV row per config");
    suite->add_option("configs", configs, "config files")->required();
    suite->add_option("--out", out, "CSV path (default stdout)");
    ov.attach(suite);

    auto* covering = app.add_subcommand("covering", "covering sequence of phi against U^p as CSV");
    covering->add_option("config", config, "config file")->required();
    covering->add_option("--out", out, "CSV path (default stdout)");
    ov.attach(covering);

    ParamTriple par;
    int trials = 0;
    auto* hardy = app.add_subcommand("hardy-discrete", "discrete Hardy constant for a,b given as CSV");
    hardy->add_option("csv", config, "CSV with columns a,b")->required();
    hardy->add_option("--p", par.p)->required();
    hardy->add_option("--q", par.q)->required();
    hardy->add_option("--r", par.r)->required();
    hardy->add_option("--trials", trials, "brute-force restarts (0 = skip)");
    hardy->add_option("--out", out, "output path (default stdout)");
    ov.attach(hardy);

    auto* oracle = app.add_subcommand("oracle", "lower bound on the embedding constant with its witness");
    oracle->add_option("config", config, "config file")->required();
    oracle->add_option("--out", out, "output path (default stdout)");
    ov.attach(oracle);

    auto* curves = app.add_subcommand("curves", "t, U, Delta, V, W, phi, sigma on the grid as CSV");
    curves->add_option("config", config, "config file")->required();
    curves->add_option("--out", out, "CSV path")->required();
    ov.attach(curves);

    CLI11_PARSE(app, argc, argv);

    auto load = [&](const std::string& path) {
        RunConfig c = load_config(path);
        ov.apply(c);
        return c;
    };

    try {
        if (*init) {
            emit(out, config_template());
        } else if (*embed) {
            RunConfig c = load(config);
            if (!out.empty()) c.report_path = out;
            const EmbeddingReport rep = run_embed_check(c);
            if (c.report_path.empty()) std::cout << to_json(rep).dump(2) << "\n";
        } else if (*suite) {
            std::vector<RunConfig> batch;
            for (const auto& p : configs) batch.push_back(load(p));
            emit(out, run_suite(batch, ov.jobs));
        } else if (*covering) {
            emit(out, covering_table(load(config)));
        } else if (*hardy) {
            RunConfig dummy;
            ov.apply(dummy);
            emit(out, hardy_discrete_summary(read_text(config), par, trials, dummy.settings.seed, ov.jobs));
        } else if (*oracle) {
            emit(out, oracle_summary(load(config)));
        } else if (*curves) {
            const RunConfig c = load(config);
            const auto [p, ws] = resolve(c);
            export_curves(p, ws, build_grid(ws.domain(), c.settings.grid_n, c.settings.grid_mode), out);
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
